#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace hkgame {

/// Portable uniform draws: std::mt19937_64 output is fixed by the standard,
/// and the mapping to (0, 1) is ((word >> 11) + 0.5) * 2^-53, so a seed gives
/// the same numbers on every conforming platform.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

/// Initial opinions split into two clusters: per agent draw v then w from
/// (0, 1); the opinion is -1.5 + w when v < 1/2 and 0.5 + w otherwise.
Eigen::VectorXd two_cluster_opinions(int n, std::uint64_t seed);

}  // namespace hkgame
