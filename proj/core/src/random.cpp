#include "hkgame/random.hpp"

namespace hkgame {

Eigen::VectorXd two_cluster_opinions(int n, std::uint64_t seed) {
  PortableRng rng(seed);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    const double v = rng.uniform();
    const double w = rng.uniform();
    x(i) = v < 0.5 ? -1.5 + w : 0.5 + w;
  }
  return x;
}

}  // namespace hkgame
