#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hkgame/dynamics.hpp"
#include "hkgame/nash.hpp"
#include "hkgame/social.hpp"

namespace hkgame {

struct CheckDetail {
  int agent = -1;
  double time = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  double residual = 0.0;
};

/// Outcome of one numerical check; passed <=> max_residual <= tolerance.
/// Unasserted reports (measurements) never count as failures.
struct VerificationReport {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  bool asserted = true;
  std::vector<CheckDetail> details;

  VerificationReport(std::string name, double tolerance, bool asserted = true);
  void record(const CheckDetail& detail);
};

/// Integrates the dynamics under the solution's own controls and reports the
/// sup-norm deviation from the closed-form trajectory.
VerificationReport check_trajectory_oracle(const NashSolution& sol, double tolerance = 1e-5,
                                           int oversampling = kDefaultOversampling);
VerificationReport check_trajectory_oracle(const SocialSolution& sol, double tolerance = 1e-5,
                                           int oversampling = kDefaultOversampling);

/// Necessary-condition residuals at interior grid points.
struct PontryaginReports {
  VerificationReport stationarity{"control_stationarity", 1e-12};
  VerificationReport costate_ode{"costate_ode", 1e-5};
  VerificationReport terminal{"terminal_condition", 1e-10};
  VerificationReport state_ode{"state_ode", 1e-5};

  std::vector<VerificationReport> all() const {
    return {stationarity, costate_ode, terminal, state_ode};
  }
};

inline constexpr double kDerivativeStep = 1e-4;

PontryaginReports check_pontryagin(const NashSolution& sol, int points = 20);
PontryaginReports check_pontryagin(const SocialSolution& sol, int points = 20);

/// Piecewise-linear function on a subset of the sampling grid.
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> knots, Eigen::VectorXd values);

  double operator()(double t) const;
  const std::vector<double>& knots() const { return knots_; }
  const Eigen::VectorXd& values() const { return values_; }
  /// Exact squared L2 norm over the knot range.
  double squared_norm() const;

 private:
  std::vector<double> knots_;
  Eigen::VectorXd values_;
};

/// Perturbation knots: every `stride`-th grid time with an even stride, so
/// each linear piece spans whole Simpson panels, aiming for about `pieces`
/// pieces. The last grid time is always a knot.
std::vector<double> perturbation_knots(const std::vector<double>& grid, int pieces = 20);

struct DeviationReports {
  VerificationReport decrease{"nash_deviation", 1e-8};
  VerificationReport gradient{"nash_gradient", 1e-4};
};

/// Unilateral deviation test. Each probed agent's control is perturbed by
/// epsilon * delta for `directions` seeded unit-norm piecewise-linear delta,
/// the dynamics re-integrated and J_i recomputed. `decrease` carries the
/// largest (J_i - J_i(perturbed)) / (1 + J_i); `gradient` the Euclidean norm
/// of the central-difference gradient of J_i in the knot values of u_i.
DeviationReports check_nash_deviation(const NashSolution& sol, std::span<const int> agents,
                                       int directions = 20, double epsilon = 1e-3,
                                       std::uint64_t seed = 0);

/// Same perturbation test on the whole control vector against the social cost.
VerificationReport check_social_minimizer(const SocialSolution& sol, int directions = 20,
                                          double epsilon = 1e-3, std::uint64_t seed = 0);

/// Sensitivity of u_i(.) to each initial opinion x_{j0}: entry j is
/// max over the grid of |d u_i(t) / d x_{j0}|.
struct LocalityProbe {
  int agent = 0;
  Eigen::VectorXd sensitivities;
  /// Agents outside {i} and N_i with sensitivity above `threshold`.
  std::vector<int> non_local;
  /// max_t |sum_j d u_i(t) / d x_{j0}|: response to a uniform shift of x0.
  double translation_sensitivity = 0.0;
  double threshold = 1e-10;
  VerificationReport report{"locality_probe", 1e-10, false};
};

LocalityProbe locality_probe(const NashSolution& sol, int i);
LocalityProbe locality_probe(const GameConfig& cfg, int i);

/// Agents {0, n/2 - 1, n - 1}, deduplicated.
std::vector<int> default_probe_agents(int n);

}  // namespace hkgame
