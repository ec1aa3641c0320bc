#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hkgame/dynamics.hpp"
#include "hkgame/graph.hpp"
#include "hkgame/matrix_functions.hpp"

namespace hkgame {

/// Boundary matrices with a condition number above this are treated as
/// singular.
inline constexpr double kMaxCondition = 1e12;

/// e^{s Lambda} for many s. Uses the eigenbasis of the symmetrizable HK
/// generator when that factorization reproduces the scaling-and-squaring
/// exponential at the horizon to 1e-10, and a fresh matrix exponential per
/// call otherwise.
class ExponentialPropagator {
 public:
  ExponentialPropagator(const Eigen::MatrixXd& lambda, const Eigen::VectorXd& degrees,
                        double horizon);

  bool spectral() const { return eigenbasis_.has_value(); }
  const std::optional<SymmetrizableExponential>& eigenbasis() const { return eigenbasis_; }
  Eigen::MatrixXd exp(double s) const;
  Eigen::VectorXd apply_transpose(double s, const Eigen::VectorXd& v) const;
  /// int_0^t e^{s Lambda} S e^{s Lambda^T} ds.
  Eigen::MatrixXd gramian(const Eigen::MatrixXd& weight, double t) const;

 private:
  Eigen::MatrixXd lambda_;
  std::optional<SymmetrizableExponential> eigenbasis_;
};

/// Closed-form open-loop equilibrium control of one agent,
/// u_i(t) = -(1/(r_i |N_i|)) B_i^T e^{(t_f - t) Lambda^T} v_i with the constant
/// vector v_i = L_i H^{-1}(t_f) e^{t_f Lambda} x0.
class OpenLoopPolicy {
 public:
  OpenLoopPolicy(int agent, double horizon, double gain, Eigen::VectorXd v,
                 std::shared_ptr<const ExponentialPropagator> propagator);

  int agent() const { return agent_; }
  double gain() const { return gain_; }
  const Eigen::VectorXd& constant_vector() const { return v_; }
  /// u_i(t) = gain * modal . e^{(t_f - t) mu}; empty when no eigenbasis is used.
  const Eigen::VectorXd& modal() const { return modal_; }
  /// Throws std::out_of_range for t outside [0, t_f].
  double operator()(double t) const;

 private:
  int agent_;
  double horizon_;
  double gain_;  // -b_i / (r_i |N_i|)
  Eigen::VectorXd v_;
  std::shared_ptr<const ExponentialPropagator> propagator_;
  // Coefficients of e^{(t_f - t) mu_m} in the eigenbasis, empty without one.
  Eigen::VectorXd modal_;
};

struct BoundaryMatrix {
  Eigen::MatrixXd h;
  double condition;
};

/// Vertical stack of the blocks L_i / |N_i| (n^2 x n).
Eigen::MatrixXd build_delta(const SocialGraph& g);

/// H(t_f) = I + sum_i Psi_i(t_f) L_i / |N_i|, with its 2-norm condition
/// number. Throws SingularSystemError when the condition exceeds kMaxCondition.
BoundaryMatrix build_H(const GameConfig& cfg);

class NashSolution {
 public:
  const GameConfig& config() const { return cfg_; }
  const GraphMatrices& matrices() const { return matrices_; }
  const Eigen::MatrixXd& H() const { return h_; }
  double H_condition() const { return condition_; }
  /// x(t_f) = H^{-1} e^{t_f Lambda} x0.
  const Eigen::VectorXd& terminal_state() const { return terminal_; }
  const std::vector<OpenLoopPolicy>& policies() const { return policies_; }
  const Trajectory& trajectory() const { return trajectory_; }
  const std::vector<double>& costs() const { return costs_; }

  /// All equilibrium controls at time t.
  Eigen::VectorXd controls(double t) const;
  ControlFunction control_function() const;
  /// Closed-form equilibrium state at an arbitrary t in [0, t_f].
  Eigen::VectorXd state(double t) const;

  friend NashSolution solve(const GameConfig& cfg);

 private:
  explicit NashSolution(GameConfig cfg) : cfg_(std::move(cfg)) {}

  GameConfig cfg_;
  GraphMatrices matrices_;
  Eigen::MatrixXd h_;
  double condition_ = 1.0;
  Eigen::VectorXd terminal_;
  std::vector<OpenLoopPolicy> policies_;
  std::shared_ptr<const ExponentialPropagator> propagator_;
  // Row i: gain_i * modal coefficients of policy i (eigenbasis path only).
  std::shared_ptr<const Eigen::MatrixXd> modal_controls_;
  Eigen::MatrixXd coupling_;  // column i: lambda_i(t_f) = L_i x(t_f) / |N_i|
  Trajectory trajectory_;
  std::vector<double> costs_;
};

/// Open-loop Nash equilibrium: terminal state, per-agent policies, the
/// closed-form trajectory on the sampling grid and realized costs J_i.
NashSolution solve(const GameConfig& cfg);

/// lambda_i(t) = e^{(t_f - t) Lambda^T} L_i x(t_f) / |N_i|.
Eigen::VectorXd costate(const NashSolution& sol, int i, double t);

/// Input-to-state weight S_i = b_i^2 / r_i e_i e_i^T.
Eigen::MatrixXd agent_input_weight(const GameConfig& cfg, int i);

/// Closed-form state on the sampling grid for costate-driven controls:
///   x(t) = e^{t Lambda} x0 - sum_i Psi_i(t) e^{(t_f - t) Lambda^T} c_i,
/// Psi_i the Gramian of weights[i] and c_i column i of `terminal_costates`.
/// Gramians come from the semigroup recurrence. Row k is grid time k.
Eigen::MatrixXd costate_driven_states(const GameConfig& cfg, const Eigen::MatrixXd& lambda,
                                      const std::vector<Eigen::MatrixXd>& weights,
                                      const Eigen::MatrixXd& terminal_costates);

}  // namespace hkgame
