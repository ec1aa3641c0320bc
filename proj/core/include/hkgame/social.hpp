#pragma once

#include <memory>
#include <utility>

#include <Eigen/Dense>

#include "hkgame/dynamics.hpp"
#include "hkgame/nash.hpp"

namespace hkgame {

/// Centralized optimum of x(t_f)^T L x(t_f) + int u^T R u dt.
class SocialSolution {
 public:
  const GameConfig& config() const { return cfg_; }
  const GraphMatrices& matrices() const { return matrices_; }
  const Eigen::MatrixXd& H_hat() const { return h_hat_; }
  double condition() const { return condition_; }
  const Eigen::VectorXd& terminal_state() const { return terminal_; }
  /// lambda(t_f) = L x(t_f).
  const Eigen::VectorXd& terminal_costate() const { return terminal_costate_; }
  const Trajectory& trajectory() const { return trajectory_; }
  double social_cost() const { return social_cost_; }

  /// u(t) = -R^{-1} B^T e^{(t_f - t) Lambda^T} L x(t_f).
  Eigen::VectorXd controls(double t) const;
  ControlFunction control_function() const;
  /// lambda(t) = e^{(t_f - t) Lambda^T} L x(t_f), by a fresh matrix exponential.
  Eigen::VectorXd costate(double t) const;
  Eigen::VectorXd state(double t) const;

  friend SocialSolution solve_social(const GameConfig& cfg);

 private:
  explicit SocialSolution(GameConfig cfg) : cfg_(std::move(cfg)) {}

  GameConfig cfg_;
  GraphMatrices matrices_;
  Eigen::MatrixXd h_hat_;
  double condition_ = 1.0;
  Eigen::VectorXd terminal_;
  Eigen::VectorXd terminal_costate_;
  std::shared_ptr<const ExponentialPropagator> propagator_;
  Trajectory trajectory_;
  double social_cost_ = 0.0;
};

/// B R^{-1} B^T = diag(b_i^2 / r_i).
Eigen::MatrixXd social_input_weight(const GameConfig& cfg);

/// Throws SingularSystemError when H_hat(t_f) = I + Psi_hat(t_f) L is singular.
SocialSolution solve_social(const GameConfig& cfg);

struct SocialGap {
  double at_social;  // social cost of the centralized optimum
  double at_nash;    // social cost of the Nash equilibrium trajectory
};

SocialGap social_vs_nash_gap(const GameConfig& cfg);

}  // namespace hkgame
