#include "hkgame/social.hpp"

#include <limits>
#include <sstream>
#include <stdexcept>

#include "hkgame/errors.hpp"
#include "hkgame/matrix_functions.hpp"

namespace hkgame {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_time(double t, double horizon) {
  if (!(t >= 0.0 && t <= horizon)) {
    std::ostringstream msg;
    msg << "time " << t << " outside the horizon [0, " << horizon << "]";
    throw std::out_of_range(msg.str());
  }
}

}  // namespace

Eigen::MatrixXd social_input_weight(const GameConfig& cfg) {
  return (cfg.b.cwiseAbs2().cwiseQuotient(cfg.r)).asDiagonal();
}

SocialSolution solve_social(const GameConfig& cfg) {
  cfg.validate();
  SocialSolution sol(cfg);
  const int n = cfg.agents();
  sol.matrices_ = build_graph_matrices(cfg.graph);
  const MatrixXd& lambda = sol.matrices_.dynamics;
  const MatrixXd& laplacian = sol.matrices_.global_laplacian;
  const MatrixXd weight = social_input_weight(cfg);

  const MatrixXd psi_hat = gramian_integral(lambda, weight, cfg.horizon).value;
  sol.h_hat_ = MatrixXd::Identity(n, n) + psi_hat * laplacian;
  Eigen::JacobiSVD<MatrixXd> svd(sol.h_hat_);
  const auto& sv = svd.singularValues();
  sol.condition_ = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
  if (!(sol.condition_ <= kMaxCondition)) {
    std::ostringstream msg;
    msg << "H_hat(t_f) is numerically singular (condition " << sol.condition_
        << "); the social optimum is not unique at this configuration";
    throw SingularSystemError(msg.str(), sol.condition_);
  }
  const VectorXd pushed = matrix_exponential(cfg.horizon * lambda) * cfg.x0;
  sol.terminal_ = sol.h_hat_.partialPivLu().solve(pushed);
  sol.terminal_costate_ = laplacian * sol.terminal_;
  sol.propagator_ =
      std::make_shared<ExponentialPropagator>(lambda, degrees(cfg.graph), cfg.horizon);

  Trajectory& traj = sol.trajectory_;
  traj.times = cfg.time_grid();
  traj.provenance = Provenance::kClosedForm;
  traj.opinions = costate_driven_states(cfg, lambda, {weight}, sol.terminal_costate_);
  traj.controls = MatrixXd(cfg.samples, n);
  for (int k = 0; k < cfg.samples; ++k) {
    traj.controls->row(k) = sol.controls(traj.times[k]).transpose();
  }
  sol.social_cost_ = evaluate_social_cost(cfg, traj);
  return sol;
}

VectorXd SocialSolution::controls(double t) const {
  check_time(t, cfg_.horizon);
  const VectorXd pulled = propagator_->apply_transpose(cfg_.horizon - t, terminal_costate_);
  return -(cfg_.b.cwiseQuotient(cfg_.r)).cwiseProduct(pulled);
}

ControlFunction SocialSolution::control_function() const {
  return [gain = VectorXd(cfg_.b.cwiseQuotient(cfg_.r)), horizon = cfg_.horizon,
          costate = terminal_costate_, propagator = propagator_](double t) -> VectorXd {
    check_time(t, horizon);
    return -gain.cwiseProduct(propagator->apply_transpose(horizon - t, costate));
  };
}

VectorXd SocialSolution::costate(double t) const {
  check_time(t, cfg_.horizon);
  return matrix_exponential((cfg_.horizon - t) * matrices_.dynamics.transpose()) *
         terminal_costate_;
}

VectorXd SocialSolution::state(double t) const {
  check_time(t, cfg_.horizon);
  return propagator_->exp(t) * cfg_.x0 -
         propagator_->gramian(social_input_weight(cfg_), t) *
             propagator_->apply_transpose(cfg_.horizon - t, terminal_costate_);
}

SocialGap social_vs_nash_gap(const GameConfig& cfg) {
  const SocialSolution social = solve_social(cfg);
  const NashSolution nash = solve(cfg);
  return {social.social_cost(), evaluate_social_cost(cfg, nash.trajectory())};
}

}  // namespace hkgame
