#include "hkgame/nash.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hkgame/errors.hpp"

namespace hkgame {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double condition_number(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (!(smallest > 0.0)) return std::numeric_limits<double>::infinity();
  return sv(0) / smallest;
}

void check_time(double t, double horizon) {
  if (!(t >= 0.0 && t <= horizon)) {
    std::ostringstream msg;
    msg << "time " << t << " outside the horizon [0, " << horizon << "]";
    throw std::out_of_range(msg.str());
  }
}

BoundaryMatrix boundary(const GameConfig& cfg, const GraphMatrices& m) {
  const int n = cfg.agents();
  MatrixXd h = MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    const MatrixXd psi = gramian_integral(m.dynamics, agent_input_weight(cfg, i), cfg.horizon).value;
    h += psi * m.agent_laplacians[i] / cfg.graph.degree(i);
  }
  const double cond = condition_number(h);
  if (!(cond <= kMaxCondition)) {
    std::ostringstream msg;
    msg << "H(t_f) is numerically singular (condition " << cond
        << "); no unique open-loop Nash equilibrium at this configuration";
    throw SingularSystemError(msg.str(), cond);
  }
  return {std::move(h), cond};
}

}  // namespace

ExponentialPropagator::ExponentialPropagator(const MatrixXd& lambda, const VectorXd& degrees,
                                             double horizon)
    : lambda_(lambda), eigenbasis_(SymmetrizableExponential::create(lambda, degrees)) {
  if (eigenbasis_) {
    const MatrixXd reference = matrix_exponential(horizon * lambda_);
    const double gap = (eigenbasis_->exp(horizon) - reference).cwiseAbs().maxCoeff();
    if (!(gap <= 1e-10)) eigenbasis_.reset();
  }
}

MatrixXd ExponentialPropagator::exp(double s) const {
  return eigenbasis_ ? eigenbasis_->exp(s) : matrix_exponential(s * lambda_);
}

VectorXd ExponentialPropagator::apply_transpose(double s, const VectorXd& v) const {
  if (eigenbasis_) return eigenbasis_->apply_transpose(s, v);
  return matrix_exponential(s * lambda_.transpose()) * v;
}

MatrixXd ExponentialPropagator::gramian(const MatrixXd& weight, double t) const {
  if (eigenbasis_) return eigenbasis_->gramian(weight, t);
  return gramian_integral(lambda_, weight, t).value;
}

OpenLoopPolicy::OpenLoopPolicy(int agent, double horizon, double gain, VectorXd v,
                               std::shared_ptr<const ExponentialPropagator> propagator)
    : agent_(agent),
      horizon_(horizon),
      gain_(gain),
      v_(std::move(v)),
      propagator_(std::move(propagator)) {
  if (propagator_->spectral()) {
    const auto& basis = *propagator_->eigenbasis();
    // (e^{s Lambda^T} v)_i = sum_m Pinv(m, i) e^{s mu_m} (P^T v)_m
    modal_ = basis.inverse_modes().col(agent_).cwiseProduct(basis.modes().transpose() * v_);
  }
}

double OpenLoopPolicy::operator()(double t) const {
  check_time(t, horizon_);
  const double s = horizon_ - t;
  if (modal_.size() > 0) {
    const auto& mu = propagator_->eigenbasis()->eigenvalues();
    return gain_ * modal_.dot((s * mu).array().exp().matrix());
  }
  return gain_ * propagator_->apply_transpose(s, v_)(agent_);
}

Eigen::MatrixXd build_delta(const SocialGraph& g) {
  const int n = g.size();
  MatrixXd delta(n * n, n);
  for (int i = 0; i < n; ++i) delta.middleRows(i * n, n) = agent_laplacian(g, i) / g.degree(i);
  return delta;
}

BoundaryMatrix build_H(const GameConfig& cfg) {
  cfg.validate();
  return boundary(cfg, build_graph_matrices(cfg.graph));
}

Eigen::MatrixXd agent_input_weight(const GameConfig& cfg, int i) {
  if (i < 0 || i >= cfg.agents()) throw std::out_of_range("agent index out of range");
  MatrixXd s = MatrixXd::Zero(cfg.agents(), cfg.agents());
  s(i, i) = cfg.b(i) * cfg.b(i) / cfg.r(i);
  return s;
}

Eigen::MatrixXd costate_driven_states(const GameConfig& cfg, const MatrixXd& lambda,
                                      const std::vector<MatrixXd>& weights,
                                      const MatrixXd& terminal_costates) {
  const int n = cfg.agents();
  const int samples = cfg.samples;
  if (static_cast<Eigen::Index>(weights.size()) != terminal_costates.cols()) {
    throw std::invalid_argument("need one terminal costate per weight matrix");
  }
  const auto times = cfg.time_grid();
  MatrixXd states(samples, n);
  std::vector<MatrixXd> pulled;  // e^{(t_f - t_k) Lambda^T} C
  pulled.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    states.row(k) = (matrix_exponential(times[k] * lambda) * cfg.x0).transpose();
    pulled.push_back(matrix_exponential((cfg.horizon - times[k]) * lambda.transpose()) *
                     terminal_costates);
  }
  const double step = cfg.horizon / (samples - 1);
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const auto psi = gramian_on_grid(lambda, weights[j], step, samples);
    for (int k = 0; k < samples; ++k) {
      states.row(k) -= (psi[k] * pulled[k].col(static_cast<Eigen::Index>(j))).transpose();
    }
  }
  return states;
}

NashSolution solve(const GameConfig& cfg) {
  cfg.validate();
  NashSolution sol(cfg);
  const int n = cfg.agents();
  sol.matrices_ = build_graph_matrices(cfg.graph);
  const MatrixXd& lambda = sol.matrices_.dynamics;

  auto [h, cond] = boundary(cfg, sol.matrices_);
  sol.h_ = std::move(h);
  sol.condition_ = cond;
  const VectorXd pushed = matrix_exponential(cfg.horizon * lambda) * cfg.x0;
  sol.terminal_ = sol.h_.partialPivLu().solve(pushed);

  sol.propagator_ =
      std::make_shared<ExponentialPropagator>(lambda, degrees(cfg.graph), cfg.horizon);
  sol.coupling_.resize(n, n);
  std::vector<MatrixXd> weights;
  weights.reserve(n);
  sol.policies_.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double deg = cfg.graph.degree(i);
    VectorXd v = sol.matrices_.agent_laplacians[i] * sol.terminal_;
    sol.coupling_.col(i) = v / deg;
    weights.push_back(agent_input_weight(cfg, i));
    sol.policies_.emplace_back(i, cfg.horizon, -cfg.b(i) / (cfg.r(i) * deg), std::move(v),
                               sol.propagator_);
  }

  if (sol.propagator_->spectral()) {
    auto modal = std::make_shared<MatrixXd>(n, n);
    for (const auto& p : sol.policies_) modal->row(p.agent()) = p.gain() * p.modal().transpose();
    sol.modal_controls_ = std::move(modal);
  }

  Trajectory& traj = sol.trajectory_;
  traj.times = cfg.time_grid();
  traj.provenance = Provenance::kClosedForm;
  traj.opinions = costate_driven_states(cfg, lambda, weights, sol.coupling_);
  traj.controls = MatrixXd(cfg.samples, n);
  for (int k = 0; k < cfg.samples; ++k) traj.controls->row(k) = sol.controls(traj.times[k]);

  sol.costs_.reserve(n);
  for (int i = 0; i < n; ++i) sol.costs_.push_back(evaluate_individual_cost(cfg, i, traj));
  return sol;
}

VectorXd NashSolution::controls(double t) const { return control_function()(t); }

ControlFunction NashSolution::control_function() const {
  if (modal_controls_) {
    return [modal = modal_controls_, propagator = propagator_, horizon = cfg_.horizon](double t) {
      check_time(t, horizon);
      const auto& mu = propagator->eigenbasis()->eigenvalues();
      return VectorXd(*modal * ((horizon - t) * mu).array().exp().matrix());
    };
  }
  return [policies = policies_](double t) {
    VectorXd u(static_cast<Eigen::Index>(policies.size()));
    for (const auto& p : policies) u(p.agent()) = p(t);
    return u;
  };
}

VectorXd NashSolution::state(double t) const {
  check_time(t, cfg_.horizon);
  VectorXd x = propagator_->exp(t) * cfg_.x0;
  for (int i = 0; i < cfg_.agents(); ++i) {
    x -= propagator_->gramian(agent_input_weight(cfg_, i), t) *
         propagator_->apply_transpose(cfg_.horizon - t, coupling_.col(i));
  }
  return x;
}

VectorXd costate(const NashSolution& sol, int i, double t) {
  const auto& cfg = sol.config();
  if (i < 0 || i >= cfg.agents()) throw std::out_of_range("agent index out of range");
  check_time(t, cfg.horizon);
  const VectorXd terminal =
      sol.matrices().agent_laplacians[i] * sol.terminal_state() / cfg.graph.degree(i);
  return matrix_exponential((cfg.horizon - t) * sol.matrices().dynamics.transpose()) * terminal;
}

}  // namespace hkgame
