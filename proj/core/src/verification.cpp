#include "hkgame/verification.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hkgame/matrix_functions.hpp"
#include "hkgame/random.hpp"

namespace hkgame {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<int> interior_indices(int samples, int points) {
  std::vector<int> out;
  if (samples < 3 || points < 1) return out;
  const int count = std::min(points, samples - 2);
  for (int k = 0; k < count; ++k) {
    const int idx = count == 1 ? samples / 2
                               : 1 + static_cast<int>(std::lround(static_cast<double>(k) *
                                                                  (samples - 3) / (count - 1)));
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

VerificationReport trajectory_oracle(const GameConfig& cfg, const Trajectory& closed,
                                     const ControlFunction& u, double tolerance,
                                     int oversampling) {
  VerificationReport report("trajectory_oracle", tolerance);
  const Trajectory integrated = simulate(cfg, u, oversampling);
  const MatrixXd diff = (integrated.opinions - closed.opinions).cwiseAbs();
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  const double worst = diff.maxCoeff(&row, &col);
  report.record({static_cast<int>(col), integrated.times[row], 0, worst});
  return report;
}

// Central difference of a vector-valued function of time.
template <typename F>
VectorXd central_difference(const F& f, double t) {
  return (f(t + kDerivativeStep) - f(t - kDerivativeStep)) / (2.0 * kDerivativeStep);
}

// Knot-value vector of a random direction, scaled to unit L2 norm.
VectorXd random_knot_values(PortableRng& rng, const std::vector<double>& knots) {
  VectorXd v(static_cast<Eigen::Index>(knots.size()));
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = rng.uniform(-1.0, 1.0);
  return v / std::sqrt(PiecewiseLinear(knots, v).squared_norm());
}

ControlFunction perturbed(const ControlFunction& base, int agent, const PiecewiseLinear& delta,
                          double scale) {
  return [base, agent, delta, scale](double t) {
    VectorXd u = base(t);
    u(agent) += scale * delta(t);
    return u;
  };
}

double agent_cost(const GameConfig& cfg, int agent, const ControlFunction& u) {
  return evaluate_individual_cost(cfg, agent, simulate(cfg, u));
}

}  // namespace

VerificationReport::VerificationReport(std::string name, double tolerance, bool asserted)
    : name(std::move(name)), tolerance(tolerance), asserted(asserted) {}

void VerificationReport::record(const CheckDetail& detail) {
  details.push_back(detail);
  max_residual = std::max(max_residual, detail.residual);
  passed = max_residual <= tolerance;
}

VerificationReport check_trajectory_oracle(const NashSolution& sol, double tolerance,
                                           int oversampling) {
  return trajectory_oracle(sol.config(), sol.trajectory(), sol.control_function(), tolerance,
                           oversampling);
}

VerificationReport check_trajectory_oracle(const SocialSolution& sol, double tolerance,
                                           int oversampling) {
  return trajectory_oracle(sol.config(), sol.trajectory(), sol.control_function(), tolerance,
                           oversampling);
}

PontryaginReports check_pontryagin(const NashSolution& sol, int points) {
  PontryaginReports out;
  const auto& cfg = sol.config();
  const auto& lambda = sol.matrices().dynamics;
  const auto& times = sol.trajectory().times;
  const auto indices = interior_indices(cfg.samples, points);
  const VectorXd x_final = sol.trajectory().final_state();

  for (int i = 0; i < cfg.agents(); ++i) {
    const auto lam = [&](double t) { return costate(sol, i, t); };
    for (int idx : indices) {
      const double t = times[idx];
      const VectorXd l = lam(t);
      const double u = sol.policies()[i](t);
      out.stationarity.record({i, t, 0, std::abs(u + cfg.b(i) * l(i) / cfg.r(i))});
      const VectorXd ode = central_difference(lam, t) + lambda.transpose() * l;
      out.costate_ode.record({i, t, 0, ode.cwiseAbs().maxCoeff()});
    }
    const VectorXd expected = sol.matrices().agent_laplacians[i] * x_final / cfg.graph.degree(i);
    out.terminal.record(
        {i, cfg.horizon, 0, (costate(sol, i, cfg.horizon) - expected).cwiseAbs().maxCoeff()});
  }
  const auto x = [&](double t) { return sol.state(t); };
  for (int idx : indices) {
    const double t = times[idx];
    const VectorXd rhs = lambda * sol.state(t) + cfg.b.cwiseProduct(sol.controls(t));
    out.state_ode.record({-1, t, 0, (central_difference(x, t) - rhs).cwiseAbs().maxCoeff()});
  }
  return out;
}

PontryaginReports check_pontryagin(const SocialSolution& sol, int points) {
  PontryaginReports out;
  const auto& cfg = sol.config();
  const auto& lambda = sol.matrices().dynamics;
  const auto& times = sol.trajectory().times;
  const auto indices = interior_indices(cfg.samples, points);
  const auto lam = [&](double t) { return sol.costate(t); };
  const auto x = [&](double t) { return sol.state(t); };
  const VectorXd gain = cfg.b.cwiseQuotient(cfg.r);
  for (int idx : indices) {
    const double t = times[idx];
    const VectorXd l = lam(t);
    const VectorXd u = sol.controls(t);
    out.stationarity.record({-1, t, 0, (u + gain.cwiseProduct(l)).cwiseAbs().maxCoeff()});
    const VectorXd ode = central_difference(lam, t) + lambda.transpose() * l;
    out.costate_ode.record({-1, t, 0, ode.cwiseAbs().maxCoeff()});
    const VectorXd rhs = lambda * sol.state(t) + cfg.b.cwiseProduct(u);
    out.state_ode.record({-1, t, 0, (central_difference(x, t) - rhs).cwiseAbs().maxCoeff()});
  }
  const VectorXd expected = sol.matrices().global_laplacian * sol.trajectory().final_state();
  out.terminal.record(
      {-1, cfg.horizon, 0, (sol.costate(cfg.horizon) - expected).cwiseAbs().maxCoeff()});
  return out;
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> knots, VectorXd values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() < 2 || static_cast<Eigen::Index>(knots_.size()) != values_.size()) {
    throw std::invalid_argument("piecewise-linear function needs matching knots and values");
  }
}

double PiecewiseLinear::operator()(double t) const {
  if (t <= knots_.front()) return values_(0);
  if (t >= knots_.back()) return values_(values_.size() - 1);
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const auto k = static_cast<Eigen::Index>(it - knots_.begin()) - 1;
  const double w = (t - knots_[k]) / (knots_[k + 1] - knots_[k]);
  return (1.0 - w) * values_(k) + w * values_(k + 1);
}

double PiecewiseLinear::squared_norm() const {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
    const double a = values_(k);
    const double b = values_(k + 1);
    total += (knots_[k + 1] - knots_[k]) * (a * a + a * b + b * b) / 3.0;
  }
  return total;
}

std::vector<double> perturbation_knots(const std::vector<double>& grid, int pieces) {
  const int intervals = static_cast<int>(grid.size()) - 1;
  if (intervals < 1) throw std::invalid_argument("grid needs at least two points");
  const int stride = 2 * std::max(1, intervals / (2 * std::max(1, pieces)));
  std::vector<double> knots;
  for (int k = 0; k < intervals; k += stride) knots.push_back(grid[k]);
  knots.push_back(grid.back());
  return knots;
}

DeviationReports check_nash_deviation(const NashSolution& sol, std::span<const int> agents,
                                       int directions, double epsilon, std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  DeviationReports out;
  const auto& cfg = sol.config();
  const ControlFunction base = sol.control_function();
  const auto knots = perturbation_knots(cfg.time_grid());
  const auto knot_count = static_cast<Eigen::Index>(knots.size());

  for (int agent : agents) {
    if (agent < 0 || agent >= cfg.agents()) throw std::out_of_range("probe agent out of range");
    const double j_base = agent_cost(cfg, agent, base);
    // Directions depend only on (seed, agent, direction index).
    PortableRng rng(seed * 1000003ULL + static_cast<std::uint64_t>(agent));
    for (int d = 0; d < directions; ++d) {
      const PiecewiseLinear delta(knots, random_knot_values(rng, knots));
      const double j_pert = agent_cost(cfg, agent, perturbed(base, agent, delta, epsilon));
      const double decrease = (j_base - j_pert) / (1.0 + j_base);
      out.decrease.record({agent, std::numeric_limits<double>::quiet_NaN(), seed,
                           std::max(0.0, decrease)});
    }
    VectorXd gradient(knot_count);
    for (Eigen::Index k = 0; k < knot_count; ++k) {
      const PiecewiseLinear hat(knots, VectorXd::Unit(knot_count, k));
      const double up = agent_cost(cfg, agent, perturbed(base, agent, hat, epsilon));
      const double down = agent_cost(cfg, agent, perturbed(base, agent, hat, -epsilon));
      gradient(k) = (up - down) / (2.0 * epsilon);
    }
    out.gradient.record({agent, std::numeric_limits<double>::quiet_NaN(), seed, gradient.norm()});
  }
  return out;
}

VerificationReport check_social_minimizer(const SocialSolution& sol, int directions,
                                          double epsilon, std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  VerificationReport report("social_minimizer", 1e-8);
  const auto& cfg = sol.config();
  const int n = cfg.agents();
  const ControlFunction base = sol.control_function();
  const auto knots = perturbation_knots(cfg.time_grid());
  const double j_base = evaluate_social_cost(cfg, simulate(cfg, base));
  PortableRng rng(seed);
  for (int d = 0; d < directions; ++d) {
    std::vector<PiecewiseLinear> delta;
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      VectorXd v(static_cast<Eigen::Index>(knots.size()));
      for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = rng.uniform(-1.0, 1.0);
      delta.emplace_back(knots, v);
      norm2 += delta.back().squared_norm();
    }
    const double scale = epsilon / std::sqrt(norm2);
    const ControlFunction u = [base, delta, scale](double t) {
      VectorXd out = base(t);
      for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += scale * delta[i](t);
      return out;
    };
    const double j_pert = evaluate_social_cost(cfg, simulate(cfg, u));
    report.record({-1, std::numeric_limits<double>::quiet_NaN(), seed,
                   std::max(0.0, (j_base - j_pert) / (1.0 + j_base))});
  }
  return report;
}

LocalityProbe locality_probe(const NashSolution& sol, int i) {
  const auto& cfg = sol.config();
  if (i < 0 || i >= cfg.agents()) throw std::out_of_range("agent index out of range");
  const int n = cfg.agents();
  const auto& lambda = sol.matrices().dynamics;
  // x(t_f) = M x0 with M = H^{-1} e^{t_f Lambda}
  const MatrixXd m = sol.H().partialPivLu().solve(matrix_exponential(cfg.horizon * lambda));
  const MatrixXd li_m = sol.matrices().agent_laplacians[i] * m;
  const double gain = -cfg.b(i) / (cfg.r(i) * cfg.graph.degree(i));

  LocalityProbe probe;
  probe.agent = i;
  probe.sensitivities = VectorXd::Zero(n);
  for (double t : cfg.time_grid()) {
    // row i of e^{(t_f - t) Lambda^T} is column i of e^{(t_f - t) Lambda}
    const VectorXd column = matrix_exponential((cfg.horizon - t) * lambda).col(i);
    const VectorXd row = gain * (li_m.transpose() * column);
    probe.sensitivities = probe.sensitivities.cwiseMax(row.cwiseAbs());
    probe.translation_sensitivity = std::max(probe.translation_sensitivity, std::abs(row.sum()));
  }
  for (int j = 0; j < n; ++j) {
    if (j == i || cfg.graph.adjacent(i, j)) continue;
    if (probe.sensitivities(j) > probe.threshold) probe.non_local.push_back(j);
    probe.report.record({j, std::numeric_limits<double>::quiet_NaN(), 0, probe.sensitivities(j)});
  }
  return probe;
}

LocalityProbe locality_probe(const GameConfig& cfg, int i) { return locality_probe(solve(cfg), i); }

std::vector<int> default_probe_agents(int n) {
  std::vector<int> agents = {0, std::max(0, n / 2 - 1), n - 1};
  std::sort(agents.begin(), agents.end());
  agents.erase(std::unique(agents.begin(), agents.end()), agents.end());
  return agents;
}

}  // namespace hkgame
