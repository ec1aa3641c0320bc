#include "hkgame/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hkgame/errors.hpp"
#include "hkgame/matrix_functions.hpp"

namespace hkgame {
namespace {

void require_controls(const Trajectory& traj) {
  if (!traj.controls) throw std::invalid_argument("trajectory carries no control samples");
  if (traj.times.size() < 3) {
    throw std::invalid_argument("cost quadrature needs at least 3 grid points");
  }
}

double effort(const GameConfig& cfg, const Trajectory& traj, int i) {
  const auto w = simpson_weights(static_cast<int>(traj.times.size()),
                                 traj.times.back() - traj.times.front());
  const Eigen::VectorXd u = traj.controls->col(i);
  return cfg.r(i) * w.dot(u.cwiseAbs2());
}

}  // namespace

GameConfig GameConfig::uniform(SocialGraph graph, double horizon, double r, double b,
                               Eigen::VectorXd x0, int samples) {
  const int n = graph.size();
  return GameConfig{std::move(graph), horizon, Eigen::VectorXd::Constant(n, r),
                    Eigen::VectorXd::Constant(n, b), std::move(x0), samples};
}

void GameConfig::validate() const {
  const int n = agents();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("horizon t_f must be a positive finite time");
  }
  if (r.size() != n) throw ConfigError("r must have one entry per agent");
  if (b.size() != n) throw ConfigError("b must have one entry per agent");
  if (x0.size() != n) throw ConfigError("x0 must have one entry per agent");
  for (int i = 0; i < n; ++i) {
    if (!(r(i) > 0.0) || !std::isfinite(r(i))) {
      throw ConfigError("r[" + std::to_string(i) + "] must be positive");
    }
    if (b(i) == 0.0 || !std::isfinite(b(i))) {
      throw ConfigError("b[" + std::to_string(i) + "] must be nonzero");
    }
  }
  if (!x0.allFinite()) throw ConfigError("x0 must be finite");
  if (samples < 2) throw ConfigError("samples must be at least 2");
}

std::vector<double> GameConfig::time_grid() const {
  std::vector<double> t(samples);
  for (int k = 0; k < samples; ++k) t[k] = horizon * k / (samples - 1);
  t.back() = horizon;
  return t;
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kClosedForm:
      return "closed-form";
    case Provenance::kIntegrated:
      return "integrated";
    case Provenance::kDiscrete:
      return "discrete";
  }
  return "unknown";
}

double spread(const Eigen::VectorXd& x) { return x.maxCoeff() - x.minCoeff(); }

Eigen::VectorXd discrete_hk_step(const SocialGraph& g, const Eigen::VectorXd& x) {
  if (x.size() != g.size()) throw std::invalid_argument("opinion vector has the wrong length");
  Eigen::VectorXd y(g.size());
  for (int i = 0; i < g.size(); ++i) {
    double sum = 0.0;
    for (int j : g.neighbors(i)) sum += x(j);
    y(i) = sum / g.degree(i);
  }
  return y;
}

Trajectory simulate(const GameConfig& cfg, const ControlFunction& u, int oversampling) {
  cfg.validate();
  if (oversampling < 1) throw std::invalid_argument("oversampling must be at least 1");
  const int n = cfg.agents();
  const Eigen::MatrixXd lambda = dynamics_matrix(cfg.graph);
  const Eigen::VectorXd& b = cfg.b;

  auto control = [&](double t) {
    Eigen::VectorXd v = u(t);
    if (v.size() != n) throw std::invalid_argument("control function returned wrong length");
    if (!v.allFinite()) throw Error("control is not finite at t = " + std::to_string(t));
    return v;
  };
  auto rhs = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& uv) -> Eigen::VectorXd {
    return lambda * x + b.cwiseProduct(uv);
  };

  Trajectory traj;
  traj.times = cfg.time_grid();
  traj.provenance = Provenance::kIntegrated;
  traj.opinions.resize(cfg.samples, n);
  traj.controls = Eigen::MatrixXd(cfg.samples, n);

  Eigen::VectorXd x = cfg.x0;
  traj.opinions.row(0) = x.transpose();
  traj.controls->row(0) = control(0.0).transpose();
  for (int k = 0; k + 1 < cfg.samples; ++k) {
    const double t0 = traj.times[k];
    const double h = (traj.times[k + 1] - t0) / oversampling;
    for (int s = 0; s < oversampling; ++s) {
      const double t = t0 + s * h;
      const Eigen::VectorXd u_mid = control(t + 0.5 * h);
      const Eigen::VectorXd k1 = rhs(x, control(t));
      const Eigen::VectorXd k2 = rhs(x + 0.5 * h * k1, u_mid);
      const Eigen::VectorXd k3 = rhs(x + 0.5 * h * k2, u_mid);
      const Eigen::VectorXd k4 =
          rhs(x + h * k3, control(s + 1 == oversampling ? traj.times[k + 1] : t + h));
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!x.allFinite()) {
      throw Error("state diverged before t = " + std::to_string(traj.times[k + 1]));
    }
    traj.opinions.row(k + 1) = x.transpose();
    traj.controls->row(k + 1) = control(traj.times[k + 1]).transpose();
  }
  return traj;
}

Trajectory uncontrolled_closed_form(const GameConfig& cfg) {
  cfg.validate();
  const int n = cfg.agents();
  const Eigen::MatrixXd lambda = dynamics_matrix(cfg.graph);
  Trajectory traj;
  traj.times = cfg.time_grid();
  traj.provenance = Provenance::kClosedForm;
  traj.opinions.resize(cfg.samples, n);
  for (int k = 0; k < cfg.samples; ++k) {
    traj.opinions.row(k) = (matrix_exponential(traj.times[k] * lambda) * cfg.x0).transpose();
  }
  traj.controls = Eigen::MatrixXd::Zero(cfg.samples, n);
  return traj;
}

double evaluate_individual_cost(const GameConfig& cfg, int i, const Trajectory& traj) {
  if (i < 0 || i >= cfg.agents()) throw std::out_of_range("agent index out of range");
  require_controls(traj);
  const Eigen::VectorXd xf = traj.final_state();
  double disagreement = 0.0;
  for (int j : cfg.graph.neighbors(i)) disagreement += (xf(i) - xf(j)) * (xf(i) - xf(j));
  return disagreement / cfg.graph.degree(i) + effort(cfg, traj, i);
}

double evaluate_social_cost(const GameConfig& cfg, const Trajectory& traj) {
  require_controls(traj);
  const Eigen::VectorXd xf = traj.final_state();
  double total = xf.dot(global_laplacian(cfg.graph) * xf);
  for (int i = 0; i < cfg.agents(); ++i) total += effort(cfg, traj, i);
  return total;
}

Eigen::VectorXd simpson_weights(int points, double length) {
  if (points < 3) throw std::invalid_argument("Simpson quadrature needs at least 3 points");
  const int intervals = points - 1;
  const double h = length / intervals;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(points);
  const int simpson_intervals = intervals % 2 == 0 ? intervals : intervals - 3;
  for (int k = 0; k < simpson_intervals; k += 2) {
    w(k) += h / 3.0;
    w(k + 1) += 4.0 * h / 3.0;
    w(k + 2) += h / 3.0;
  }
  if (simpson_intervals != intervals) {
    const int k = simpson_intervals;
    w(k) += 3.0 * h / 8.0;
    w(k + 1) += 9.0 * h / 8.0;
    w(k + 2) += 9.0 * h / 8.0;
    w(k + 3) += 3.0 * h / 8.0;
  }
  return w;
}

}  // namespace hkgame
