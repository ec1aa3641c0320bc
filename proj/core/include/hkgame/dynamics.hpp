#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hkgame/graph.hpp"

namespace hkgame {

inline constexpr int kDefaultSamples = 201;
inline constexpr int kDefaultOversampling = 10;

/// Everything that defines one game instance on a graph.
struct GameConfig {
  SocialGraph graph;
  double horizon = 10.0;
  Eigen::VectorXd r;   // control weights, r_i > 0
  Eigen::VectorXd b;   // input gains, b_i != 0
  Eigen::VectorXd x0;  // initial opinions
  int samples = kDefaultSamples;

  /// Config with r and b broadcast from scalars.
  static GameConfig uniform(SocialGraph graph, double horizon, double r, double b,
                            Eigen::VectorXd x0, int samples = kDefaultSamples);

  int agents() const { return graph.size(); }
  /// Throws ConfigError if any invariant fails.
  void validate() const;
  /// Uniform sampling grid over [0, horizon].
  std::vector<double> time_grid() const;
};

enum class Provenance { kClosedForm, kIntegrated, kDiscrete };

const char* to_string(Provenance p);

/// Sampled opinions (and optionally controls). Row k of `opinions` is x(times[k]).
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd opinions;
  std::optional<Eigen::MatrixXd> controls;
  Provenance provenance = Provenance::kIntegrated;

  Eigen::VectorXd initial_state() const { return opinions.row(0).transpose(); }
  Eigen::VectorXd final_state() const { return opinions.bottomRows(1).transpose(); }
};

/// Control profile u(t) for the whole population.
using ControlFunction = std::function<Eigen::VectorXd(double)>;

/// max - min of a opinion vector.
double spread(const Eigen::VectorXd& x);

/// One step of the discrete HK update: each agent adopts the mean opinion of
/// its neighbors (itself excluded).
Eigen::VectorXd discrete_hk_step(const SocialGraph& g, const Eigen::VectorXd& x);

/// Integrates xdot = Lambda x + B u(t) with classical RK4 at `oversampling`
/// steps per sampling interval. The control is sampled at the output grid
/// and stored in the trajectory.
Trajectory simulate(const GameConfig& cfg, const ControlFunction& u,
                    int oversampling = kDefaultOversampling);

/// x(t) = e^{t Lambda} x0 on the sampling grid; controls are zero.
Trajectory uncontrolled_closed_form(const GameConfig& cfg);

/// J_i = (1/|N_i|) sum_{j in N_i} (x_i(t_f) - x_j(t_f))^2 + int r_i u_i^2 dt,
/// the integral by composite Simpson on the trajectory grid.
double evaluate_individual_cost(const GameConfig& cfg, int i, const Trajectory& traj);

/// J = x(t_f)^T L x(t_f) + int u^T R u dt with L the global Laplacian.
double evaluate_social_cost(const GameConfig& cfg, const Trajectory& traj);

/// Composite Simpson weights for a uniform grid of `points` nodes over
/// [0, length]; an even node count closes with a 3/8 panel.
Eigen::VectorXd simpson_weights(int points, double length);

}  // namespace hkgame
