#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "hkgame/verification.hpp"

using namespace hkgame;
using Eigen::VectorXd;

TEST_CASE("K2 passes every check") {
  const auto nash = solve(testing::k2_config());
  CHECK(check_trajectory_oracle(nash).passed);
  for (const auto& r : check_pontryagin(nash).all()) {
    INFO(r.name << " residual " << r.max_residual);
    CHECK(r.passed);
  }
  const std::vector<int> agents{0, 1};
  const auto dev = check_nash_deviation(nash, agents, 8);
  CHECK(dev.decrease.passed);
  CHECK(dev.gradient.passed);

  const auto social = solve_social(testing::k2_config());
  CHECK(check_trajectory_oracle(social).passed);
  for (const auto& r : check_pontryagin(social).all()) CHECK(r.passed);
  CHECK(check_social_minimizer(social, 8).passed);
}

TEST_CASE("Zachary Nash equilibrium passes the oracle and necessary conditions") {
  const auto nash = solve(testing::zachary_config());
  const auto oracle = check_trajectory_oracle(nash);
  MESSAGE("Zachary oracle residual: " << oracle.max_residual);
  CHECK(oracle.passed);
  for (const auto& r : check_pontryagin(nash).all()) {
    INFO(r.name << " residual " << r.max_residual);
    CHECK(r.passed);
  }
  const std::vector<int> agents{0};
  const auto dev = check_nash_deviation(nash, agents, 4);
  CHECK(dev.decrease.passed);
  CHECK(dev.gradient.passed);
}

TEST_CASE("a tolerance below integration error fails and records details") {
  auto cfg = testing::k2_config(41);
  const auto nash = solve(cfg);
  const auto report = check_trajectory_oracle(nash, 1e-30);
  CHECK_FALSE(report.passed);
  CHECK(report.details.size() >= 1);
}

TEST_CASE("reports are deterministic") {
  const auto nash = solve(testing::k2_config(51));
  const std::vector<int> agents{0};
  const auto a = check_nash_deviation(nash, agents, 5, 1e-3, 7);
  const auto b = check_nash_deviation(nash, agents, 5, 1e-3, 7);
  CHECK(a.decrease.max_residual == b.decrease.max_residual);
  CHECK(a.gradient.max_residual == b.gradient.max_residual);
  CHECK(check_trajectory_oracle(nash).max_residual == check_trajectory_oracle(nash).max_residual);
}

TEST_CASE("integrator converges at fourth order") {
  const auto nash = solve(testing::k2_config(5));
  const double coarse = check_trajectory_oracle(nash, 1.0, 1).max_residual;
  const double fine = check_trajectory_oracle(nash, 1.0, 2).max_residual;
  MESSAGE("RK4 error ratio: " << coarse / fine);
  CHECK(coarse / fine >= 8.0);
}

TEST_CASE("perturbation basis") {
  std::vector<double> grid(201);
  for (int k = 0; k < 201; ++k) grid[k] = 0.05 * k;
  const auto knots = perturbation_knots(grid);
  CHECK(knots.front() == 0.0);
  CHECK(knots.back() == grid.back());
  CHECK(knots.size() == 21);

  const PiecewiseLinear f({0.0, 1.0, 3.0}, Eigen::Vector3d(0.0, 2.0, 0.0));
  CHECK(f(0.5) == doctest::Approx(1.0));
  CHECK(f(2.0) == doctest::Approx(1.0));
  CHECK(f(3.0) == doctest::Approx(0.0));
  // int of (2t)^2 over [0,1] plus (3 - t)^2 over [1,3].
  CHECK(f.squared_norm() == doctest::Approx(4.0 / 3.0 + 8.0 / 3.0));
}

TEST_CASE("locality probe") {
  const auto k2 = locality_probe(solve(testing::k2_config()), 0);
  CHECK(k2.non_local.empty());
  CHECK(k2.translation_sensitivity <= 1e-12);
  CHECK_FALSE(k2.report.asserted);

  const auto zach = locality_probe(testing::zachary_config(), 0);
  MESSAGE("agent 1 controls depend on " << zach.non_local.size() << " non-neighbours");
  CHECK(zach.translation_sensitivity <= 1e-10);
  for (int j : zach.non_local) CHECK_FALSE(zachary_karate_club().adjacent(0, j));

  CHECK(default_probe_agents(34) == std::vector<int>{0, 16, 33});
  CHECK(default_probe_agents(2) == std::vector<int>{0, 1});
}
