#include <benchmark/benchmark.h>

#include "hkgame/dynamics.hpp"
#include "hkgame/matrix_functions.hpp"
#include "hkgame/nash.hpp"
#include "hkgame/random.hpp"
#include "hkgame/social.hpp"

namespace {

using namespace hkgame;

GameConfig zachary(double horizon = 10.0) {
  const auto g = zachary_karate_club();
  return GameConfig::uniform(g, horizon, 1.0, 1.0, two_cluster_opinions(g.size(), 2023));
}

void BM_MatrixExponential(benchmark::State& state) {
  const Eigen::MatrixXd lambda = dynamics_matrix(zachary_karate_club()) * double(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(matrix_exponential(lambda));
}
BENCHMARK(BM_MatrixExponential)->Arg(1)->Arg(10)->Arg(40);

void BM_GramianBlock(benchmark::State& state) {
  const Eigen::MatrixXd lambda = dynamics_matrix(zachary_karate_club());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(34, 34);
  s(0, 0) = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(gramian_integral(lambda, s, 10.0).value);
}
BENCHMARK(BM_GramianBlock);

void BM_GramianQuadrature(benchmark::State& state) {
  const Eigen::MatrixXd lambda = dynamics_matrix(zachary_karate_club());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(34, 34);
  s(0, 0) = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(gramian_quadrature(lambda, s, 10.0).value);
}
BENCHMARK(BM_GramianQuadrature)->Unit(benchmark::kMillisecond);

void BM_NashSolve(benchmark::State& state) {
  const auto cfg = zachary();
  for (auto _ : state) benchmark::DoNotOptimize(solve(cfg).terminal_state());
}
BENCHMARK(BM_NashSolve)->Unit(benchmark::kMillisecond);

void BM_SocialSolve(benchmark::State& state) {
  const auto cfg = zachary();
  for (auto _ : state) benchmark::DoNotOptimize(solve_social(cfg).terminal_state());
}
BENCHMARK(BM_SocialSolve)->Unit(benchmark::kMillisecond);

void BM_SimulateNashControls(benchmark::State& state) {
  const auto cfg = zachary();
  const auto sol = solve(cfg);
  const auto u = sol.control_function();
  for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg, u).final_state());
}
BENCHMARK(BM_SimulateNashControls)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
