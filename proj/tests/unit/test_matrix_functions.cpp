#include <cmath>
#include <limits>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "fixtures.hpp"
#include "hkgame/matrix_functions.hpp"

using namespace hkgame;
using Eigen::MatrixXd;

namespace {

double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

bool mixed_close(const MatrixXd& a, const MatrixXd& b, double tol) {
  return ((a - b).cwiseAbs().array() <= tol * (1.0 + b.cwiseAbs().array())).all();
}

MatrixXd random_psd(int n, PortableRng& rng) {
  MatrixXd f(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f(i, j) = rng.uniform(-1.0, 1.0);
  return f * f.transpose() / n;
}

}  // namespace

TEST_CASE("matrix exponential: closed-form cases") {
  CHECK(matrix_exponential(MatrixXd::Zero(3, 3)) == MatrixXd::Identity(3, 3));

  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -2.0;
  const MatrixXd e = matrix_exponential(d);
  CHECK(e(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(e(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(std::abs(e(0, 1)) + std::abs(e(1, 0)) == 0.0);

  const MatrixXd k2 = dynamics_matrix(testing::k2());
  const MatrixXd ek = matrix_exponential(k2);
  const double em2 = std::exp(-2.0);
  CHECK(ek(0, 0) == doctest::Approx(0.5 * (1 + em2)).epsilon(1e-14));
  CHECK(ek(0, 1) == doctest::Approx(0.5 * (1 - em2)).epsilon(1e-14));
  CHECK(ek(0, 0) == doctest::Approx(0.5676676).epsilon(1e-7));
  CHECK(ek(1, 0) == doctest::Approx(0.4323324).epsilon(1e-7));
}

TEST_CASE("matrix exponential agrees with Eigen's implementation") {
  PortableRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 12);
    const double scale = std::pow(10.0, rng.uniform(-3.0, 1.2));
    MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = scale * rng.uniform(-1.0, 1.0);
    const MatrixXd ours = matrix_exponential(m);
    const MatrixXd theirs = m.exp();
    CHECK(max_abs(ours - theirs) <= 1e-12 * std::max(1.0, max_abs(theirs)));
  }
}

TEST_CASE("matrix exponential rejects bad input") {
  CHECK_THROWS_AS(matrix_exponential(MatrixXd::Zero(2, 3)), std::invalid_argument);
  MatrixXd m = MatrixXd::Zero(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(matrix_exponential(m), std::invalid_argument);
}

TEST_CASE("exponential of a zero-row-sum generator fixes the consensus vector") {
  PortableRng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = testing::random_connected_graph(8, rng);
    const MatrixXd e = matrix_exponential(7.5 * dynamics_matrix(g));
    CHECK(max_abs(e * Eigen::VectorXd::Ones(8) - Eigen::VectorXd::Ones(8)) <= 1e-12);
  }
}

TEST_CASE("gramian: trivial cases and errors") {
  const MatrixXd k2 = dynamics_matrix(testing::k2());
  const MatrixXd s = Eigen::Vector2d(1.0, 0.0).asDiagonal();
  CHECK(gramian_integral(k2, s, 0.0).value == MatrixXd::Zero(2, 2));
  CHECK(gramian_integral(k2, s, 0.0).method == GramianMethod::kBlockExponential);

  const auto flat = gramian_integral(MatrixXd::Zero(3, 3), MatrixXd::Identity(3, 3), 2.5);
  CHECK(max_abs(flat.value - 2.5 * MatrixXd::Identity(3, 3)) <= 1e-14);

  CHECK_THROWS_AS(gramian_integral(k2, s, -1.0), std::invalid_argument);
  MatrixXd skew = s;
  skew(0, 1) = 0.3;
  CHECK_THROWS_AS(gramian_integral(k2, skew, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gramian_integral(k2, MatrixXd::Identity(3, 3), 1.0), std::invalid_argument);
}

TEST_CASE("gramian: K2 value against quadrature and the analytic integral") {
  const MatrixXd k2 = dynamics_matrix(testing::k2());
  const MatrixXd s = Eigen::Vector2d(1.0, 0.0).asDiagonal();
  // Integrand entries: (1 + e^{-2s})^2 / 4, (1 - e^{-4s}) / 4, (1 - e^{-2s})^2 / 4.
  const double e2 = std::exp(-2.0), e4 = std::exp(-4.0);
  MatrixXd analytic(2, 2);
  analytic(0, 0) = 0.25 * (1.0 + (1.0 - e2) + 0.25 * (1.0 - e4));
  analytic(1, 1) = 0.25 * (1.0 - (1.0 - e2) + 0.25 * (1.0 - e4));
  analytic(0, 1) = analytic(1, 0) = 0.25 * (1.0 - 0.25 * (1.0 - e4));

  const auto quad = gramian_quadrature(k2, s, 1.0);
  CHECK(quad.method == GramianMethod::kQuadrature);
  CHECK(max_abs(quad.value - analytic) <= 1e-10);

  const auto block = gramian_integral(k2, s, 1.0);
  CHECK(max_abs(block.value - analytic) <= 1e-13);
  MatrixXd frozen(2, 2);
  frozen << 0.527522, 0.188645, 0.188645, 0.095189;
  CHECK(max_abs(block.value - frozen) <= 1e-5);
}

TEST_CASE("gramian: block method stays accurate at long horizons") {
  // At t = 10 the unscaled block exponential carries e^{20} growth.
  const MatrixXd k2 = dynamics_matrix(testing::k2());
  const MatrixXd s = Eigen::Vector2d(1.0, 0.0).asDiagonal();
  const double t = 10.0;
  const double e2 = std::exp(-2.0 * t), e4 = std::exp(-4.0 * t);
  const double g00 = 0.25 * (t + (1.0 - e2) + 0.25 * (1.0 - e4));
  const double g01 = 0.25 * (t - 0.25 * (1.0 - e4));
  const auto block = gramian_integral(k2, s, t);
  CHECK(block.value(0, 0) == doctest::Approx(g00).epsilon(1e-13));
  CHECK(block.value(0, 1) == doctest::Approx(g01).epsilon(1e-13));
}

TEST_CASE("gramian: block exponential vs adaptive quadrature on random instances") {
  PortableRng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 7);
    const auto g = testing::random_connected_graph(n, rng);
    const MatrixXd a = dynamics_matrix(g);
    const MatrixXd s = random_psd(n, rng);
    const double t = rng.uniform(0.0, 10.0);
    const auto block = gramian_integral(a, s, t).value;
    const auto quad = gramian_quadrature(a, s, t).value;
    CHECK(mixed_close(block, quad, 1e-8));
    CHECK(max_abs(block - block.transpose()) <= 1e-12 * std::max(1.0, max_abs(block)));
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(block);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12 * eig.eigenvalues().cwiseAbs().maxCoeff());
  }
}

TEST_CASE("gramian: derivative is the Lyapunov right-hand side") {
  PortableRng rng(9);
  const double h = 1e-4;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 6);
    const MatrixXd a = dynamics_matrix(testing::random_connected_graph(n, rng));
    const MatrixXd s = random_psd(n, rng);
    const double t = rng.uniform(0.5, 8.0);
    const MatrixXd g = gramian_integral(a, s, t).value;
    const MatrixXd fd =
        (gramian_integral(a, s, t + h).value - gramian_integral(a, s, t - h).value) / (2 * h);
    CHECK(max_abs(fd - (a * g + g * a.transpose() + s)) <= 1e-5);
  }
}

TEST_CASE("stacked psi") {
  const MatrixXd k2 = dynamics_matrix(testing::k2());
  const std::vector<MatrixXd> weights = {Eigen::Vector2d(1.0, 0.0).asDiagonal(),
                                         Eigen::Vector2d(0.0, 1.0).asDiagonal()};
  CHECK(stacked_psi(k2, weights, 0.0) == MatrixXd::Zero(2, 4));

  const MatrixXd psi = stacked_psi(k2, weights, 1.0);
  REQUIRE(psi.rows() == 2);
  REQUIRE(psi.cols() == 4);
  CHECK(psi.leftCols(2) == gramian_integral(k2, weights[0], 1.0).value);
  CHECK(psi.rightCols(2) == gramian_integral(k2, weights[1], 1.0).value);
  // Agent swap maps Psi_0 onto Psi_1 with both indices exchanged.
  const MatrixXd swap = (MatrixXd(2, 2) << 0, 1, 1, 0).finished();
  CHECK(max_abs(swap * psi.leftCols(2) * swap - psi.rightCols(2)) <= 1e-14);

  CHECK_THROWS_AS(stacked_psi(k2, std::span(weights.data(), 1), 1.0), std::invalid_argument);
}

TEST_CASE("gramian on a uniform grid matches direct evaluation") {
  const auto g = zachary_karate_club();
  const MatrixXd a = dynamics_matrix(g);
  MatrixXd s = MatrixXd::Zero(34, 34);
  s(5, 5) = 1.0;
  const auto series = gramian_on_grid(a, s, 0.05, 201);
  REQUIRE(series.size() == 201);
  CHECK(series[0] == MatrixXd::Zero(34, 34));
  for (int k : {1, 37, 100, 200}) {
    CHECK(max_abs(series[k] - gramian_integral(a, s, 0.05 * k).value) <= 1e-10);
  }
}

TEST_CASE("symmetrizable exponential matches the general path") {
  PortableRng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 10);
    const auto g = testing::random_connected_graph(n, rng);
    const MatrixXd a = dynamics_matrix(g);
    const auto fast = SymmetrizableExponential::create(a, degrees(g));
    REQUIRE(fast.has_value());
    const double t = rng.uniform(0.0, 10.0);
    CHECK(max_abs(fast->exp(t) - matrix_exponential(t * a)) <= 1e-12);
    const Eigen::VectorXd v = testing::random_vector(n, rng);
    CHECK(max_abs(fast->apply_transpose(t, v) - matrix_exponential(t * a.transpose()) * v) <=
          1e-12);
    const MatrixXd s = random_psd(n, rng);
    CHECK(max_abs(fast->gramian(s, t) - gramian_integral(a, s, t).value) <= 1e-10);
  }
  MatrixXd skewed(2, 2);
  skewed << 0.0, 1.0, -1.0, 0.0;
  CHECK_FALSE(SymmetrizableExponential::create(skewed, Eigen::Vector2d(1.0, 1.0)).has_value());
}
