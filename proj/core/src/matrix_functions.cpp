#include "hkgame/matrix_functions.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace hkgame {
namespace {

using Eigen::MatrixXd;

// Pade coefficients and 1-norm thresholds from Higham (2005), "The scaling
// and squaring method for the matrix exponential revisited".
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

double one_norm(const MatrixXd& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

template <std::size_t N>
MatrixXd pade_low_degree(const MatrixXd& a, const std::array<double, N>& c) {
  const auto n = a.rows();
  const MatrixXd ident = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  MatrixXd power = ident;
  MatrixXd u_even = MatrixXd::Zero(n, n);
  MatrixXd v = MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k + 1 < N; k += 2) {
    v += c[k] * power;
    u_even += c[k + 1] * power;
    power = power * a2;
  }
  const MatrixXd u = a * u_even;
  return (v - u).partialPivLu().solve(v + u);
}

MatrixXd pade13(const MatrixXd& a) {
  const auto& c = kPade13;
  const auto n = a.rows();
  const MatrixXd ident = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a4 * a2;
  const MatrixXd u_inner = a6 * (c[13] * a6 + c[11] * a4 + c[9] * a2) + c[7] * a6 + c[5] * a4 +
                           c[3] * a2 + c[1] * ident;
  const MatrixXd u = a * u_inner;
  const MatrixXd v = a6 * (c[12] * a6 + c[10] * a4 + c[8] * a2) + c[6] * a6 + c[4] * a4 +
                     c[2] * a2 + c[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

void require_square(const Eigen::Ref<const MatrixXd>& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + " must be square");
  }
}

void check_gramian_args(const Eigen::Ref<const MatrixXd>& a, const Eigen::Ref<const MatrixXd>& s,
                        double t) {
  require_square(a, "generator");
  require_square(s, "weight matrix");
  if (a.rows() != s.rows()) throw std::invalid_argument("generator and weight sizes differ");
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("gramian upper limit must be a finite nonnegative time");
  }
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("weight matrix must be symmetric");
  }
}

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Largest time step over which the block exponential stays well scaled; the
// growing e^{-tA} block is kept within e^{kBlockNorm}.
constexpr double kBlockNorm = 1.0;

// Returns {G(t), e^{tA}} from one block exponential.
std::pair<MatrixXd, MatrixXd> block_step(const MatrixXd& a, const MatrixXd& s, double t) {
  const auto n = a.rows();
  MatrixXd block = MatrixXd::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = -a * t;
  block.topRightCorner(n, n) = s * t;
  block.bottomRightCorner(n, n) = a.transpose() * t;
  const MatrixXd e = matrix_exponential(block);
  MatrixXd exp_at = e.bottomRightCorner(n, n).transpose();
  MatrixXd g = exp_at * e.topRightCorner(n, n);
  return {symmetrized(g), std::move(exp_at)};
}

MatrixXd gramian_integrand(const MatrixXd& a, const MatrixXd& s, double tau) {
  const MatrixXd e = matrix_exponential(tau * a);
  return e * s * e.transpose();
}

struct SimpsonPanel {
  double lo, hi;
  MatrixXd f_lo, f_mid, f_hi, whole;
};

MatrixXd adaptive_simpson(const MatrixXd& a, const MatrixXd& s, const SimpsonPanel& p,
                          double tol, int depth) {
  const double mid = 0.5 * (p.lo + p.hi);
  const double left_mid = 0.5 * (p.lo + mid);
  const double right_mid = 0.5 * (mid + p.hi);
  const MatrixXd f_lm = gramian_integrand(a, s, left_mid);
  const MatrixXd f_rm = gramian_integrand(a, s, right_mid);
  const double h = p.hi - p.lo;
  MatrixXd left = (h / 12.0) * (p.f_lo + 4.0 * f_lm + p.f_mid);
  MatrixXd right = (h / 12.0) * (p.f_mid + 4.0 * f_rm + p.f_hi);
  const MatrixXd diff = left + right - p.whole;
  if (depth <= 0 || diff.cwiseAbs().maxCoeff() <= 15.0 * tol) {
    return left + right + diff / 15.0;
  }
  return adaptive_simpson(a, s, {p.lo, mid, p.f_lo, f_lm, p.f_mid, std::move(left)}, 0.5 * tol,
                          depth - 1) +
         adaptive_simpson(a, s, {mid, p.hi, p.f_mid, f_rm, p.f_hi, std::move(right)}, 0.5 * tol,
                          depth - 1);
}

}  // namespace

Eigen::MatrixXd matrix_exponential(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  require_square(m, "matrix_exponential input");
  if (!m.allFinite()) throw std::invalid_argument("matrix_exponential input is not finite");
  const MatrixXd a = m;
  const double norm = one_norm(a);
  if (norm <= kTheta3) return pade_low_degree(a, kPade3);
  if (norm <= kTheta5) return pade_low_degree(a, kPade5);
  if (norm <= kTheta7) return pade_low_degree(a, kPade7);
  if (norm <= kTheta9) return pade_low_degree(a, kPade9);
  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
  MatrixXd r = pade13(std::ldexp(1.0, -squarings) * a);
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

GramianResult gramian_integral(const Eigen::Ref<const Eigen::MatrixXd>& a,
                               const Eigen::Ref<const Eigen::MatrixXd>& s, double t) {
  check_gramian_args(a, s, t);
  const auto n = a.rows();
  if (t == 0.0) return {MatrixXd::Zero(n, n), GramianMethod::kBlockExponential, t};
  const MatrixXd am = a;
  const MatrixXd sm = s;
  // Evaluate on t / 2^k, then double: G(2u) = e^{uA} G(u) e^{uA^T} + G(u).
  const double norm = std::max(one_norm(am), 1e-300);
  const int doublings = std::max(0, static_cast<int>(std::ceil(std::log2(norm * t / kBlockNorm))));
  auto [g, e] = block_step(am, sm, std::ldexp(t, -doublings));
  for (int k = 0; k < doublings; ++k) {
    g = symmetrized(e * g * e.transpose() + g);
    e = e * e;
  }
  return {std::move(g), GramianMethod::kBlockExponential, t};
}

GramianResult gramian_quadrature(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                 const Eigen::Ref<const Eigen::MatrixXd>& s, double t,
                                 double abs_tol) {
  check_gramian_args(a, s, t);
  const auto n = a.rows();
  MatrixXd total = MatrixXd::Zero(n, n);
  if (t == 0.0) return {total, GramianMethod::kQuadrature, t};
  const MatrixXd am = a;
  const MatrixXd sm = s;
  const int panels = std::max(4, static_cast<int>(std::ceil(t)));
  const double width = t / panels;
  for (int k = 0; k < panels; ++k) {
    const double lo = k * width;
    const double hi = (k + 1 == panels) ? t : lo + width;
    MatrixXd f_lo = gramian_integrand(am, sm, lo);
    MatrixXd f_mid = gramian_integrand(am, sm, 0.5 * (lo + hi));
    MatrixXd f_hi = gramian_integrand(am, sm, hi);
    MatrixXd whole = ((hi - lo) / 6.0) * (f_lo + 4.0 * f_mid + f_hi);
    total += adaptive_simpson(am, sm, {lo, hi, f_lo, f_mid, f_hi, std::move(whole)},
                              abs_tol / panels, 40);
  }
  return {symmetrized(total), GramianMethod::kQuadrature, t};
}

Eigen::MatrixXd stacked_psi(const Eigen::Ref<const Eigen::MatrixXd>& a,
                            std::span<const Eigen::MatrixXd> s_list, double t) {
  require_square(a, "generator");
  const auto n = a.rows();
  if (static_cast<Eigen::Index>(s_list.size()) != n) {
    throw std::invalid_argument("stacked_psi needs one weight matrix per agent");
  }
  MatrixXd out(n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (s_list[i].rows() != n || s_list[i].cols() != n) {
      throw std::invalid_argument("weight matrix " + std::to_string(i) + " has the wrong size");
    }
    out.middleCols(i * n, n) = gramian_integral(a, s_list[i], t).value;
  }
  return out;
}

std::vector<Eigen::MatrixXd> gramian_on_grid(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                             const Eigen::Ref<const Eigen::MatrixXd>& s,
                                             double step, int count) {
  if (count < 1) throw std::invalid_argument("gramian_on_grid needs at least one point");
  check_gramian_args(a, s, step);
  const auto n = a.rows();
  std::vector<MatrixXd> out;
  out.reserve(count);
  out.push_back(MatrixXd::Zero(n, n));
  if (count == 1) return out;
  const MatrixXd g_step = gramian_integral(a, s, step).value;
  const MatrixXd e_step = matrix_exponential(step * a);
  out.push_back(g_step);
  for (int k = 2; k < count; ++k) {
    out.push_back(symmetrized(e_step * out.back() * e_step.transpose() + g_step));
  }
  return out;
}

double exponential_integral(double a, double t) {
  if (a == 0.0) return t;
  return std::expm1(a * t) / a;
}

std::optional<SymmetrizableExponential> SymmetrizableExponential::create(
    const Eigen::MatrixXd& m, const Eigen::VectorXd& weights, double tol) {
  if (m.rows() != m.cols() || weights.size() != m.rows()) return std::nullopt;
  if (!m.allFinite() || (weights.array() <= 0.0).any()) return std::nullopt;
  const Eigen::VectorXd root = weights.cwiseSqrt();
  const MatrixXd t = root.asDiagonal() * m * root.cwiseInverse().asDiagonal();
  const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  if ((t - t.transpose()).cwiseAbs().maxCoeff() > tol * scale) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(symmetrized(t));
  if (eig.info() != Eigen::Success) return std::nullopt;
  const MatrixXd& q = eig.eigenvectors();
  MatrixXd p = root.cwiseInverse().asDiagonal() * q;
  MatrixXd p_inv = q.transpose() * root.asDiagonal();
  return SymmetrizableExponential(eig.eigenvalues(), std::move(p), std::move(p_inv));
}

Eigen::MatrixXd SymmetrizableExponential::exp(double t) const {
  return p_ * (t * mu_).array().exp().matrix().asDiagonal() * p_inv_;
}

Eigen::VectorXd SymmetrizableExponential::apply(double t, const Eigen::VectorXd& v) const {
  return p_ * ((t * mu_).array().exp() * (p_inv_ * v).array()).matrix();
}

Eigen::VectorXd SymmetrizableExponential::apply_transpose(double t,
                                                          const Eigen::VectorXd& v) const {
  return p_inv_.transpose() * ((t * mu_).array().exp() * (p_.transpose() * v).array()).matrix();
}

Eigen::MatrixXd SymmetrizableExponential::gramian(const Eigen::MatrixXd& s, double t) const {
  const auto n = mu_.size();
  MatrixXd inner = p_inv_ * s * p_inv_.transpose();
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index m = 0; m < n; ++m) inner(m, k) *= exponential_integral(mu_(m) + mu_(k), t);
  }
  return symmetrized(p_ * inner * p_.transpose());
}

}  // namespace hkgame
