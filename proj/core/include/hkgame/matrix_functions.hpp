#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hkgame {

/// e^M by scaling and squaring with a diagonal Pade approximant (degree 3..13
/// chosen from the 1-norm). Throws std::invalid_argument for non-square or
/// non-finite input.
Eigen::MatrixXd matrix_exponential(const Eigen::Ref<const Eigen::MatrixXd>& m);

enum class GramianMethod { kBlockExponential, kQuadrature };

/// G(t) = int_0^t e^{s A} S e^{s A^T} ds together with how it was obtained.
struct GramianResult {
  Eigen::MatrixXd value;
  GramianMethod method;
  double t;
};

/// Block-exponential evaluation: exponentiate [[-A, S], [0, A^T]] t and combine
/// the blocks. Throws std::invalid_argument on negative t, dimension mismatch
/// or non-symmetric S.
GramianResult gramian_integral(const Eigen::Ref<const Eigen::MatrixXd>& a,
                               const Eigen::Ref<const Eigen::MatrixXd>& s, double t);

/// Adaptive Simpson evaluation of the same integral; slow, used as an oracle.
GramianResult gramian_quadrature(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                 const Eigen::Ref<const Eigen::MatrixXd>& s, double t,
                                 double abs_tol = 1e-10);

/// [G_1(t) ... G_n(t)] for the list of weight matrices S_1..S_n.
Eigen::MatrixXd stacked_psi(const Eigen::Ref<const Eigen::MatrixXd>& a,
                            std::span<const Eigen::MatrixXd> s_list, double t);

/// G(t_k) on a uniform grid t_k = k * step, k = 0..count-1, using the
/// semigroup recurrence G(t + h) = e^{hA} G(t) e^{hA^T} + G(h).
std::vector<Eigen::MatrixXd> gramian_on_grid(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                             const Eigen::Ref<const Eigen::MatrixXd>& s,
                                             double step, int count);

/// Exponentials of a matrix that is similar to a symmetric one through a
/// positive diagonal scaling, M = W^{-1/2} T W^{1/2} with T = T^T. The HK
/// dynamics matrix D^{-1}A - I is of this form with W = D.
///
/// e^{tM} = P diag(e^{t mu}) P^{-1} with P = W^{-1/2} Q, where T = Q diag(mu) Q^T.
class SymmetrizableExponential {
 public:
  /// Returns nullopt when W^{1/2} M W^{-1/2} is not symmetric to `tol`
  /// (relative to its largest entry) or a weight is not positive.
  static std::optional<SymmetrizableExponential> create(const Eigen::MatrixXd& m,
                                                        const Eigen::VectorXd& weights,
                                                        double tol = 1e-12);

  int size() const { return static_cast<int>(mu_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return mu_; }
  /// P and P^{-1} of the factorization above.
  const Eigen::MatrixXd& modes() const { return p_; }
  const Eigen::MatrixXd& inverse_modes() const { return p_inv_; }

  Eigen::MatrixXd exp(double t) const;
  Eigen::VectorXd apply(double t, const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply_transpose(double t, const Eigen::VectorXd& v) const;
  /// int_0^t e^{sM} S e^{sM^T} ds in closed form over the eigenbasis.
  Eigen::MatrixXd gramian(const Eigen::MatrixXd& s, double t) const;

 private:
  SymmetrizableExponential(Eigen::VectorXd mu, Eigen::MatrixXd p, Eigen::MatrixXd p_inv)
      : mu_(std::move(mu)), p_(std::move(p)), p_inv_(std::move(p_inv)) {}

  Eigen::VectorXd mu_;
  Eigen::MatrixXd p_;
  Eigen::MatrixXd p_inv_;
};

/// int_0^t e^{a s} ds, accurate for a near zero.
double exponential_integral(double a, double t);

}  // namespace hkgame
