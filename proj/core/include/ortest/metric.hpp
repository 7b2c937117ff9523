#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace ortest {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative asymmetry allowed in a covariance matrix.
inline constexpr double kSymmetryTolerance = 1e-10;

/// An SPD covariance Sigma together with its Cholesky factor. Defines the
/// inner product <u, v> = u' Sigma^{-1} v and the matching norm.
///
/// Construction fails with NumericError when Sigma is asymmetric, non-finite
/// or not positive definite; nothing is regularized.
class Metric {
 public:
  explicit Metric(Matrix sigma);

  static Metric identity(Index dim);
  /// [[1, rho], [rho, 1]].
  static Metric interclass(double rho);
  /// diag(1 / w): the metric under which weighted least squares with weights
  /// w is the Euclidean one.
  static Metric from_weights(const Vector& weights);

  Index dim() const noexcept { return sigma_.rows(); }
  const Matrix& sigma() const noexcept { return sigma_; }
  /// Lower-triangular L with Sigma = L L'.
  const Matrix& lower() const noexcept { return lower_; }

  /// Sigma^{-1} b through the cached factor.
  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;
  /// L^{-1} u; its squared Euclidean length is the squared Sigma-norm of u.
  Vector whiten(const Vector& u) const;

  double inner(const Vector& u, const Vector& v) const;
  double norm_sq(const Vector& u) const;
  double norm(const Vector& u) const;

 private:
  Matrix sigma_;
  Eigen::LLT<Matrix> llt_;
  Matrix lower_;
};

/// u' Sigma^{-1} v. Throws ContractError on a dimension mismatch.
double inner(const Vector& u, const Vector& v, const Metric& metric);

}  // namespace ortest
