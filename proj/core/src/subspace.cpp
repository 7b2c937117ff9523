#include "ortest/subspace.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>

#include "ortest/error.hpp"

namespace ortest {

Index numerical_rank(const Matrix& a, double tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  const double cut = tol * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) ++rank;
  }
  return rank;
}

LinearSubspace LinearSubspace::from_constraint(const Matrix& a) {
  const Index m = a.cols();
  require(m > 0, "constraint matrix must have at least one column");
  if (a.rows() == 0) return whole(m);
  require(a.allFinite(), "constraint matrix has non-finite entries");

  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Index rank = numerical_rank(a);
  return LinearSubspace(m, svd.matrixV().rightCols(m - rank));
}

LinearSubspace LinearSubspace::from_basis(const Matrix& basis, Index ambient_dim) {
  const Index m = basis.rows() > 0 ? basis.rows() : ambient_dim;
  require(m > 0, "subspace basis needs a known ambient dimension");
  require(ambient_dim < 0 || ambient_dim == m, "basis rows disagree with ambient dimension");
  if (basis.cols() == 0) return zero(m);
  require(basis.allFinite(), "basis has non-finite entries");

  Eigen::JacobiSVD<Matrix> svd(basis, Eigen::ComputeThinU);
  const Index rank = numerical_rank(basis);
  return LinearSubspace(m, svd.matrixU().leftCols(rank));
}

LinearSubspace LinearSubspace::zero(Index ambient_dim) {
  require(ambient_dim > 0, "ambient dimension must be positive");
  return LinearSubspace(ambient_dim, Matrix(ambient_dim, 0));
}

LinearSubspace LinearSubspace::whole(Index ambient_dim) {
  require(ambient_dim > 0, "ambient dimension must be positive");
  return LinearSubspace(ambient_dim, Matrix::Identity(ambient_dim, ambient_dim));
}

LinearSubspace LinearSubspace::span_ones(Index ambient_dim) {
  require(ambient_dim > 0, "ambient dimension must be positive");
  return LinearSubspace(ambient_dim,
                        Matrix::Constant(ambient_dim, 1, 1.0 / std::sqrt(double(ambient_dim))));
}

Matrix LinearSubspace::constraint() const {
  const Index d = dim();
  if (d == 0) return Matrix::Identity(ambient_, ambient_);
  if (d == ambient_) return Matrix(0, ambient_);
  Eigen::JacobiSVD<Matrix> svd(basis_, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(ambient_ - d).transpose();
}

bool LinearSubspace::contains(const Vector& x, double tol) const {
  require(x.size() == ambient_, "dimension mismatch in LinearSubspace::contains");
  const Vector residual = x - basis_ * (basis_.transpose() * x);
  return residual.norm() <= tol * (1.0 + x.norm());
}

Vector project_subspace(const Vector& x, const LinearSubspace& sub, const Metric& metric) {
  require(x.size() == sub.ambient_dim() && x.size() == metric.dim(),
          "dimension mismatch in project_subspace");
  const Index d = sub.dim();
  if (d == 0) return Vector::Zero(x.size());
  if (d == sub.ambient_dim()) return x;

  // Normal equations in the Sigma metric: (B' S^-1 B) c = B' S^-1 x.
  const Matrix& b = sub.basis();
  const Matrix sinv_b = metric.solve(b);
  const Matrix gram = b.transpose() * sinv_b;
  const Vector coef = gram.llt().solve(sinv_b.transpose() * x);
  return b * coef;
}

}  // namespace ortest
