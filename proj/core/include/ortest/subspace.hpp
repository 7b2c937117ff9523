#pragma once

#include "ortest/metric.hpp"

namespace ortest {

/// A linear subspace L of R^m.
///
/// Stored as an orthonormal (Euclidean) basis; the constraint form
/// {x : A x = 0} is derived on request. Either representation may be used to
/// build one.
class LinearSubspace {
 public:
  /// L = {x : A x = 0}; A is q x m and need not have full row rank.
  static LinearSubspace from_constraint(const Matrix& a);
  /// L = span of the columns of `basis` (m x d).
  static LinearSubspace from_basis(const Matrix& basis, Index ambient_dim = -1);
  static LinearSubspace zero(Index ambient_dim);
  static LinearSubspace whole(Index ambient_dim);
  /// span{1_m}.
  static LinearSubspace span_ones(Index ambient_dim);

  Index ambient_dim() const noexcept { return ambient_; }
  Index dim() const noexcept { return basis_.cols(); }
  /// m x d with orthonormal columns.
  const Matrix& basis() const noexcept { return basis_; }
  /// (m - d) x m matrix A with L = {x : A x = 0} and full row rank.
  Matrix constraint() const;

  bool contains(const Vector& x, double tol = 1e-10) const;

 private:
  LinearSubspace(Index ambient, Matrix basis) : ambient_(ambient), basis_(std::move(basis)) {}

  Index ambient_;
  Matrix basis_;
};

/// The metric projection of x onto L: argmin over y in L of ||x - y||_Sigma.
Vector project_subspace(const Vector& x, const LinearSubspace& sub, const Metric& metric);

/// Numerical rank with singular values below tol * max(1, sigma_max) dropped.
Index numerical_rank(const Matrix& a, double tol = 1e-10);

}  // namespace ortest
