#include "ortest/metric.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <string>

#include "ortest/error.hpp"

namespace ortest {
namespace {

double condition_estimate(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

Metric::Metric(Matrix sigma) : sigma_(std::move(sigma)) {
  if (sigma_.rows() == 0 || sigma_.rows() != sigma_.cols()) {
    throw ContractError("covariance must be a non-empty square matrix, got " +
                        std::to_string(sigma_.rows()) + "x" + std::to_string(sigma_.cols()));
  }
  if (!sigma_.allFinite()) throw NumericError("covariance has non-finite entries");

  const double scale = std::max(1.0, sigma_.cwiseAbs().maxCoeff());
  const double asym = (sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    throw NumericError("covariance is not symmetric (max |S - S'| = " + std::to_string(asym) + ")");
  }
  sigma_ = 0.5 * (sigma_ + sigma_.transpose());

  llt_.compute(sigma_);
  if (llt_.info() != Eigen::Success) {
    const double cond = condition_estimate(sigma_);
    throw NumericError("covariance is not positive definite (condition estimate " +
                           std::to_string(cond) + ")",
                       cond);
  }
  lower_ = llt_.matrixL();
  if ((lower_.diagonal().array() <= 0.0).any()) {
    throw NumericError("covariance factorization produced a non-positive pivot",
                       condition_estimate(sigma_));
  }
}

Metric Metric::identity(Index dim) {
  require(dim > 0, "metric dimension must be positive");
  return Metric(Matrix::Identity(dim, dim));
}

Metric Metric::interclass(double rho) {
  require(std::abs(rho) < 1.0, "interclass correlation must satisfy |rho| < 1");
  Matrix s(2, 2);
  s << 1.0, rho, rho, 1.0;
  return Metric(std::move(s));
}

Metric Metric::from_weights(const Vector& weights) {
  require(weights.size() > 0, "weights must be non-empty");
  require((weights.array() > 0.0).all(), "weights must be positive");
  return Metric(Matrix(weights.cwiseInverse().asDiagonal()));
}

Vector Metric::solve(const Vector& b) const {
  require(b.size() == dim(), "dimension mismatch in Metric::solve");
  return llt_.solve(b);
}

Matrix Metric::solve(const Matrix& b) const {
  require(b.rows() == dim(), "dimension mismatch in Metric::solve");
  return llt_.solve(b);
}

Vector Metric::whiten(const Vector& u) const {
  require(u.size() == dim(), "dimension mismatch in Metric::whiten");
  return llt_.matrixL().solve(u);
}

double Metric::inner(const Vector& u, const Vector& v) const {
  require(u.size() == dim() && v.size() == dim(), "dimension mismatch in inner product");
  return whiten(u).dot(whiten(v));
}

double Metric::norm_sq(const Vector& u) const { return whiten(u).squaredNorm(); }

double Metric::norm(const Vector& u) const { return std::sqrt(norm_sq(u)); }

double inner(const Vector& u, const Vector& v, const Metric& metric) { return metric.inner(u, v); }

}  // namespace ortest
