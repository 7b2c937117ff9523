#include "ortest/projection.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "ortest/error.hpp"

namespace ortest {
namespace {

// Active-set solve operators are cached for all masks up to this many rows.
constexpr Index kCacheLimit = 6;

}  // namespace

ConeProjector::ConeProjector(ConeSpec cone, Metric metric, ProjectionOptions options)
    : cone_(std::move(cone)), metric_(std::move(metric)), options_(options) {
  require(cone_.ambient_dim() == metric_.dim(), "cone and metric dimensions differ");
  const Matrix& r = cone_.restriction();
  sigma_rt_ = metric_.sigma() * r.transpose();
  psi_ = r * sigma_rt_;
  psi_ = 0.5 * (psi_ + psi_.transpose());

  const Index p = r.rows();
  if (!options_.force_iterative && p > options_.exact_limit && !options_.iterative_fallback) {
    throw CapabilityError("cone has " + std::to_string(p) +
                          " constraints; exact projection supports at most " +
                          std::to_string(options_.exact_limit) +
                          " (enable the iterative fallback for more)");
  }
  if (p <= kCacheLimit && !options_.force_iterative) {
    cache_.reserve(std::size_t{1} << p);
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << p); ++mask) {
      cache_.push_back(make_active_set(mask));
    }
  }
}

ConeProjector::ActiveSet ConeProjector::make_active_set(std::uint32_t mask) const {
  ActiveSet set;
  const Index p = psi_.rows();
  for (Index i = 0; i < p; ++i) {
    if (mask & (std::uint32_t{1} << i)) set.rows.push_back(i);
  }
  const Index k = static_cast<Index>(set.rows.size());
  Matrix sub(k, k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) sub(a, b) = psi_(set.rows[a], set.rows[b]);
  }
  if (k == 0) {
    set.psi_inverse = sub;
    return set;
  }
  Eigen::LLT<Matrix> llt(sub);
  const bool pivots_ok =
      llt.info() == Eigen::Success &&
      Matrix(llt.matrixL()).diagonal().minCoeff() >
          1e-7 * std::sqrt(std::max(1.0, sub.diagonal().maxCoeff()));
  if (pivots_ok) {
    set.psi_inverse = llt.solve(Matrix::Identity(k, k));
  } else {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sub);
    set.psi_inverse = cod.pseudoInverse();
    set.rank_deficient = true;
  }
  return set;
}

ConeProjection ConeProjector::project(const Vector& x) const {
  require(x.size() == metric_.dim(), "dimension mismatch in cone projection");
  if (options_.force_iterative || cone_.constraint_count() > options_.exact_limit) {
    return solve_dykstra(x);
  }
  return solve_active_set(x);
}

ConeProjection ConeProjector::solve_active_set(const Vector& x) const {
  const Matrix& r = cone_.restriction();
  const Index p = r.rows();
  const Vector w = r * x;
  const double slack = options_.tolerance * (1.0 + w.cwiseAbs().maxCoeff());

  std::uint32_t guess = 0;
  for (Index i = 0; i < p; ++i) {
    if (w(i) < 0.0) guess |= std::uint32_t{1} << i;
  }

  const std::uint32_t count = std::uint32_t{1} << p;
  double best_violation = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  Vector best_lambda;
  bool best_deficient = false;

  Vector lambda;
  for (std::uint32_t step = 0; step < count; ++step) {
    // Visit the sign-pattern guess first, then everything else.
    std::uint32_t mask = step == 0 ? guess : (step == guess ? 0 : step);
    ActiveSet local;
    const ActiveSet* set;
    if (!cache_.empty()) {
      set = &cache_[mask];
    } else {
      local = make_active_set(mask);
      set = &local;
    }
    const Index k = static_cast<Index>(set->rows.size());
    Vector w_active(k);
    for (Index a = 0; a < k; ++a) w_active(a) = w(set->rows[a]);
    lambda = -(set->psi_inverse * w_active);

    double violation = 0.0;
    for (Index a = 0; a < k; ++a) violation = std::max(violation, -lambda(a));
    // Constraint values at the candidate: eta = w + Psi[:, A] lambda_A.
    for (Index i = 0; i < p; ++i) {
      if (mask & (std::uint32_t{1} << i)) continue;
      double eta = w(i);
      for (Index a = 0; a < k; ++a) eta += psi_(i, set->rows[a]) * lambda(a);
      violation = std::max(violation, -eta);
    }
    if (violation < best_violation) {
      best_violation = violation;
      best_mask = mask;
      best_lambda = lambda;
      best_deficient = set->rank_deficient;
    }
    if (violation <= slack) break;
  }

  ConeProjection out;
  out.method = ProjectionMethod::active_set;
  out.multipliers = Vector::Zero(p);
  out.active.assign(static_cast<std::size_t>(p), false);
  out.rank_deficient = best_deficient;
  Index a = 0;
  for (Index i = 0; i < p; ++i) {
    if (best_mask & (std::uint32_t{1} << i)) {
      out.multipliers(i) = best_lambda(a++);
      out.active[static_cast<std::size_t>(i)] = true;
    }
  }
  out.point = x + sigma_rt_ * out.multipliers;
  finish(x, out);
  return out;
}

ConeProjection ConeProjector::solve_dykstra(const Vector& x) const {
  const Matrix& r = cone_.restriction();
  const Index p = r.rows();
  ConeProjection out;
  out.method = ProjectionMethod::dykstra;
  out.multipliers = Vector::Zero(p);
  out.point = x;
  out.converged = false;

  const double scale = 1.0 + metric_.norm(x);
  Vector previous;
  for (int sweep = 1; sweep <= options_.max_sweeps; ++sweep) {
    previous = out.point;
    for (Index i = 0; i < p; ++i) {
      // Undo this half-space's previous correction, then re-project.
      Vector y = out.point - out.multipliers(i) * sigma_rt_.col(i);
      const double value = r.row(i).dot(y);
      const double step = value < 0.0 ? -value / psi_(i, i) : 0.0;
      out.point = y + step * sigma_rt_.col(i);
      out.multipliers(i) = step;
    }
    out.sweeps = sweep;
    if (metric_.norm(out.point - previous) <= options_.tolerance * scale) {
      out.converged = true;
      break;
    }
  }
  out.active.assign(static_cast<std::size_t>(p), false);
  for (Index i = 0; i < p; ++i) out.active[static_cast<std::size_t>(i)] = out.multipliers(i) > 0.0;
  finish(x, out);
  return out;
}

void ConeProjector::finish(const Vector& /*x*/, ConeProjection& out) const {
  const Vector eta = cone_.restriction() * out.point;
  double residual = 0.0;
  for (Index i = 0; i < eta.size(); ++i) {
    residual = std::max(residual, -eta(i));
    residual = std::max(residual, -out.multipliers(i));
    residual = std::max(residual, std::abs(out.multipliers(i) * eta(i)));
  }
  out.kkt_residual = residual;
}

Vector project_cone(const Vector& x, const ConeSpec& cone, const Metric& metric,
                    const ProjectionOptions& options) {
  return ConeProjector(cone, metric, options).project(x).point;
}

Vector polar_complement(const Vector& x, const ConeSpec& cone, const Metric& metric,
                        const ProjectionOptions& options) {
  return x - project_cone(x, cone, metric, options);
}

Vector project_cone_orthogonal(const Vector& x, const LinearSubspace& sub, const ConeSpec& cone,
                               const Metric& metric, const ProjectionOptions& options) {
  check_nested(sub, cone);
  return project_cone(x, cone, metric, options) - project_subspace(x, sub, metric);
}

bool in_polar_orthant(const Vector& theta, const Matrix& restriction, const Metric& metric) {
  require(restriction.cols() == metric.dim() && theta.size() == metric.dim(),
          "dimension mismatch in in_polar_orthant");
  const Matrix psi = restriction * metric.sigma() * restriction.transpose();
  Eigen::JacobiSVD<Matrix> svd(psi);
  const auto& s = svd.singularValues();
  const double cond = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1)
                                            : std::numeric_limits<double>::infinity();
  Eigen::LLT<Matrix> llt(psi);
  if (llt.info() != Eigen::Success || !(cond < 1e14)) {
    throw NumericError("R Sigma R' is singular (condition estimate " + std::to_string(cond) + ")",
                       cond);
  }
  const Vector v = llt.solve(restriction * theta);
  return (v.array() <= kBoundaryTolerance).all();
}

int face_dimension(const Vector& x) {
  if (x.size() == 0) return 0;
  const double cut = kBoundaryTolerance * (1.0 + x.cwiseAbs().maxCoeff());
  return static_cast<int>((x.array() > cut).count());
}

bool acceptance_member(const Vector& s, const Problem& problem, double c, long n,
                       const Metric& metric) {
  require(c >= 0.0, "critical value must be nonnegative");
  require(n >= 1, "sample size must be positive");
  const double radius_sq = c / static_cast<double>(n);
  const double dist_sq = std::visit(
      [&](const auto& kind) {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, TypeA>) {
          // Distance to the polar of K = C cap L^perp is the norm of P(s|K).
          return metric.norm_sq(project_cone_orthogonal(s, kind.sub, kind.cone, metric));
        } else {
          return metric.norm_sq(polar_complement(s, kind.cone, metric));
        }
      },
      problem);
  return dist_sq < radius_sq;
}

}  // namespace ortest
