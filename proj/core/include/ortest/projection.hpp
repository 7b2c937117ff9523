#pragma once

#include <cstdint>
#include <vector>

#include "ortest/cone.hpp"
#include "ortest/metric.hpp"
#include "ortest/subspace.hpp"

namespace ortest {

/// Threshold below which a coordinate or constraint value counts as zero,
/// scaled by (1 + |x|_inf).
inline constexpr double kBoundaryTolerance = 1e-10;

struct ProjectionOptions {
  /// Largest constraint count solved by exact active-set enumeration.
  Index exact_limit = 16;
  /// Use Dykstra's algorithm above exact_limit instead of failing.
  bool iterative_fallback = false;
  /// Always use Dykstra's algorithm (testing and very large p).
  bool force_iterative = false;
  int max_sweeps = 10000;
  /// Convergence threshold for Dykstra and feasibility slack for KKT checks.
  double tolerance = 1e-10;
};

enum class ProjectionMethod { active_set, dykstra };

struct ConeProjection {
  Vector point;
  /// KKT multipliers, one per constraint row; point = x + Sigma R' multipliers.
  Vector multipliers;
  std::vector<bool> active;
  ProjectionMethod method = ProjectionMethod::active_set;
  /// A singular active-set system was pseudo-solved.
  bool rank_deficient = false;
  bool converged = true;
  int sweeps = 0;
  /// max of primal infeasibility, dual infeasibility and complementary slackness.
  double kkt_residual = 0.0;
};

/// Sigma-metric projection onto {theta : R theta >= 0}.
///
/// For p <= exact_limit every one of the 2^p active sets is a candidate; the
/// equality-constrained minimizer of each is checked against the KKT
/// conditions and the first feasible one is returned (the projection is
/// unique). The sign pattern of R x is tried first since it is usually right.
/// Above the limit Dykstra's cyclic half-space projections are used when
/// enabled.
class ConeProjector {
 public:
  ConeProjector(ConeSpec cone, Metric metric, ProjectionOptions options = {});

  ConeProjection project(const Vector& x) const;
  Vector operator()(const Vector& x) const { return project(x).point; }

  const ConeSpec& cone() const noexcept { return cone_; }
  const Metric& metric() const noexcept { return metric_; }
  /// R Sigma R'.
  const Matrix& psi() const noexcept { return psi_; }

 private:
  struct ActiveSet {
    std::vector<Index> rows;
    Matrix psi_inverse;  // (R_A Sigma R_A')^{-1}, or a pseudo-inverse
    bool rank_deficient = false;
  };

  ActiveSet make_active_set(std::uint32_t mask) const;
  ConeProjection solve_active_set(const Vector& x) const;
  ConeProjection solve_dykstra(const Vector& x) const;
  void finish(const Vector& x, ConeProjection& out) const;

  ConeSpec cone_;
  Metric metric_;
  ProjectionOptions options_;
  Matrix sigma_rt_;  // Sigma R', m x p
  Matrix psi_;       // R Sigma R', p x p
  std::vector<ActiveSet> cache_;
};

Vector project_cone(const Vector& x, const ConeSpec& cone, const Metric& metric,
                    const ProjectionOptions& options = {});

/// x - project_cone(x); by Moreau's decomposition the projection onto the
/// polar cone.
Vector polar_complement(const Vector& x, const ConeSpec& cone, const Metric& metric,
                        const ProjectionOptions& options = {});

/// Projection onto C intersected with the Sigma-orthogonal complement of L,
/// computed as P(x|C) - P(x|L). Valid whenever L is a subspace of C.
Vector project_cone_orthogonal(const Vector& x, const LinearSubspace& sub, const ConeSpec& cone,
                               const Metric& metric, const ProjectionOptions& options = {});

/// True iff every component of theta' R' (R Sigma R')^{-1} is <= 1e-10, i.e.
/// R theta lies in the polar of the positive orthant under R Sigma R'.
/// Throws NumericError (with a condition estimate) when R Sigma R' is singular.
bool in_polar_orthant(const Vector& theta, const Matrix& restriction, const Metric& metric);

/// Number of coordinates of x above the boundary tolerance.
int face_dimension(const Vector& x);

/// Membership of s in the DT acceptance region at critical value c and sample
/// size n. Type A: squared distance from s to (C cap L^perp)^polar below c/n;
/// Type B: squared distance from s to C below c/n. Balls are open.
bool acceptance_member(const Vector& s, const Problem& problem, double c, long n,
                       const Metric& metric);

}  // namespace ortest
