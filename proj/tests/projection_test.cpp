#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ortest/error.hpp"
#include "ortest/projection.hpp"

using namespace ortest;

namespace {

struct Instance {
  Matrix sigma;
  Matrix r;
  Vector x;
};

Instance random_instance(std::mt19937_64& gen, Index max_p = 5) {
  std::uniform_int_distribution<int> dim(1, int(max_p));
  const Index p = dim(gen);
  std::uniform_int_distribution<int> extra(0, 2);
  const Index m = p + extra(gen);
  return {oracle::random_spd(m, gen), oracle::random_restriction(p, m, gen), oracle::random_vector(m, gen)};
}

}  // namespace

TEST(Projection, OrthantIdentityClipsNegatives) {
  Vector x(3);
  x << 1, -2, 0.5;
  const Vector p = project_cone(x, ConeSpec::orthant(3), Metric::identity(3));
  Vector expect(3);
  expect << 1, 0, 0.5;
  EXPECT_NEAR((p - expect).norm(), 0.0, 1e-14);
}

TEST(Projection, CorrelatedQuadrantLeavesPolar) {
  // Under rho = 0.9, (-3, -2) is outside the polar of the quadrant even though
  // both coordinates are negative; under the identity it is inside.
  Vector x(2);
  x << -3, -2;
  const Metric m = Metric::interclass(0.9);
  const Vector p = project_cone(x, ConeSpec::orthant(2), m);
  EXPECT_FALSE(in_polar_orthant(x, Matrix::Identity(2, 2), m));
  EXPECT_NEAR(p(0), 0.0, 1e-12);
  EXPECT_GT(p(1), 0.0);
  EXPECT_NEAR(m.inner(x - p, p), 0.0, 1e-10);
  EXPECT_TRUE(in_polar_orthant(x, Matrix::Identity(2, 2), Metric::identity(2)));
  EXPECT_NEAR(project_cone(x, ConeSpec::orthant(2), Metric::identity(2)).norm(), 0.0, 1e-15);
}

TEST(Projection, CorrelatedQuadrantOnAnEdge) {
  // rho = 0.9, x = (1, -1): the optimum lies on the edge theta_2 = 0 at
  // theta_1 = x_1 - rho x_2 = 1.9.
  Vector x(2);
  x << 1, -1;
  const Vector p = project_cone(x, ConeSpec::orthant(2), Metric::interclass(0.9));
  EXPECT_NEAR(p(0), 1.9, 1e-12);
  EXPECT_NEAR(p(1), 0.0, 1e-12);
}

TEST(Projection, MatchesFaceEnumerationOracle) {
  std::mt19937_64 gen(2024);
  for (int rep = 0; rep < 300; ++rep) {
    const Instance in = random_instance(gen, 3);
    const Vector ours = project_cone(in.x, ConeSpec::polyhedral(in.r), Metric(in.sigma));
    const Vector ref = oracle::project_by_faces(in.x, in.r, in.sigma);
    EXPECT_NEAR((ours - ref).norm(), 0.0, 1e-8 * (1 + in.x.norm())) << "rep " << rep;
  }
}

TEST(Projection, NoFeasiblePointBeatsTheProjection) {
  std::mt19937_64 gen(99);
  for (int rep = 0; rep < 50; ++rep) {
    const Instance in = random_instance(gen, 3);
    const Metric metric(in.sigma);
    const ConeSpec cone = ConeSpec::polyhedral(in.r);
    const Vector p = project_cone(in.x, cone, metric);
    const double best = metric.norm_sq(in.x - p);
    for (int k = 0; k < 2000; ++k) {
      const Vector y = oracle::random_vector(in.x.size(), gen, 3.0);
      if (!cone.contains(y, 0.0)) continue;
      EXPECT_GE(metric.norm_sq(in.x - y), best - 1e-10);
    }
  }
}

TEST(Projection, MoreauDecompositionAndIdempotence) {
  std::mt19937_64 gen(31337);
  for (int rep = 0; rep < 1000; ++rep) {
    const Instance in = random_instance(gen);
    const Metric metric(in.sigma);
    const ConeSpec cone = ConeSpec::polyhedral(in.r);
    const ConeProjector proj(cone, metric);
    const ConeProjection res = proj.project(in.x);
    const Vector p = res.point;
    const Vector q = in.x - p;
    const double scale = 1.0 + metric.norm_sq(in.x);
    EXPECT_TRUE(cone.contains(p, 1e-8));
    EXPECT_NEAR(metric.inner(p, q), 0.0, 1e-8 * scale);
    EXPECT_NEAR((proj(p) - p).norm(), 0.0, 1e-8 * (1 + p.norm()));
    // q lies in the polar: its projection onto the cone is the apex.
    EXPECT_NEAR(proj(q).norm(), 0.0, 1e-8 * (1 + q.norm()));
    EXPECT_LE(res.kkt_residual, 1e-8 * (1 + in.x.norm()));
  }
}

TEST(Projection, IsNonexpansive) {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 200; ++rep) {
    const Instance in = random_instance(gen, 4);
    const Metric metric(in.sigma);
    const ConeProjector proj(ConeSpec::polyhedral(in.r), metric);
    const Vector y = oracle::random_vector(in.x.size(), gen);
    EXPECT_LE(metric.norm(proj(in.x) - proj(y)), metric.norm(in.x - y) + 1e-9);
  }
}

TEST(Projection, DykstraAgreesWithActiveSet) {
  std::mt19937_64 gen(77);
  ProjectionOptions iterative;
  iterative.force_iterative = true;
  iterative.tolerance = 1e-13;
  iterative.max_sweeps = 200000;
  for (int rep = 0; rep < 100; ++rep) {
    const Instance in = random_instance(gen, 4);
    const Metric metric(in.sigma);
    const ConeSpec cone = ConeSpec::polyhedral(in.r);
    const ConeProjection a = ConeProjector(cone, metric).project(in.x);
    const ConeProjection d = ConeProjector(cone, metric, iterative).project(in.x);
    EXPECT_EQ(d.method, ProjectionMethod::dykstra);
    EXPECT_NEAR((a.point - d.point).norm(), 0.0, 1e-6 * (1 + in.x.norm())) << "rep " << rep;
  }
}

TEST(Projection, LargeConesNeedTheFallback) {
  const Index k = 20;
  const ConeSpec cone = ConeSpec::simple_order(k);
  EXPECT_THROW(ConeProjector(cone, Metric::identity(k)), CapabilityError);
  ProjectionOptions opts;
  opts.iterative_fallback = true;
  const ConeProjector proj(cone, Metric::identity(k), opts);
  Vector x(k);
  for (Index i = 0; i < k; ++i) x(i) = double(k - i);
  const ConeProjection res = proj.project(x);
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR((res.point - Vector::Constant(k, x.mean())).norm(), 0.0, 1e-6);
}

TEST(Projection, ConeOrthogonalToSubspace) {
  // Simple order with the constant line removed: P(x|C) - P(x|L).
  Vector x(3);
  x << 0, 2, 1;
  const Metric m = Metric::identity(3);
  const Vector k = project_cone_orthogonal(x, LinearSubspace::span_ones(3), ConeSpec::simple_order(3), m);
  Vector expect(3);
  expect << -1, 0.5, 0.5;
  EXPECT_NEAR((k - expect).norm(), 0.0, 1e-12);
  EXPECT_NEAR(k.sum(), 0.0, 1e-12);
  EXPECT_THROW(project_cone_orthogonal(x, LinearSubspace::whole(3), ConeSpec::simple_order(3), m), ContractError);
}

TEST(Projection, PolarOrthantAgreesWithProjection) {
  std::mt19937_64 gen(404);
  for (int rep = 0; rep < 500; ++rep) {
    const Instance in = random_instance(gen, 3);
    const Metric metric(in.sigma);
    const bool polar = in_polar_orthant(in.x, in.r, metric);
    const double apex_gap = project_cone(in.x, ConeSpec::polyhedral(in.r), metric).norm();
    // Membership in the polar is equivalent to projecting onto the apex only
    // when the cone is pointed; restrict to the square case.
    if (in.r.rows() == in.r.cols()) EXPECT_EQ(polar, apex_gap < 1e-9) << "rep " << rep;
  }
}

TEST(Projection, PolarOrthantSingularThrows) {
  Matrix r(2, 2);
  r << 1, 0, 1, 1e-20;
  EXPECT_THROW(in_polar_orthant(Vector::Ones(2), r, Metric::identity(2)), NumericError);
}

TEST(Projection, FaceDimension) {
  Vector x(4);
  x << 0, 1e-14, 2, 3;
  EXPECT_EQ(face_dimension(x), 2);
  EXPECT_EQ(face_dimension(Vector::Zero(3)), 0);
}

TEST(Projection, AcceptanceRegionsAreOpenBalls) {
  const Metric m = Metric::identity(2);
  const ConeSpec quad = ConeSpec::orthant(2);
  Vector s(2);
  s << 1, 0;  // distance^2 to the polar is 1
  const Problem a = TypeA{LinearSubspace::zero(2), quad};
  EXPECT_TRUE(acceptance_member(s, a, 1.01, 1, m));
  EXPECT_FALSE(acceptance_member(s, a, 1.0, 1, m));
  s << -1, -1;  // in the polar
  EXPECT_TRUE(acceptance_member(s, a, 1e-6, 1000, m));

  const Problem b = TypeB{quad};
  s << 0, -2;  // distance^2 to the cone is 4
  EXPECT_TRUE(acceptance_member(s, b, 4.1, 1, m));
  EXPECT_FALSE(acceptance_member(s, b, 4.0, 1, m));
  EXPECT_FALSE(acceptance_member(s, b, 40.0, 11, m));
}
