#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "ortest/chibar.hpp"
#include "ortest/error.hpp"
#include "ortest/special.hpp"

using namespace ortest;

namespace {

ChiBarWeights quadrant() { return weights_closed_form_2d(0.0); }

// Mixture tail evaluated with Boost as an independent route.
double boost_upper(const Vector& w, double t) {
  double s = t <= 0 ? w(0) : 0.0;
  for (Index j = 1; j < w.size(); ++j) s += w(j) * boost::math::gamma_q(0.5 * double(j), 0.5 * t);
  return s;
}

}  // namespace

TEST(ClosedForm, Examples) {
  const ChiBarWeights q = quadrant();
  EXPECT_NEAR(q.w(0), 0.25, 1e-15);
  EXPECT_NEAR(q.w(1), 0.5, 1e-15);
  EXPECT_NEAR(q.w(2), 0.25, 1e-15);
  EXPECT_NEAR(weights_closed_form_2d(0.9).w(2), 0.4282, 1e-4);
  const ChiBarWeights near_one = weights_closed_form_2d(1.0 - 1e-12);
  EXPECT_NEAR(near_one.w(0), 0.0, 1e-5);
  EXPECT_NEAR(near_one.w(2), 0.5, 1e-5);
  EXPECT_THROW(weights_closed_form_2d(1.0), ContractError);
  EXPECT_THROW(weights_closed_form_2d(-1.5), ContractError);
}

TEST(ClosedForm, NormalizedForAllRho) {
  for (double rho = -0.99; rho < 1.0; rho += 0.01) {
    const Vector w = weights_closed_form_2d(rho).w;
    EXPECT_NEAR(w.sum(), 1.0, 1e-12);
    EXPECT_GE(w.minCoeff(), 0.0);
  }
}

TEST(ClosedForm, RhoPointNineGivesPublishedCritical) {
  EXPECT_NEAR(solve_critical(weights_closed_form_2d(0.9), 0.05), 4.915, 1e-3);
}

TEST(MonteCarlo, IdentityQuadrant) {
  const ChiBarWeights w = weights_monte_carlo(Metric::identity(2), 1'000'000, 17, 1);
  EXPECT_NEAR(w.w(0), 0.25, 0.002);
  EXPECT_NEAR(w.w(1), 0.50, 0.002);
  EXPECT_NEAR(w.w(2), 0.25, 0.002);
  EXPECT_EQ(w.source, WeightSource::monte_carlo);
  EXPECT_EQ(w.replications, 1'000'000u);
  EXPECT_NEAR(w.w.sum(), 1.0, 1e-15);
}

TEST(MonteCarlo, CorrelatedAgainstClosedForm) {
  for (double rho : {0.9, -0.5}) {
    const ChiBarWeights mc = weights_monte_carlo(Metric::interclass(rho), 1'000'000, 3, 1);
    const ChiBarWeights cf = weights_closed_form_2d(rho);
    EXPECT_LE((mc.w - cf.w).cwiseAbs().maxCoeff(), 0.002) << rho;
  }
}

TEST(MonteCarlo, OneDimensionIsHalfHalf) {
  Matrix s(1, 1);
  s << 3.7;
  const ChiBarWeights w = weights_monte_carlo(Metric(s), 200'000, 5, 1);
  EXPECT_NEAR(w.w(0), 0.5, 0.004);
}

TEST(MonteCarlo, IndependentCoordinatesAreBinomial) {
  // Under the identity each coordinate is positive independently: w_j is
  // Binomial(3, 1/2).
  const ChiBarWeights w = weights_monte_carlo(Metric::identity(3), 400'000, 8, 1);
  const double expect[] = {0.125, 0.375, 0.375, 0.125};
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(w.w(j), expect[j], 0.003);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  const Metric psi = Metric::interclass(0.3);
  const ChiBarWeights a = weights_monte_carlo(psi, 300'001, 99, 1);
  const ChiBarWeights b = weights_monte_carlo(psi, 300'001, 99, 8);
  const ChiBarWeights c = weights_monte_carlo(psi, 300'001, 99, 3);
  EXPECT_EQ(a.w, b.w);
  EXPECT_EQ(a.w, c.w);
  EXPECT_NE(a.w, weights_monte_carlo(psi, 300'001, 100, 1).w);
}

TEST(MixtureTail, Examples) {
  const ChiBarWeights q = quadrant();
  EXPECT_DOUBLE_EQ(mixture_upper_tail(q, 0.0), 1.0);
  EXPECT_NEAR(mixture_upper_tail(q, 4.915), 0.5 * 0.0266245 + 0.25 * 0.0856488, 1e-6);
  EXPECT_NEAR(mixture_upper_tail(q, 4.915), 0.03473, 1e-5);
  EXPECT_LT(mixture_upper_tail(q, 500.0), 1e-100);
  EXPECT_NEAR(mixture_upper_tail(q, 1e-300), 0.75, 1e-15);
  EXPECT_THROW(mixture_upper_tail(q, -1.0), ContractError);
}

TEST(MixtureTail, MatchesBoostRoute) {
  const Vector w = weights_closed_form_2d(0.37).w;
  ChiBarWeights cw;
  cw.w = w;
  for (double t : {0.0, 0.1, 1.0, 3.3, 7.0, 15.0}) EXPECT_NEAR(mixture_upper_tail(cw, t), boost_upper(w, t), 1e-13);
}

TEST(MixtureTail, UpperPlusLowerIsOne) {
  const ChiBarWeights q = weights_closed_form_2d(-0.4);
  for (double t : {0.0, 0.5, 2.0, 9.0}) {
    EXPECT_NEAR(mixture_upper_tail(q, t) + mixture_lower_tail(q, t), 1.0, 1e-14);
    EXPECT_DOUBLE_EQ(tail({q, TailDirection::lower}, t), mixture_lower_tail(q, t));
  }
}

TEST(MixtureTail, StrictlyDecreasing) {
  const ChiBarWeights q = weights_closed_form_2d(0.6);
  double prev = 1.0;
  for (double t = 0.01; t < 30; t += 0.01) {
    const double v = mixture_upper_tail(q, t);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(JointTail, Marginals) {
  const ChiBarWeights q = weights_closed_form_2d(0.2);
  EXPECT_NEAR(joint_tail(q, 0.0, std::numeric_limits<double>::infinity()), 1.0, 1e-15);
  for (double c : {0.3, 2.0, 6.0}) {
    EXPECT_NEAR(joint_tail(q, 0.0, c), mixture_lower_tail(q.reversed(), c), 1e-15);
  }
}

TEST(JointTail, Monotone) {
  const ChiBarWeights q = weights_closed_form_2d(-0.3);
  for (double c1 = 0.0; c1 < 10; c1 += 0.5) {
    for (double c2 = 0.0; c2 < 10; c2 += 0.5) {
      EXPECT_GE(joint_tail(q, c1, c2) + 1e-15, joint_tail(q, c1 + 0.5, c2));
      EXPECT_LE(joint_tail(q, c1, c2), joint_tail(q, c1, c2 + 0.5) + 1e-15);
    }
  }
}

TEST(JointTail, QuadrantAgreesWithNormalClosedForm) {
  // For the identity quadrant alpha - joint_tail(c_alpha, c_gamma) equals
  // 2 (1 - Phi(sqrt c_alpha)) (1 - Phi(sqrt c_gamma)).
  const ChiBarWeights q = quadrant();
  const double ca = solve_critical(q, 0.05);
  const double cg = solve_critical(q.reversed(), 0.1);
  const double joint = joint_tail(q, ca, cg);
  const double closed = 0.05 - 2 * normal_sf(std::sqrt(ca)) * normal_sf(std::sqrt(cg));
  EXPECT_NEAR(joint, closed, 1e-6);
  // Frozen value of both routes.
  EXPECT_NEAR(joint, 0.048298, 1e-6);
}

TEST(JointTail, ExtraDegreesShiftTheFirstFactor) {
  const ChiBarWeights q = quadrant();
  EXPECT_NEAR(joint_tail(q, 3.0, 2.0, 1),
              0.25 * chi_square_sf(1, 3.0) * chi_square_cdf(2, 2.0) +
                  0.5 * chi_square_sf(2, 3.0) * chi_square_cdf(1, 2.0) + 0.25 * chi_square_sf(3, 3.0),
              1e-15);
}

TEST(SolveCritical, RoundTrip) {
  for (double rho : {-0.8, 0.0, 0.5, 0.9}) {
    const ChiBarWeights w = weights_closed_form_2d(rho);
    for (double a : {0.001, 0.01, 0.05, 0.1, 0.3, 0.5}) {
      const double c = solve_critical(w, a);
      EXPECT_NEAR(mixture_upper_tail(w, c), a, 1e-9) << rho << " " << a;
    }
  }
}

TEST(SolveCritical, MedianOfQuadrantMixture) {
  const double c = solve_critical(quadrant(), 0.5);
  EXPECT_NEAR(mixture_upper_tail(quadrant(), c), 0.5, 1e-10);
}

TEST(SolveCritical, AtOrAboveMassAwayFromZeroReturnsZero) {
  const ChiBarWeights q = quadrant();  // tail(0+) = 0.75
  EXPECT_EQ(solve_critical(q, 0.75), 0.0);
  EXPECT_EQ(solve_critical(q, 0.9), 0.0);
  const double c = solve_critical(q, 0.7499);
  EXPECT_GT(c, 0.0);
  EXPECT_NEAR(mixture_upper_tail(q, c), 0.7499, 1e-9);
  EXPECT_THROW(solve_critical(q, 0.0), ContractError);
  EXPECT_THROW(solve_critical(q, 1.0), ContractError);
}

TEST(SolveCritical, JointModeAndInfeasibility) {
  const ChiBarWeights q = quadrant();
  const double cg = solve_critical(q.reversed(), 0.1);
  const double cs = solve_critical(q, 0.05, Joint{cg});
  EXPECT_NEAR(joint_tail(q, cs, cg), 0.05, 1e-9);
  EXPECT_LE(cs, solve_critical(q, 0.05));
  const double sup = joint_tail(q, 0.0, cg);
  try {
    solve_critical(q, std::min(0.999, sup + 0.01), Joint{cg});
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_NEAR(e.supremum(), sup, 1e-15);
  }
}

TEST(SafeLevel2d, BelowAlphaOnGrid) {
  for (int i = 1; i <= 20; ++i) {
    for (int k = 1; k <= 20; ++k) {
      const double a = i / 21.0, g = k / 21.0;
      EXPECT_LE(safe_level_2d(a, g), a);
    }
  }
}

TEST(SafeLevel2d, SmallGammaApproachesAlpha) {
  EXPECT_NEAR(safe_level_2d(0.1, 1e-9), 0.1, 1e-5);
}

TEST(SafeLevel2d, FrozenValues) {
  // Frozen outputs of the stated closed form with sqrt(c) arguments.
  EXPECT_NEAR(safe_level_2d(0.1, 0.1), 0.096324, 1e-6);
  EXPECT_NEAR(safe_level_2d(0.1, 0.5), 0.075419, 1e-6);
}
