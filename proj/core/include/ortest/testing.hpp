#pragma once

#include <cstdint>
#include <string_view>

#include "ortest/chibar.hpp"
#include "ortest/cone.hpp"
#include "ortest/metric.hpp"
#include "ortest/projection.hpp"
#include "ortest/rng.hpp"
#include "ortest/subspace.hpp"

namespace ortest {

/// An estimate S_n with sqrt(n)(S_n - theta) approximately N(0, Sigma_n).
struct Statistic {
  Vector s_n;
  Metric sigma_n;
  long n = 1;

  Statistic(Vector s, Metric sigma, long size);
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double critical_value = 0.0;
  ChiBarWeights weights_used;
  double alpha = 0.05;

  /// statistic >= critical_value.
  bool reject() const noexcept { return statistic >= critical_value; }
};

enum class Conclusion { SafeReject, DoNotReject, LikelyTypeIII, DoNotRejectRevisit };

/// The decision-table wording, e.g. "Safely, reject the Null.".
std::string_view conclusion_text(Conclusion c);
/// Identifier used in reports, e.g. "SafeReject".
std::string_view conclusion_code(Conclusion c);
/// Row of the decision table for (certificate d1, original rejection d2).
Conclusion conclude(bool d1, bool d2);

enum class ThresholdMode {
  /// Compare T_SAFE with c_alpha^SAFE so the composite test has level alpha.
  adjusted,
  /// Compare T_SAFE with the plain c_alpha; the attained level is alpha^SAFE.
  unadjusted,
};

struct WeightConfig {
  enum class Method { automatic, closed_form, monte_carlo };
  /// automatic: exact for p <= 2, Monte Carlo above.
  Method method = Method::automatic;
  std::uint64_t replications = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
};

/// Weights of the orthant in the metric R Sigma R' (p = rows of R).
ChiBarWeights cone_weights(const Matrix& restriction, const Metric& sigma, const WeightConfig& cfg = {});

/// Dimension of lineality(C) minus dim(L): chi-square degrees of freedom that
/// the Type A statistic carries on top of the orthant mixture.
int lineality_excess(const LinearSubspace& sub, const ConeSpec& cone);

/// n (||S - P(S|L)||^2 - ||S - P(S|C)||^2), clamped at zero.
double dt_type_a(const Statistic& stat, const LinearSubspace& sub, const ConeSpec& cone);
/// n ||S - P(S|C)||^2.
double dt_type_b(const Statistic& stat, const ConeSpec& cone);

enum class TestKind { type_a, type_b };

/// type_a: sum_j w_j P(chi2_j >= t); type_b: sum_j w_j P(chi2_{p-j} >= t).
/// For type_a pass weights already shifted by lineality_excess.
double p_value(double statistic, const ChiBarWeights& weights, TestKind kind);

struct SafeOutcome {
  TestResult original;
  TestResult auxiliary;
  bool d1 = false;
  bool d2 = false;
  Conclusion conclusion = Conclusion::DoNotRejectRevisit;
  double t_safe = 0.0;
  double alpha_safe = 0.0;
  double c_alpha_safe = 0.0;
  /// Threshold actually compared with t_safe (c_alpha_safe or c_alpha).
  double safe_threshold = 0.0;
  ThresholdMode threshold = ThresholdMode::adjusted;
  double gamma = 0.1;
};

struct SafeOptions {
  WeightConfig weights;
  ThresholdMode threshold = ThresholdMode::adjusted;
};

/// The composite test: T_SAFE = T 1{T' < c'_gamma}, certificate d1 =
/// 1{gamma* >= gamma}, rejection d2 = 1{alpha* <= alpha}.
SafeOutcome safe_test(const Statistic& stat, const LinearSubspace& sub, const ConeSpec& cone,
                      double alpha, double gamma, const SafeOptions& options = {});

/// Level alpha~ whose plain critical value c_{alpha~} gives the composite
/// attained level target: joint_tail(c_{alpha~}, c'_gamma) = target.
double adjusted_alpha(const ChiBarWeights& weights, double target, double gamma, int extra_dof = 0);

/// Type A: ||theta - P(theta|L)||^2 - ||theta - P(theta|C)||^2.
/// Type B: ||theta - P(theta|C)||^2. Clamped at zero.
double delta(const Vector& theta, const Problem& problem, const Metric& metric);

struct ConsistencyRegion {
  bool consistent = false;
  bool type3_risk = false;
};

/// consistent iff ||P(theta | C cap L^perp)|| > 1e-8, i.e. theta is outside the
/// polar of C cap L^perp; type3_risk iff consistent and theta is outside C.
ConsistencyRegion consistency_region(const Vector& theta, const LinearSubspace& sub,
                                     const ConeSpec& cone, const Metric& metric);

}  // namespace ortest
