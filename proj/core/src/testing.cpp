#include "ortest/testing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ortest/error.hpp"

namespace ortest {
namespace {

constexpr double kClamp = 1e-10;
constexpr double kConsistencyCut = 1e-8;

double clamp_nonnegative(double v, const char* what) {
  if (v < -kClamp * std::max(1.0, std::abs(v))) {
    throw NumericError(std::string(what) + " is negative beyond rounding: " + std::to_string(v));
  }
  return std::max(v, 0.0);
}

}  // namespace

Statistic::Statistic(Vector s, Metric sigma, long size)
    : s_n(std::move(s)), sigma_n(std::move(sigma)), n(size) {
  require(n >= 1, "sample size must be positive");
  require(s_n.size() == sigma_n.dim(), "estimate and covariance dimensions differ");
  require(s_n.allFinite(), "estimate has non-finite entries");
}

std::string_view conclusion_text(Conclusion c) {
  switch (c) {
    case Conclusion::SafeReject: return "Safely, reject the Null.";
    case Conclusion::DoNotReject: return "Do not reject the Null.";
    case Conclusion::LikelyTypeIII: return "A likely Type III error. Revisit assumptions.";
    case Conclusion::DoNotRejectRevisit: return "Do not reject the Null. Revisit assumptions.";
  }
  return "";
}

std::string_view conclusion_code(Conclusion c) {
  switch (c) {
    case Conclusion::SafeReject: return "SafeReject";
    case Conclusion::DoNotReject: return "DoNotReject";
    case Conclusion::LikelyTypeIII: return "LikelyTypeIII";
    case Conclusion::DoNotRejectRevisit: return "DoNotRejectRevisit";
  }
  return "";
}

Conclusion conclude(bool d1, bool d2) {
  if (d1) return d2 ? Conclusion::SafeReject : Conclusion::DoNotReject;
  return d2 ? Conclusion::LikelyTypeIII : Conclusion::DoNotRejectRevisit;
}

ChiBarWeights cone_weights(const Matrix& restriction, const Metric& sigma, const WeightConfig& cfg) {
  require(restriction.cols() == sigma.dim(), "restriction and covariance dimensions differ");
  const Matrix psi = restriction * sigma.sigma() * restriction.transpose();
  const Index p = psi.rows();
  using M = WeightConfig::Method;
  if (cfg.method != M::monte_carlo && p == 1) {
    ChiBarWeights out;
    out.w = Vector::Constant(2, 0.5);
    return out;
  }
  if (cfg.method != M::monte_carlo && p == 2) {
    const double rho = psi(0, 1) / std::sqrt(psi(0, 0) * psi(1, 1));
    return weights_closed_form_2d(rho);
  }
  if (cfg.method == M::closed_form) {
    throw CapabilityError("closed-form chi-bar weights are only available for p <= 2 (p = " +
                          std::to_string(p) + ")");
  }
  return weights_monte_carlo(Metric(psi), cfg.replications, cfg.seed, cfg.threads);
}

int lineality_excess(const LinearSubspace& sub, const ConeSpec& cone) {
  check_nested(sub, cone);
  return static_cast<int>(cone.lineality().dim() - sub.dim());
}

double dt_type_a(const Statistic& stat, const LinearSubspace& sub, const ConeSpec& cone) {
  check_nested(sub, cone);
  const Metric& m = stat.sigma_n;
  const Vector& s = stat.s_n;
  const double to_null = m.norm_sq(s - project_subspace(s, sub, m));
  const double to_cone = m.norm_sq(polar_complement(s, cone, m));
  return clamp_nonnegative(static_cast<double>(stat.n) * (to_null - to_cone), "distance statistic");
}

double dt_type_b(const Statistic& stat, const ConeSpec& cone) {
  return static_cast<double>(stat.n) * stat.sigma_n.norm_sq(polar_complement(stat.s_n, cone, stat.sigma_n));
}

double p_value(double statistic, const ChiBarWeights& weights, TestKind kind) {
  require(statistic >= 0.0, "statistic must be nonnegative");
  const double p = kind == TestKind::type_a ? mixture_upper_tail(weights, statistic)
                                            : mixture_upper_tail(weights.reversed(), statistic);
  return std::clamp(p, 0.0, 1.0);
}

SafeOutcome safe_test(const Statistic& stat, const LinearSubspace& sub, const ConeSpec& cone,
                      double alpha, double gamma, const SafeOptions& options) {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
  const int extra = lineality_excess(sub, cone);
  const ChiBarWeights base = cone_weights(cone.restriction(), stat.sigma_n, options.weights);
  const ChiBarWeights original_weights = base.shifted(extra);
  const ChiBarWeights auxiliary_weights = base.reversed();

  SafeOutcome out;
  out.threshold = options.threshold;
  out.gamma = gamma;

  out.original.statistic = dt_type_a(stat, sub, cone);
  out.original.p_value = p_value(out.original.statistic, original_weights, TestKind::type_a);
  out.original.critical_value = solve_critical(original_weights, alpha);
  out.original.weights_used = original_weights;
  out.original.alpha = alpha;

  out.auxiliary.statistic = dt_type_b(stat, cone);
  out.auxiliary.p_value = p_value(out.auxiliary.statistic, base, TestKind::type_b);
  out.auxiliary.critical_value = solve_critical(auxiliary_weights, gamma);
  out.auxiliary.weights_used = auxiliary_weights;
  out.auxiliary.alpha = gamma;

  const double c_alpha = out.original.critical_value;
  const double c_gamma = out.auxiliary.critical_value;
  out.t_safe = out.auxiliary.statistic < c_gamma ? out.original.statistic : 0.0;
  out.alpha_safe = joint_tail(base, c_alpha, c_gamma, extra);
  out.c_alpha_safe = solve_critical(base, alpha, Joint{c_gamma, extra});
  out.safe_threshold = options.threshold == ThresholdMode::adjusted ? out.c_alpha_safe : c_alpha;

  out.d1 = out.auxiliary.p_value >= gamma;
  out.d2 = out.original.p_value <= alpha;
  out.conclusion = conclude(out.d1, out.d2);
  return out;
}

double adjusted_alpha(const ChiBarWeights& weights, double target, double gamma, int extra_dof) {
  require(target > 0.0 && target < 1.0, "target level must lie in (0, 1)");
  require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
  const ChiBarWeights marginal = weights.shifted(extra_dof);
  const double c_gamma = solve_critical(weights.reversed(), gamma);
  auto attained = [&](double a) {
    return joint_tail(weights, solve_critical(marginal, a), c_gamma, extra_dof);
  };
  // The attained level increases with alpha; it equals joint_tail(0+, c'_gamma)
  // once c_alpha reaches zero.
  double lo = target;
  double hi = mixture_upper_tail(marginal, std::numeric_limits<double>::min());
  const double supremum = attained(hi * (1.0 - 1e-12));
  if (target > supremum) {
    throw InfeasibleError("composite level " + std::to_string(target) +
                              " is not attainable; the largest attainable level is " +
                              std::to_string(supremum),
                          supremum);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (attained(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double delta(const Vector& theta, const Problem& problem, const Metric& metric) {
  const double value = std::visit(
      [&](const auto& kind) {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, TypeA>) {
          check_nested(kind.sub, kind.cone);
          return metric.norm_sq(theta - project_subspace(theta, kind.sub, metric)) -
                 metric.norm_sq(polar_complement(theta, kind.cone, metric));
        } else {
          return metric.norm_sq(polar_complement(theta, kind.cone, metric));
        }
      },
      problem);
  return clamp_nonnegative(value, "consistency gap");
}

ConsistencyRegion consistency_region(const Vector& theta, const LinearSubspace& sub,
                                     const ConeSpec& cone, const Metric& metric) {
  ConsistencyRegion out;
  out.consistent = metric.norm(project_cone_orthogonal(theta, sub, cone, metric)) > kConsistencyCut;
  out.type3_risk = out.consistent && !cone.contains(theta);
  return out;
}

}  // namespace ortest
