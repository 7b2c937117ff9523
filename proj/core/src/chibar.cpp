#include "ortest/chibar.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "ortest/cone.hpp"
#include "ortest/detail/parallel.hpp"
#include "ortest/error.hpp"
#include "ortest/projection.hpp"
#include "ortest/rng.hpp"
#include "ortest/special.hpp"

namespace ortest {
namespace {

constexpr std::uint64_t kChunk = 1 << 16;
constexpr int kMaxBisection = 200;
constexpr double kProbTolerance = 1e-10;

void check_weights(const ChiBarWeights& weights) {
  require(weights.w.size() >= 1, "chi-bar weights are empty");
}

}  // namespace

ChiBarWeights ChiBarWeights::reversed() const {
  ChiBarWeights out = *this;
  out.w = w.reverse();
  return out;
}

ChiBarWeights ChiBarWeights::shifted(Index dof) const {
  require(dof >= 0, "shift must be nonnegative");
  ChiBarWeights out = *this;
  out.w = Vector::Zero(w.size() + dof);
  out.w.tail(w.size()) = w;
  return out;
}

ChiBarWeights weights_closed_form_2d(double rho) {
  require(std::isfinite(rho) && std::abs(rho) < 1.0, "closed-form weights need |rho| < 1");
  const double a = std::acos(rho) / (2.0 * std::numbers::pi);
  ChiBarWeights out;
  out.w = Vector(3);
  out.w << a, 0.5, 0.5 - a;
  out.source = WeightSource::closed_form;
  return out;
}

ChiBarWeights weights_monte_carlo(const Metric& psi, std::uint64_t n, std::uint64_t seed,
                                  unsigned threads) {
  require(n >= 1, "Monte Carlo weights need at least one draw");
  const Index p = psi.dim();
  const ConeProjector projector(ConeSpec::orthant(p), psi);
  const Matrix& lower = psi.lower();
  const Vector zero = Vector::Zero(p);

  using Counts = std::vector<std::uint64_t>;
  const auto parts = detail::chunked<Counts>(n, kChunk, threads,
      [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
        Counts counts(static_cast<std::size_t>(p) + 1, 0);
        GaussianStream stream(derive_seed(seed, chunk));
        for (std::uint64_t k = begin; k < end; ++k) {
          const Vector draw = stream.correlated(zero, lower);
          ++counts[static_cast<std::size_t>(face_dimension(projector.project(draw).point))];
        }
        return counts;
      });

  Counts total(static_cast<std::size_t>(p) + 1, 0);
  for (const Counts& part : parts) {
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += part[j];
  }
  ChiBarWeights out;
  out.w = Vector(p + 1);
  for (Index j = 0; j <= p; ++j) {
    out.w(j) = static_cast<double>(total[static_cast<std::size_t>(j)]) / static_cast<double>(n);
  }
  out.source = WeightSource::monte_carlo;
  out.replications = n;
  out.seed = seed;
  return out;
}

double mixture_upper_tail(const ChiBarWeights& weights, double t) {
  check_weights(weights);
  require(t >= 0.0, "tail argument must be nonnegative");
  double sum = 0.0;
  for (Index j = 0; j < weights.w.size(); ++j) sum += weights.w(j) * chi_square_sf(int(j), t);
  return sum;
}

double mixture_lower_tail(const ChiBarWeights& weights, double t) {
  check_weights(weights);
  require(t >= 0.0, "tail argument must be nonnegative");
  double sum = 0.0;
  for (Index j = 0; j < weights.w.size(); ++j) sum += weights.w(j) * chi_square_cdf(int(j), t);
  return sum;
}

double tail(const MixtureTailSpec& spec, double t) {
  return spec.direction == TailDirection::upper ? mixture_upper_tail(spec.weights, t)
                                                : mixture_lower_tail(spec.weights, t);
}

double joint_tail(const ChiBarWeights& weights, double c1, double c2, int extra_dof) {
  check_weights(weights);
  require(c1 >= 0.0 && c2 >= 0.0, "joint tail arguments must be nonnegative");
  require(extra_dof >= 0, "extra degrees of freedom must be nonnegative");
  const Index p = weights.dim();
  double sum = 0.0;
  for (Index j = 0; j <= p; ++j) {
    sum += weights.w(j) * chi_square_sf(int(j) + extra_dof, c1) * chi_square_cdf(int(p - j), c2);
  }
  return sum;
}

double solve_critical(const ChiBarWeights& weights, double alpha, const CriticalMode& mode) {
  check_weights(weights);
  require(alpha > 0.0 && alpha < 1.0, "level must lie in (0, 1)");
  const bool joint = std::holds_alternative<Joint>(mode);
  const double c2 = joint ? std::get<Joint>(mode).c2 : 0.0;
  const int extra = joint ? std::get<Joint>(mode).extra_dof : 0;
  auto f = [&](double c) {
    return joint ? joint_tail(weights, c, c2, extra) : mixture_upper_tail(weights, c);
  };

  if (joint) {
    const double supremum = joint_tail(weights, 0.0, c2, extra);
    if (alpha > supremum) {
      throw InfeasibleError("level " + std::to_string(alpha) +
                                " is not attainable; the largest attainable level is " +
                                std::to_string(supremum),
                            supremum);
    }
  }
  // The j = 0 component is a point mass at zero; just above zero it is gone.
  const double near_zero = f(std::numeric_limits<double>::min());
  if (alpha >= near_zero) return 0.0;

  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) >= alpha) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericError("critical value bracket diverged");
  }
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double value = f(mid);
    if (std::abs(value - alpha) <= 0.01 * kProbTolerance || mid == lo || mid == hi) {
      return mid;
    }
    (value >= alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double safe_level_2d(double alpha, double gamma) {
  require(alpha > 0.0 && alpha < 1.0 && gamma > 0.0 && gamma < 1.0, "levels must lie in (0, 1)");
  const ChiBarWeights quadrant = weights_closed_form_2d(0.0);
  const double c_alpha = solve_critical(quadrant, alpha);
  const double c_gamma = solve_critical(quadrant.reversed(), gamma);
  return alpha - 2.0 * normal_sf(std::sqrt(c_alpha)) * normal_sf(std::sqrt(c_gamma));
}

}  // namespace ortest
