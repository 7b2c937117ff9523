#pragma once

#include <cstdint>
#include <variant>

#include "ortest/metric.hpp"

namespace ortest {

enum class WeightSource { closed_form, monte_carlo };

/// Chi-bar-square mixing weights (w_0, ..., w_p): w_j is the probability
/// that the projection of N(0, Psi) onto the nonnegative orthant (in the Psi
/// metric) has exactly j positive coordinates.
struct ChiBarWeights {
  Vector w;
  WeightSource source = WeightSource::closed_form;
  /// Monte Carlo only.
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;

  Index dim() const noexcept { return w.size() - 1; }
  /// (w_p, ..., w_0): the mixture of the complementary dimensions.
  ChiBarWeights reversed() const;
  /// Weights of the mixture with `dof` extra independent chi-square degrees
  /// of freedom: w'_{j + dof} = w_j.
  ChiBarWeights shifted(Index dof) const;
};

enum class TailDirection { upper, lower };

struct MixtureTailSpec {
  ChiBarWeights weights;
  TailDirection direction = TailDirection::upper;
};

/// (acos(rho)/(2 pi), 1/2, 1/2 - acos(rho)/(2 pi)) for Psi = [[1, rho], [rho, 1]]
/// up to scale.
ChiBarWeights weights_closed_form_2d(double rho);

/// Face-count estimate from N draws. Draws are split into fixed chunks seeded
/// by derive_seed(seed, chunk), so the tallies do not depend on `threads`
/// (0 = hardware concurrency).
ChiBarWeights weights_monte_carlo(const Metric& psi, std::uint64_t n, std::uint64_t seed,
                                  unsigned threads = 1);

/// sum_j w_j P(chi2_j >= t).
double mixture_upper_tail(const ChiBarWeights& weights, double t);
/// sum_j w_j P(chi2_j < t).
double mixture_lower_tail(const ChiBarWeights& weights, double t);
double tail(const MixtureTailSpec& spec, double t);

/// sum_j w_j P(chi2_{j+d} >= c1) P(chi2_{p-j} < c2) with d = extra_dof (the
/// dimension of lineality left after removing the null subspace).
double joint_tail(const ChiBarWeights& weights, double c1, double c2, int extra_dof = 0);

struct Marginal {};
struct Joint {
  double c2 = 0.0;
  int extra_dof = 0;
};
using CriticalMode = std::variant<Marginal, Joint>;

/// Bisection for c with tail(c) = alpha (|difference| <= 1e-10). The bracket
/// starts at [0, 1] and doubles its upper end until the tail drops below
/// alpha. Returns 0 when alpha is at least the tail just above zero. In joint
/// mode throws InfeasibleError when alpha > joint_tail(0, c2).
double solve_critical(const ChiBarWeights& weights, double alpha, const CriticalMode& mode = Marginal{});

/// Attained level of the composite test for the identity-covariance quadrant:
/// alpha - 2 (1 - Phi(sqrt c_alpha)) (1 - Phi(sqrt c_gamma)).
double safe_level_2d(double alpha, double gamma);

}  // namespace ortest
