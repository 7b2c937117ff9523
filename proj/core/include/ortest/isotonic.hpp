#pragma once

#include <optional>
#include <vector>

#include "ortest/metric.hpp"

namespace ortest {

/// Means (or observations) with positive weights w_j = n_j / n.
struct WeightedSeries {
  Vector values;
  Vector weights;

  WeightedSeries(Vector values, Vector weights);
  /// Equal unit weights.
  static WeightedSeries unweighted(Vector values);

  Index size() const noexcept { return values.size(); }
};

/// A level set [first, last], zero-based and inclusive.
struct LevelSet {
  Index first = 0;
  Index last = 0;
};

struct IsotonicFit {
  Vector fitted;
  std::vector<LevelSet> level_sets;
  /// sum_i w_i (values_i - fitted_i)^2.
  double objective = 0.0;
};

/// Weighted average of values[u..v]; zero-based, inclusive.
double av(const WeightedSeries& series, Index u, Index v);

/// Weighted least-squares projection onto the nondecreasing cone by
/// pool-adjacent-violators (stack of blocks, O(K)).
IsotonicFit pava(const WeightedSeries& series);

/// theta_i = min_{t >= i} max_{s <= i} Av(s, t). O(K^2) reference for pava.
Vector minmax_project(const WeightedSeries& series);

struct SplitConsistency {
  bool consistent = false;
  /// Smallest split: size of the left block (1..K-1) satisfying
  /// max_{s <= i} Av(s, i) < min_{t > i} Av(i+1, t).
  std::optional<Index> split;
};

/// Consistency condition for the simple order, strict inequality.
SplitConsistency simple_order_consistency(const WeightedSeries& theta);

/// theta_1 < max(theta_2, ..., theta_K).
bool tree_order_consistency(const Vector& theta);

enum class UmbrellaBranch { none, up, down };

struct UmbrellaConsistency {
  bool consistent = false;
  /// The branch reported; up wins when both fire.
  UmbrellaBranch branch = UmbrellaBranch::none;
  bool up = false;
  bool down = false;
};

/// `peak` is zero-based. The up branch is the split condition on
/// values[0..peak]; the down branch the reversed condition on
/// values[peak..K-1].
UmbrellaConsistency umbrella_consistency(const WeightedSeries& theta, Index peak);

}  // namespace ortest
