#include "ortest/isotonic.hpp"

#include <algorithm>
#include <limits>

#include "ortest/error.hpp"

namespace ortest {

WeightedSeries::WeightedSeries(Vector v, Vector w) : values(std::move(v)), weights(std::move(w)) {
  require(values.size() == weights.size(), "values and weights differ in length");
  require(values.allFinite(), "series values must be finite");
  require(weights.allFinite() && (weights.array() > 0.0).all(), "weights must be positive");
}

WeightedSeries WeightedSeries::unweighted(Vector values) {
  Vector w = Vector::Ones(values.size());
  return WeightedSeries(std::move(values), std::move(w));
}

double av(const WeightedSeries& series, Index u, Index v) {
  require(u >= 0 && u <= v && v < series.size(), "av: index out of range");
  const auto w = series.weights.segment(u, v - u + 1);
  return w.dot(series.values.segment(u, v - u + 1)) / w.sum();
}

IsotonicFit pava(const WeightedSeries& series) {
  struct Block {
    double mean;
    double weight;
    Index first;
    Index last;
  };
  const Index k = series.size();
  std::vector<Block> stack;
  stack.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    Block b{series.values(i), series.weights(i), i, i};
    while (!stack.empty() && stack.back().mean >= b.mean) {
      const Block& top = stack.back();
      const double w = top.weight + b.weight;
      b = Block{(top.mean * top.weight + b.mean * b.weight) / w, w, top.first, b.last};
      stack.pop_back();
    }
    stack.push_back(b);
  }

  IsotonicFit fit;
  fit.fitted.resize(k);
  for (const Block& b : stack) {
    fit.fitted.segment(b.first, b.last - b.first + 1).setConstant(b.mean);
    fit.level_sets.push_back({b.first, b.last});
  }
  fit.objective =
      (series.weights.array() * (series.values - fit.fitted).array().square()).sum();
  return fit;
}

Vector minmax_project(const WeightedSeries& series) {
  const Index k = series.size();
  // Prefix sums make each Av(s, t) O(1).
  Vector sw = Vector::Zero(k + 1);
  Vector swx = Vector::Zero(k + 1);
  for (Index i = 0; i < k; ++i) {
    sw(i + 1) = sw(i) + series.weights(i);
    swx(i + 1) = swx(i) + series.weights(i) * series.values(i);
  }
  auto block = [&](Index s, Index t) { return (swx(t + 1) - swx(s)) / (sw(t + 1) - sw(s)); };

  Vector out(k);
  for (Index i = 0; i < k; ++i) {
    double lo = std::numeric_limits<double>::infinity();
    for (Index t = i; t < k; ++t) {
      double hi = -std::numeric_limits<double>::infinity();
      for (Index s = 0; s <= i; ++s) hi = std::max(hi, block(s, t));
      lo = std::min(lo, hi);
    }
    out(i) = lo;
  }
  return out;
}

namespace {

std::optional<Index> first_split(const WeightedSeries& theta) {
  const Index k = theta.size();
  for (Index i = 1; i < k; ++i) {
    double left = -std::numeric_limits<double>::infinity();
    for (Index s = 0; s < i; ++s) left = std::max(left, av(theta, s, i - 1));
    double right = std::numeric_limits<double>::infinity();
    for (Index t = i; t < k; ++t) right = std::min(right, av(theta, i, t));
    if (left < right) return i;
  }
  return std::nullopt;
}

WeightedSeries slice(const WeightedSeries& s, Index first, Index count, bool negate) {
  Vector v = s.values.segment(first, count);
  if (negate) v = -v;
  return WeightedSeries(std::move(v), s.weights.segment(first, count));
}

}  // namespace

SplitConsistency simple_order_consistency(const WeightedSeries& theta) {
  require(theta.size() >= 2, "consistency check needs at least two means");
  SplitConsistency out;
  out.split = first_split(theta);
  out.consistent = out.split.has_value();
  return out;
}

bool tree_order_consistency(const Vector& theta) {
  require(theta.size() >= 2, "consistency check needs at least two means");
  return theta(0) < theta.tail(theta.size() - 1).maxCoeff();
}

UmbrellaConsistency umbrella_consistency(const WeightedSeries& theta, Index peak) {
  const Index k = theta.size();
  require(peak >= 0 && peak < k, "umbrella peak out of range");
  UmbrellaConsistency out;
  if (peak >= 1) out.up = first_split(slice(theta, 0, peak + 1, false)).has_value();
  // Decreasing on the down branch: negate and reuse the increasing condition.
  if (peak + 1 < k) out.down = first_split(slice(theta, peak, k - peak, true)).has_value();
  out.consistent = out.up || out.down;
  out.branch = out.up ? UmbrellaBranch::up : (out.down ? UmbrellaBranch::down : UmbrellaBranch::none);
  return out;
}

}  // namespace ortest
