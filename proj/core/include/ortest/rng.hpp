#pragma once

#include <cstdint>
#include <random>

#include "ortest/metric.hpp"

namespace ortest {

/// Default seed used by every stochastic routine when none is given.
inline constexpr std::uint64_t kDefaultSeed = 20240517ULL;

/// One step of the splitmix64 generator; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for stream `index` derived from `base`. Distinct indices give
/// decorrelated mt19937_64 seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Standard normals from mt19937_64 through the Marsaglia polar method.
///
/// std::normal_distribution is implementation-defined, so the transform is
/// written out to keep draws identical across standard libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next();
  /// A vector of independent standard normals.
  Vector standard(Index dim);
  /// mean + L z with L the lower Cholesky factor of the covariance.
  Vector correlated(const Vector& mean, const Matrix& lower);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  double uniform();

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ortest
