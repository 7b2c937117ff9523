#include "ortest/rng.hpp"

#include <cmath>

namespace ortest {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t state = base;
  const std::uint64_t mixed = splitmix64(state);
  state = mixed ^ (index * 0xD1B54A32D192ED03ULL);
  return splitmix64(state);
}

double GaussianStream::uniform() {
  // 53 random bits mapped to (-1, 1).
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = uniform();
    v = uniform();
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

Vector GaussianStream::standard(Index dim) {
  Vector z(dim);
  for (Index i = 0; i < dim; ++i) z(i) = next();
  return z;
}

Vector GaussianStream::correlated(const Vector& mean, const Matrix& lower) {
  return mean + lower.triangularView<Eigen::Lower>() * standard(mean.size());
}

}  // namespace ortest
