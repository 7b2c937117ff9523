#include "ortest/special.hpp"

#include <cmath>
#include <limits>

#include "ortest/error.hpp"

namespace ortest {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxTerms = 2000;

// Series for P(a, x), good for x < a + 1.
double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxTerms; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), good for x >= a + 1.
double upper_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  require(a > 0.0 && x >= 0.0, "gamma_p: need a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? lower_series(a, x) : 1.0 - upper_fraction(a, x);
}

double gamma_q(double a, double x) {
  require(a > 0.0 && x >= 0.0, "gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - lower_series(a, x) : upper_fraction(a, x);
}

double chi_square_sf(int k, double t) {
  require(k >= 0, "chi-square degrees of freedom must be nonnegative");
  if (k == 0) return t <= 0.0 ? 1.0 : 0.0;
  if (t <= 0.0) return 1.0;
  return gamma_q(0.5 * k, 0.5 * t);
}

double chi_square_cdf(int k, double t) {
  require(k >= 0, "chi-square degrees of freedom must be nonnegative");
  if (k == 0) return t > 0.0 ? 1.0 : 0.0;
  if (t <= 0.0) return 0.0;
  return gamma_p(0.5 * k, 0.5 * t);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace ortest
