#pragma once

namespace ortest {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed directly
/// in the tail to keep relative accuracy.
double gamma_q(double a, double x);

/// P(chi2_k >= t). k = 0 is the point mass at zero: 1 if t <= 0 else 0.
double chi_square_sf(int k, double t);
/// P(chi2_k < t). k = 0: 1 if t > 0 else 0.
double chi_square_cdf(int k, double t);

/// 1 - Phi(z) and Phi(z).
double normal_sf(double z);
double normal_cdf(double z);

}  // namespace ortest
