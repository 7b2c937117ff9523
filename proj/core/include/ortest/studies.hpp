#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ortest/cone.hpp"
#include "ortest/metric.hpp"
#include "ortest/rng.hpp"
#include "ortest/subspace.hpp"
#include "ortest/testing.hpp"

namespace ortest {

// ---------------------------------------------------------------------------
// Power simulation

enum class CovarianceMode {
  /// Sigma_n is the true covariance.
  known,
  /// Sigma_n is the sample covariance of each replication (m <= 2).
  sample,
};

/// Canonical problem H0: theta = 0 against theta in the nonnegative orthant,
/// observations N(theta, sigma).
struct PowerScenario {
  std::string label;
  Vector theta;
  Metric sigma;
  long n = 10;
  double alpha = 0.05;
  double gamma = 0.1;
  std::uint64_t replications = 100'000;
  std::uint64_t seed = kDefaultSeed;
  ThresholdMode threshold = ThresholdMode::adjusted;
  CovarianceMode covariance = CovarianceMode::known;
  unsigned threads = 1;
};

struct PowerResult {
  double power_dt = 0.0;
  double power_safe = 0.0;
  double se_dt = 0.0;
  double se_safe = 0.0;
  /// max(se_dt, se_safe).
  double se = 0.0;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  /// Critical values under the known covariance (zero in sample mode);
  /// c_safe is the threshold applied to T_SAFE.
  double c_alpha = 0.0;
  double c_gamma = 0.0;
  double c_safe = 0.0;
};

/// Rejection frequencies of T_n >= c_alpha and of T_SAFE against its
/// threshold. Each replication draws n observations; replications are
/// chunked with seeds derived from (seed, chunk), so results do not depend on
/// `threads`.
PowerResult run_power_scenario(const PowerScenario& scn);

/// sqrt(p (1 - p) / reps); zero when reps is zero.
double binomial_se(double p, std::uint64_t reps);

/// Radius of the non-null mean settings.
inline constexpr double kTable2Radius = 0.75;

struct MeanSetting {
  std::string label;
  /// Degrees from e_1; empty for the null mean.
  std::optional<double> angle;
  Vector theta;
};

/// theta_0 = 0 and theta_1..theta_6 at 45, 15, 0, -15, -45, -60 degrees.
std::vector<MeanSetting> table2_means();

inline constexpr std::array<double, 3> kTable3Gammas{0.1, 0.05, 0.01};
inline constexpr std::array<long, 3> kTable3Sizes{10, 20, 50};

struct PowerReference {
  double dt;
  double safe;
};

/// Published power for mean i (0..6), gamma index g and size index k.
PowerReference table3_reference(int mean, int gamma, int size);

struct PowerCell {
  int mean = 0;
  std::string label;
  double gamma = 0.0;
  long n = 0;
  PowerResult result;
};

struct PowerGridConfig {
  std::uint64_t replications = 100'000;
  std::uint64_t seed = kDefaultSeed;
  ThresholdMode threshold = ThresholdMode::adjusted;
  double alpha = 0.05;
  unsigned threads = 1;
  /// Subsets to run; empty means all.
  std::vector<int> means;
  std::vector<double> gammas;
  std::vector<long> sizes;
};

/// Runs the (mean, gamma, n) grid with identity covariance. Cell seeds are
/// derive_seed(seed, 100 mean + 10 gamma_index + size_index) using the
/// positions in the full grid, so a subset reproduces the full run.
std::vector<PowerCell> run_power_grid(const PowerGridConfig& cfg);

// ---------------------------------------------------------------------------
// Contingency tables

/// Two multinomial samples over K ordered categories (worst to best).
struct ContingencyTable2xK {
  std::vector<long> control;
  std::vector<long> treatment;
  std::vector<std::string> labels;

  std::size_t categories() const noexcept { return control.size(); }
  /// Throws ContractError unless rows agree in length, K >= 2, counts are
  /// nonnegative, row sums positive and labels (if any) number K.
  void validate() const;
};

/// Test of P =st Q against P <st Q via cumulative proportions.
struct StochasticOrderProblem {
  /// (F_control(1..K-1), F_treatment(1..K-1)).
  Vector theta_hat;
  /// [I, -I], (K-1) x 2(K-1).
  Matrix restriction;
  /// Pooled null covariance of one row's cumulative proportions.
  Matrix sigma0;
  /// BlockDiag((n/n1) sigma0, (n/n2) sigma0).
  Metric sigma_n;
  long n = 0;
  long n1 = 0;
  long n2 = 0;
  /// R theta_hat.
  Vector w_n;
  /// R Sigma_n R'.
  Matrix v_n;
  ConeSpec cone;
  /// {theta : R theta = 0}.
  LinearSubspace null_space;

  Statistic statistic() const { return Statistic(theta_hat, sigma_n, n); }
};

/// Throws NumericError when a pooled cumulative proportion is 0 or 1.
StochasticOrderProblem build_stochastic_order(const ContingencyTable2xK& table);

/// Every cell doubled.
ContingencyTable2xK doubled_table(const ContingencyTable2xK& table);

ContingencyTable2xK cs_table5();
ContingencyTable2xK cs_table6();

struct TableAnchors {
  double alpha_star;
  double gamma_star;
};

inline constexpr TableAnchors kTable5Anchors{0.12, 0.96};
inline constexpr TableAnchors kTable6Anchors{0.01, 0.001};
inline constexpr TableAnchors kTable5DoubledAnchors{0.03, 0.96};
/// Published V_n entries (1,1), (1,2), (2,2).
inline constexpr std::array<double, 3> kPublishedV{0.75, 0.16, 0.53};

// ---------------------------------------------------------------------------
// Two correlated means

struct SilvapulleAnchors {
  double t_n = 12.89;
  double c_05 = 4.915;
  double alpha_star_below = 1e-3;
  double gamma_star_below = 1e-6;
};

struct SilvapulleCase {
  Statistic stat;
  double rho;
  LinearSubspace null_space;
  ConeSpec cone;
  SilvapulleAnchors anchors;
};

/// n = 5, mean (-3, -2), Sigma = [[1, rho], [rho, 1]]; testing theta = 0
/// against the nonnegative quadrant.
SilvapulleCase silvapulle_case(double rho = 0.9);

}  // namespace ortest
