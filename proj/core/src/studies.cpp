#include "ortest/studies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ortest/chibar.hpp"
#include "ortest/detail/parallel.hpp"
#include "ortest/error.hpp"
#include "ortest/projection.hpp"

namespace ortest {
namespace {

constexpr std::uint64_t kPowerChunk = 4096;

// [mean][gamma][n10 dt, n10 safe, n20 dt, n20 safe, n50 dt, n50 safe]
constexpr double kTable3[7][3][6] = {
    {{0.050, 0.048, 0.050, 0.049, 0.050, 0.048},
     {0.050, 0.049, 0.050, 0.049, 0.050, 0.049},
     {0.050, 0.050, 0.050, 0.050, 0.050, 0.050}},
    {{0.705, 0.705, 0.931, 0.931, 1.000, 1.000},
     {0.706, 0.706, 0.932, 0.932, 1.000, 1.000},
     {0.706, 0.706, 0.932, 0.932, 1.000, 1.000}},
    {{0.693, 0.687, 0.928, 0.924, 1.000, 0.999},
     {0.693, 0.691, 0.928, 0.927, 1.000, 0.999},
     {0.693, 0.693, 0.928, 0.928, 1.000, 1.000}},
    {{0.666, 0.640, 0.917, 0.879, 1.000, 0.957},
     {0.665, 0.652, 0.917, 0.899, 1.000, 0.980},
     {0.666, 0.664, 0.917, 0.914, 1.000, 0.996}},
    {{0.608, 0.528, 0.885, 0.711, 0.999, 0.635},
     {0.609, 0.565, 0.885, 0.782, 0.999, 0.752},
     {0.609, 0.598, 0.885, 0.856, 0.999, 0.907}},
    {{0.353, 0.182, 0.624, 0.160, 0.955, 0.020},
     {0.354, 0.230, 0.623, 0.234, 0.955, 0.043},
     {0.354, 0.299, 0.624, 0.392, 0.955, 0.140}},
    {{0.193, 0.071, 0.352, 0.041, 0.724, 0.002},
     {0.192, 0.096, 0.352, 0.070, 0.724, 0.004},
     {0.192, 0.143, 0.352, 0.147, 0.724, 0.021}},
};

struct Thresholds {
  double c_alpha;
  double c_gamma;
  double c_safe;
};

Thresholds thresholds_for(const Metric& sigma, double alpha, double gamma) {
  const Index m = sigma.dim();
  const ChiBarWeights w = cone_weights(Matrix::Identity(m, m), sigma);
  Thresholds t;
  t.c_alpha = solve_critical(w, alpha);
  t.c_gamma = solve_critical(w.reversed(), gamma);
  t.c_safe = solve_critical(w, alpha, Joint{t.c_gamma, 0});
  return t;
}

struct Tally {
  std::uint64_t dt = 0;
  std::uint64_t safe = 0;
};

}  // namespace

double binomial_se(double p, std::uint64_t reps) {
  if (reps == 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(reps));
}

PowerResult run_power_scenario(const PowerScenario& scn) {
  const Index m = scn.theta.size();
  require(m >= 1 && m == scn.sigma.dim(), "scenario mean and covariance dimensions differ");
  require(scn.n >= 1, "sample size must be positive");
  require(scn.replications >= 1, "replications must be positive");
  require(scn.alpha > 0.0 && scn.alpha < 1.0 && scn.gamma > 0.0 && scn.gamma < 1.0,
          "levels must lie in (0, 1)");
  const bool sample = scn.covariance == CovarianceMode::sample;
  if (sample) {
    require(m <= 2, "sample-covariance mode supports at most two means");
    require(scn.n > m, "sample-covariance mode needs n > dimension");
  }

  const Thresholds known = thresholds_for(scn.sigma, scn.alpha, scn.gamma);
  const ConeSpec orthant = ConeSpec::orthant(m);
  const ConeProjector known_projector(orthant, scn.sigma);
  const Matrix& lower = scn.sigma.lower();
  const double n = static_cast<double>(scn.n);

  const auto parts = detail::chunked<Tally>(scn.replications, kPowerChunk, scn.threads,
      [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
        Tally tally;
        GaussianStream stream(derive_seed(scn.seed, chunk));
        Vector z_sum(m);
        Matrix scatter(m, m);
        for (std::uint64_t r = begin; r < end; ++r) {
          Vector mean = Vector::Zero(m);
          scatter.setZero();
          for (long i = 0; i < scn.n; ++i) {
            const Vector x = stream.correlated(scn.theta, lower);
            mean += x;
            if (sample) scatter += x * x.transpose();
          }
          mean /= n;

          double t, t_prime;
          Thresholds th = known;
          if (sample) {
            const Matrix cov = (scatter - n * mean * mean.transpose()) / (n - 1.0);
            const Metric metric(cov);
            th = thresholds_for(metric, scn.alpha, scn.gamma);
            const Vector proj = project_cone(mean, orthant, metric);
            t = n * metric.norm_sq(proj);
            t_prime = n * metric.norm_sq(mean - proj);
          } else {
            const Vector proj = known_projector(mean);
            t = n * scn.sigma.norm_sq(proj);
            t_prime = n * scn.sigma.norm_sq(mean - proj);
          }
          const double t_safe = t_prime < th.c_gamma ? t : 0.0;
          const double cut = scn.threshold == ThresholdMode::adjusted ? th.c_safe : th.c_alpha;
          if (t >= th.c_alpha) ++tally.dt;
          if (t_safe >= cut) ++tally.safe;
        }
        return tally;
      });

  Tally total;
  for (const Tally& t : parts) {
    total.dt += t.dt;
    total.safe += t.safe;
  }
  PowerResult out;
  const double reps = static_cast<double>(scn.replications);
  out.power_dt = static_cast<double>(total.dt) / reps;
  out.power_safe = static_cast<double>(total.safe) / reps;
  out.se_dt = binomial_se(out.power_dt, scn.replications);
  out.se_safe = binomial_se(out.power_safe, scn.replications);
  out.se = std::max(out.se_dt, out.se_safe);
  out.replications = scn.replications;
  out.seed = scn.seed;
  if (!sample) {
    out.c_alpha = known.c_alpha;
    out.c_gamma = known.c_gamma;
    out.c_safe = scn.threshold == ThresholdMode::adjusted ? known.c_safe : known.c_alpha;
  }
  return out;
}

std::vector<MeanSetting> table2_means() {
  std::vector<MeanSetting> out;
  out.push_back({"theta0", std::nullopt, Vector::Zero(2)});
  const double angles[] = {45.0, 15.0, 0.0, -15.0, -45.0, -60.0};
  for (int i = 0; i < 6; ++i) {
    const double rad = angles[i] * std::numbers::pi / 180.0;
    Vector theta(2);
    theta << kTable2Radius * std::cos(rad), kTable2Radius * std::sin(rad);
    out.push_back({"theta" + std::to_string(i + 1), angles[i], theta});
  }
  return out;
}

PowerReference table3_reference(int mean, int gamma, int size) {
  require(mean >= 0 && mean < 7 && gamma >= 0 && gamma < 3 && size >= 0 && size < 3,
          "power table index out of range");
  const double* row = kTable3[mean][gamma];
  return {row[2 * size], row[2 * size + 1]};
}

std::vector<PowerCell> run_power_grid(const PowerGridConfig& cfg) {
  const auto means = table2_means();
  auto wanted = [](const auto& subset, const auto& value) {
    return subset.empty() || std::find(subset.begin(), subset.end(), value) != subset.end();
  };
  std::vector<PowerCell> cells;
  for (int i = 0; i < 7; ++i) {
    if (!wanted(cfg.means, i)) continue;
    for (int g = 0; g < 3; ++g) {
      if (!wanted(cfg.gammas, kTable3Gammas[g])) continue;
      for (int k = 0; k < 3; ++k) {
        if (!wanted(cfg.sizes, kTable3Sizes[k])) continue;
        PowerScenario scn{
            .label = means[i].label,
            .theta = means[i].theta,
            .sigma = Metric::identity(2),
            .n = kTable3Sizes[k],
            .alpha = cfg.alpha,
            .gamma = kTable3Gammas[g],
            .replications = cfg.replications,
            .seed = derive_seed(cfg.seed, std::uint64_t(100 * i + 10 * g + k)),
            .threshold = cfg.threshold,
            .covariance = CovarianceMode::known,
            .threads = cfg.threads,
        };
        cells.push_back({i, means[i].label, scn.gamma, scn.n, run_power_scenario(scn)});
      }
    }
  }
  return cells;
}

void ContingencyTable2xK::validate() const {
  require(control.size() == treatment.size(), "control and treatment rows differ in length");
  require(control.size() >= 2, "a contingency table needs at least two categories");
  require(labels.empty() || labels.size() == control.size(), "label count differs from categories");
  long n1 = 0, n2 = 0;
  for (std::size_t j = 0; j < control.size(); ++j) {
    require(control[j] >= 0 && treatment[j] >= 0, "cell counts must be nonnegative");
    n1 += control[j];
    n2 += treatment[j];
  }
  require(n1 >= 1 && n2 >= 1, "each row needs at least one observation");
}

StochasticOrderProblem build_stochastic_order(const ContingencyTable2xK& table) {
  table.validate();
  const Index k = static_cast<Index>(table.categories());
  const Index q = k - 1;
  long n1 = 0, n2 = 0;
  for (Index j = 0; j < k; ++j) {
    n1 += table.control[j];
    n2 += table.treatment[j];
  }
  const long n = n1 + n2;

  Vector theta(2 * q);
  Vector pooled(q);
  long c1 = 0, c2 = 0;
  for (Index j = 0; j < q; ++j) {
    c1 += table.control[j];
    c2 += table.treatment[j];
    theta(j) = double(c1) / double(n1);
    theta(q + j) = double(c2) / double(n2);
    pooled(j) = double(c1 + c2) / double(n);
    if (pooled(j) <= 0.0 || pooled(j) >= 1.0) {
      throw NumericError("degenerate pooled proportion " + std::to_string(pooled(j)) +
                         " at category " + std::to_string(j + 1) + "; the null covariance is singular");
    }
  }

  // Cov(F_a, F_b) = F_min (1 - F_max) for cumulative multinomial proportions.
  Matrix sigma0(q, q);
  for (Index a = 0; a < q; ++a) {
    for (Index b = 0; b < q; ++b) sigma0(a, b) = pooled(std::min(a, b)) * (1.0 - pooled(std::max(a, b)));
  }
  Matrix sigma = Matrix::Zero(2 * q, 2 * q);
  sigma.topLeftCorner(q, q) = (double(n) / double(n1)) * sigma0;
  sigma.bottomRightCorner(q, q) = (double(n) / double(n2)) * sigma0;

  Matrix r(q, 2 * q);
  r << Matrix::Identity(q, q), -Matrix::Identity(q, q);

  ConeSpec cone = ConeSpec::polyhedral(r);
  LinearSubspace null_space = cone.lineality();
  Vector w = r * theta;
  Matrix v = r * sigma * r.transpose();
  return StochasticOrderProblem{theta, r, sigma0, Metric(sigma), n, n1, n2, w, v,
                                std::move(cone), std::move(null_space)};
}

ContingencyTable2xK doubled_table(const ContingencyTable2xK& table) {
  ContingencyTable2xK out = table;
  for (auto& c : out.control) c *= 2;
  for (auto& c : out.treatment) c *= 2;
  return out;
}

ContingencyTable2xK cs_table5() { return {{5, 11, 1}, {3, 8, 4}, {"Worse", "Same", "Better"}}; }

ContingencyTable2xK cs_table6() { return {{0, 16, 1}, {8, 3, 4}, {"Worse", "Same", "Better"}}; }

SilvapulleCase silvapulle_case(double rho) {
  Vector mean(2);
  mean << -3.0, -2.0;
  return SilvapulleCase{Statistic(mean, Metric::interclass(rho), 5), rho, LinearSubspace::zero(2),
                        ConeSpec::orthant(2), SilvapulleAnchors{}};
}

}  // namespace ortest
