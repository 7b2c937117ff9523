#include "ortest_cli/cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ortest/chibar.hpp"
#include "ortest/error.hpp"
#include "ortest/rng.hpp"
#include "ortest/studies.hpp"
#include "ortest/testing.hpp"
#include "ortest/version.hpp"
#include "ortest_cli/input.hpp"
#include "ortest_cli/report.hpp"

namespace ortest::cli {
namespace {

constexpr double kDefaultAlpha = 0.05;
constexpr double kDefaultGamma = 0.05;

struct Options {
  std::string input;
  std::string case_name;
  std::optional<double> alpha;
  std::optional<double> gamma;
  std::optional<std::uint64_t> mc_n;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string threshold = "adjusted";
  std::string weights = "auto";
  std::string out;
  std::string format = "json";
  std::string problem = "a";
  // power
  std::uint64_t reps = 100'000;
  std::vector<int> means;
  std::vector<double> gammas;
  std::vector<long> sizes;
  // weights
  std::optional<double> rho;
  std::optional<long> identity;
};

Json header(const std::string& command) {
  Json j = Json::object();
  j["tool"] = "ortest";
  j["version"] = kVersion;
  j["command"] = command;
  return j;
}

std::string_view source_name(WeightSource s) {
  return s == WeightSource::closed_form ? "closed_form" : "monte_carlo";
}

Json weights_json(const ChiBarWeights& w) {
  Json j = Json::object();
  j["values"] = to_json(w.w);
  j["source"] = source_name(w.source);
  j["replications"] = w.replications;
  j["seed"] = w.seed;
  return j;
}

WeightConfig weight_config(const Options& o, const ProblemInput* in) {
  WeightConfig cfg;
  if (o.weights == "closed") cfg.method = WeightConfig::Method::closed_form;
  if (o.weights == "mc") cfg.method = WeightConfig::Method::monte_carlo;
  cfg.replications = o.mc_n.value_or(in && in->mc_n ? *in->mc_n : cfg.replications);
  cfg.seed = o.seed.value_or(in && in->mc_seed ? *in->mc_seed : kDefaultSeed);
  cfg.threads = o.threads;
  return cfg;
}

ProblemInput load_input(const Options& o) {
  if (o.input.empty() == o.case_name.empty()) {
    throw InputError("exactly one of --input and --case is required");
  }
  return o.input.empty() ? builtin_case(o.case_name) : load_problem(read_document(o.input));
}

void emit_report(const Options& o, const Json& doc, std::ostream& out) {
  if (o.out.empty()) return;
  write_atomically(o.out, dump_report(doc));
  fmt::print(out, "report written to {}\n", o.out);
}

void check_format(const Options& o, bool tabular) {
  if (o.format != "json" && !(tabular && o.format == "csv")) {
    throw InputError("--format " + o.format + " is not available for this command");
  }
  if (!o.out.empty()) check_output_path(o.out);
}

Json ordering_json(const StochasticOrderProblem& p) {
  Json j = Json::object();
  j["theta_hat"] = to_json(p.theta_hat);
  j["w_n"] = to_json(p.w_n);
  j["v_n"] = to_json(p.v_n);
  j["sigma0"] = to_json(p.sigma0);
  j["n"] = p.n;
  return j;
}

int cmd_safe_test(const Options& o, const std::string& command, std::ostream& out) {
  check_format(o, false);
  ProblemInput in = load_input(o);
  const double alpha = o.alpha.value_or(in.alpha.value_or(kDefaultAlpha));
  const double gamma = o.gamma.value_or(in.gamma.value_or(kDefaultGamma));
  SafeOptions opts;
  opts.weights = weight_config(o, &in);
  opts.threshold = o.threshold == "unadjusted" ? ThresholdMode::unadjusted : ThresholdMode::adjusted;

  const SafeOutcome r = safe_test(*in.stat, *in.sub, *in.cone, alpha, gamma, opts);

  Json doc = header(command);
  doc["case"] = in.name;
  doc["inputs"] = in.echo;
  Json settings = Json::object();
  settings["alpha"] = alpha;
  settings["gamma"] = gamma;
  settings["threshold"] = o.threshold;
  settings["weights"] = o.weights;
  settings["mc_n"] = opts.weights.replications;
  settings["seed"] = opts.weights.seed;
  doc["settings"] = settings;
  if (in.ordering) doc["stochastic_order"] = ordering_json(*in.ordering);
  Json res = Json::object();
  res["t_n"] = r.original.statistic;
  res["t_prime"] = r.auxiliary.statistic;
  res["alpha_star"] = r.original.p_value;
  res["gamma_star"] = r.auxiliary.p_value;
  res["c_alpha"] = r.original.critical_value;
  res["c_gamma"] = r.auxiliary.critical_value;
  res["c_alpha_safe"] = r.c_alpha_safe;
  res["alpha_safe"] = r.alpha_safe;
  res["t_safe"] = r.t_safe;
  res["safe_threshold"] = r.safe_threshold;
  res["d1"] = r.d1 ? 1 : 0;
  res["d2"] = r.d2 ? 1 : 0;
  res["conclusion_code"] = conclusion_code(r.conclusion);
  res["conclusion"] = conclusion_text(r.conclusion);
  doc["results"] = res;
  // Orthant weights of the cone; the auxiliary test uses them reversed.
  doc["weights"] = weights_json(r.auxiliary.weights_used.reversed());

  fmt::print(out, "case            {}\n", in.name);
  fmt::print(out, "T_n             {:.6f}   alpha* = {:.6g}   c_alpha = {:.6f}\n", r.original.statistic,
             r.original.p_value, r.original.critical_value);
  fmt::print(out, "T'_n            {:.6f}   gamma* = {:.6g}   c'_gamma = {:.6f}\n", r.auxiliary.statistic,
             r.auxiliary.p_value, r.auxiliary.critical_value);
  fmt::print(out, "T_SAFE          {:.6f}   c_alpha^SAFE = {:.6f}   alpha^SAFE = {:.6f}\n", r.t_safe,
             r.c_alpha_safe, r.alpha_safe);
  fmt::print(out, "alpha = {}, gamma = {}, D1 = {}, D2 = {}\n", alpha, gamma, int(r.d1), int(r.d2));
  fmt::print(out, "{}\n", conclusion_text(r.conclusion));
  emit_report(o, doc, out);
  return kExitOk;
}

int cmd_dt(const Options& o, std::ostream& out) {
  check_format(o, false);
  ProblemInput in = load_input(o);
  const WeightConfig cfg = weight_config(o, &in);
  const bool type_a = o.problem == "a";
  const double level = type_a ? o.alpha.value_or(in.alpha.value_or(kDefaultAlpha))
                              : o.gamma.value_or(in.gamma.value_or(kDefaultGamma));
  const ChiBarWeights base = cone_weights(in.cone->restriction(), in.stat->sigma_n, cfg);

  double t, p, c;
  ChiBarWeights used = base;
  if (type_a) {
    used = base.shifted(lineality_excess(*in.sub, *in.cone));
    t = dt_type_a(*in.stat, *in.sub, *in.cone);
    p = p_value(t, used, TestKind::type_a);
    c = solve_critical(used, level);
  } else {
    t = dt_type_b(*in.stat, *in.cone);
    p = p_value(t, base, TestKind::type_b);
    c = solve_critical(base.reversed(), level);
  }

  Json doc = header("dt");
  doc["case"] = in.name;
  doc["inputs"] = in.echo;
  Json settings = Json::object();
  settings["problem"] = type_a ? "type_a" : "type_b";
  settings["level"] = level;
  settings["weights"] = o.weights;
  settings["mc_n"] = cfg.replications;
  settings["seed"] = cfg.seed;
  doc["settings"] = settings;
  Json res = Json::object();
  res["statistic"] = t;
  res["p_value"] = p;
  res["critical_value"] = c;
  res["reject"] = t >= c ? 1 : 0;
  doc["results"] = res;
  doc["weights"] = weights_json(used);

  fmt::print(out, "{} distance test: statistic = {:.6f}, p-value = {:.6g}, critical value = {:.6f}\n",
             type_a ? "Type A" : "Type B", t, p, c);
  fmt::print(out, "{}\n", t >= c ? "Reject the null." : "Do not reject the null.");
  emit_report(o, doc, out);
  return kExitOk;
}

std::string csv_double(double v) { return fmt::format("{}", v); }

int cmd_power(const Options& o, std::ostream& out) {
  check_format(o, true);
  PowerGridConfig cfg;
  cfg.replications = o.reps;
  cfg.seed = o.seed.value_or(kDefaultSeed);
  cfg.threshold = o.threshold == "unadjusted" ? ThresholdMode::unadjusted : ThresholdMode::adjusted;
  cfg.alpha = o.alpha.value_or(kDefaultAlpha);
  cfg.threads = o.threads;
  cfg.means = o.means;
  cfg.gammas = o.gammas;
  cfg.sizes = o.sizes;
  for (int m : cfg.means) {
    if (m < 0 || m > 6) throw InputError("--means entries must lie in 0..6");
  }
  for (double g : cfg.gammas) {
    if (std::find(kTable3Gammas.begin(), kTable3Gammas.end(), g) == kTable3Gammas.end()) {
      throw InputError("--gammas entries must be among 0.1, 0.05, 0.01");
    }
  }
  for (long n : cfg.sizes) {
    if (std::find(kTable3Sizes.begin(), kTable3Sizes.end(), n) == kTable3Sizes.end()) {
      throw InputError("--sizes entries must be among 10, 20, 50");
    }
  }
  if (cfg.replications < 1) throw InputError("--reps must be positive");

  const auto cells = run_power_grid(cfg);

  fmt::print(out, "{:<8} {:>5} {:>4} {:>9} {:>9} {:>9} {:>9}\n", "mean", "gamma", "n", "power_dt", "ref_dt",
             "power_sf", "ref_sf");
  for (const auto& cell : cells) {
    const int g = int(std::find(kTable3Gammas.begin(), kTable3Gammas.end(), cell.gamma) - kTable3Gammas.begin());
    const int k = int(std::find(kTable3Sizes.begin(), kTable3Sizes.end(), cell.n) - kTable3Sizes.begin());
    const PowerReference ref = table3_reference(cell.mean, g, k);
    fmt::print(out, "{:<8} {:>5} {:>4} {:>9.4f} {:>9.3f} {:>9.4f} {:>9.3f}\n", cell.label, cell.gamma, cell.n,
               cell.result.power_dt, ref.dt, cell.result.power_safe, ref.safe);
  }

  if (o.out.empty()) return kExitOk;
  if (o.format == "csv") {
    std::string text = "mean_label,gamma,n,power_dt,power_safe,se,replications,seed\n";
    for (const auto& cell : cells) {
      text += fmt::format("{},{},{},{},{},{},{},{}\n", cell.label, csv_double(cell.gamma), cell.n,
                          csv_double(cell.result.power_dt), csv_double(cell.result.power_safe),
                          csv_double(cell.result.se), cell.result.replications, cell.result.seed);
    }
    write_atomically(o.out, text);
    fmt::print(out, "table written to {}\n", o.out);
    return kExitOk;
  }
  Json doc = header("power");
  Json settings = Json::object();
  settings["alpha"] = cfg.alpha;
  settings["replications"] = cfg.replications;
  settings["seed"] = cfg.seed;
  settings["threshold"] = o.threshold;
  doc["settings"] = settings;
  Json rows = Json::array();
  for (const auto& cell : cells) {
    Json row = Json::object();
    row["mean_label"] = cell.label;
    row["gamma"] = cell.gamma;
    row["n"] = cell.n;
    row["power_dt"] = cell.result.power_dt;
    row["power_safe"] = cell.result.power_safe;
    row["se"] = cell.result.se;
    row["replications"] = cell.result.replications;
    row["seed"] = cell.result.seed;
    rows.push_back(row);
  }
  doc["cells"] = rows;
  emit_report(o, doc, out);
  return kExitOk;
}

int cmd_weights(const Options& o, std::ostream& out) {
  check_format(o, true);
  const int sources = int(!o.input.empty()) + int(o.rho.has_value()) + int(o.identity.has_value());
  if (sources != 1) throw InputError("exactly one of --input, --rho and --identity is required");

  Matrix psi;
  if (o.rho) {
    if (!(std::abs(*o.rho) < 1.0)) throw InputError("--rho must lie in (-1, 1)");
    psi = Metric::interclass(*o.rho).sigma();
  } else if (o.identity) {
    if (*o.identity < 1) throw InputError("--identity must be positive");
    psi = Matrix::Identity(*o.identity, *o.identity);
  } else {
    const Json doc = read_document(o.input);
    if (!doc.is_object()) throw InputError("input document must be a JSON object");
    if (doc.contains("psi")) {
      psi = json_matrix(doc.at("psi"), "psi");
    } else if (doc.contains("sigma_n") && doc.contains("restriction")) {
      const Matrix sigma = json_matrix(doc.at("sigma_n"), "sigma_n");
      const Matrix r = json_matrix(doc.at("restriction"), "restriction");
      if (r.cols() != sigma.rows()) throw InputError("'restriction' columns must match 'sigma_n'");
      psi = r * sigma * r.transpose();
    } else if (doc.contains("sigma_n")) {
      psi = json_matrix(doc.at("sigma_n"), "sigma_n");
    } else {
      throw InputError("expected 'psi', or 'sigma_n' with an optional 'restriction'");
    }
    if (psi.rows() != psi.cols()) throw InputError("covariance must be square");
  }
  const std::uint64_t n = o.mc_n.value_or(1'000'000);
  const std::uint64_t seed = o.seed.value_or(kDefaultSeed);
  if (n < 1) throw InputError("--mc-n must be positive");
  const Metric metric(psi);
  const ChiBarWeights w = weights_monte_carlo(metric, n, seed, o.threads);
  std::optional<ChiBarWeights> exact;
  if (psi.rows() == 2) exact = weights_closed_form_2d(psi(0, 1) / std::sqrt(psi(0, 0) * psi(1, 1)));

  fmt::print(out, "{:>3} {:>12}{}\n", "j", "w_hat", exact ? fmt::format(" {:>12}", "closed_form") : "");
  for (Index j = 0; j < w.w.size(); ++j) {
    fmt::print(out, "{:>3} {:>12.6f}{}\n", j, w.w(j), exact ? fmt::format(" {:>12.6f}", exact->w(j)) : "");
  }
  fmt::print(out, "N = {}, seed = {}\n", n, seed);

  if (o.out.empty()) return kExitOk;
  if (o.format == "csv") {
    std::string text = exact ? "j,w_hat,closed_form,N,seed\n" : "j,w_hat,N,seed\n";
    for (Index j = 0; j < w.w.size(); ++j) {
      text += fmt::format("{},{}{},{},{}\n", j, csv_double(w.w(j)), exact ? "," + csv_double(exact->w(j)) : "",
                          n, seed);
    }
    write_atomically(o.out, text);
    fmt::print(out, "table written to {}\n", o.out);
    return kExitOk;
  }
  Json doc = header("weights");
  doc["psi"] = to_json(psi);
  doc["weights"] = weights_json(w);
  if (exact) doc["closed_form"] = to_json(exact->w);
  emit_report(o, doc, out);
  return kExitOk;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--seed", o.seed, "Seed for Monte Carlo draws (default " + std::to_string(kDefaultSeed) + ")");
  app->add_option("--threads", o.threads, "Worker threads, 0 = hardware concurrency")->default_val(0);
  app->add_option("--out", o.out, "Output file (written atomically)");
  app->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->default_val("json");
}

void add_test_options(CLI::App* app, Options& o, bool with_source) {
  if (with_source) {
    app->add_option("--input", o.input, "Input document (JSON)");
    app->add_option("--case", o.case_name, "Built-in case")
        ->check(CLI::IsMember({"silvapulle", "cs-table5", "cs-table6", "cs-table5-doubled"}));
  }
  app->add_option("--alpha", o.alpha, "Level of the original test")->check(CLI::Range(0.0, 1.0));
  app->add_option("--gamma", o.gamma, "Level of the auxiliary test")->check(CLI::Range(0.0, 1.0));
  app->add_option("--mc-n", o.mc_n, "Monte Carlo draws for chi-bar weights");
  app->add_option("--weights", o.weights, "Chi-bar weight method")
      ->check(CLI::IsMember({"auto", "closed", "mc"}))
      ->default_val("auto");
  app->add_option("--threshold", o.threshold, "Safe-test threshold")
      ->check(CLI::IsMember({"adjusted", "unadjusted"}))
      ->default_val("adjusted");
  add_common(app, o);
}

void check_open_levels(const Options& o) {
  for (const auto& level : {o.alpha, o.gamma}) {
    if (level && !(*level > 0.0 && *level < 1.0)) throw InputError("levels must lie strictly between 0 and 1");
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Order-restricted distance tests and the composite safe test", "ortest"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;

  auto* safe = app.add_subcommand("safe-test", "Run the safe test on an input document or built-in case");
  add_test_options(safe, o, true);

  auto* kase = app.add_subcommand("case", "Run the safe test on a built-in case");
  kase->add_option("name", o.case_name, "silvapulle | cs-table5 | cs-table6 | cs-table5-doubled")
      ->required()
      ->check(CLI::IsMember({"silvapulle", "cs-table5", "cs-table6", "cs-table5-doubled"}));
  add_test_options(kase, o, false);

  auto* dt = app.add_subcommand("dt", "Run a single distance test");
  add_test_options(dt, o, true);
  dt->add_option("--problem", o.problem, "a: L against C; b: C against everything")
      ->check(CLI::IsMember({"a", "b"}))
      ->default_val("a");

  auto* power = app.add_subcommand("power", "Power of the distance test and the safe test on the simulation grid");
  power->add_option("--reps", o.reps, "Replications per cell")->default_val(100000);
  power->add_option("--alpha", o.alpha, "Level")->check(CLI::Range(0.0, 1.0));
  power->add_option("--threshold", o.threshold, "Safe-test threshold")
      ->check(CLI::IsMember({"adjusted", "unadjusted"}))
      ->default_val("adjusted");
  power->add_option("--means", o.means, "Mean settings to run (0..6)")->delimiter(',');
  power->add_option("--gammas", o.gammas, "Auxiliary levels to run")->delimiter(',');
  power->add_option("--sizes", o.sizes, "Sample sizes to run")->delimiter(',');
  add_common(power, o);

  auto* weights = app.add_subcommand("weights", "Monte Carlo chi-bar-square weights");
  weights->add_option("--input", o.input, "Document with 'psi', or 'sigma_n' and optional 'restriction'");
  weights->add_option("--rho", o.rho, "Use [[1, rho], [rho, 1]]");
  weights->add_option("--identity", o.identity, "Use the p x p identity");
  weights->add_option("--mc-n", o.mc_n, "Monte Carlo draws (default 1000000)");
  add_common(weights, o);

  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ortest: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    check_open_levels(o);
    if (safe->parsed()) return cmd_safe_test(o, "safe-test", out);
    if (kase->parsed()) return cmd_safe_test(o, "case", out);
    if (dt->parsed()) return cmd_dt(o, out);
    if (power->parsed()) return cmd_power(o, out);
    if (weights->parsed()) return cmd_weights(o, out);
    err << "ortest: no command\n";
    return kExitInput;
  } catch (const ContractError& e) {
    err << "ortest: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "ortest: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InfeasibleError& e) {
    err << "ortest: infeasible: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const NumericError& e) {
    err << "ortest: numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const CapabilityError& e) {
    err << "ortest: unsupported: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "ortest: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace ortest::cli
