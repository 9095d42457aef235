#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lrr/io.hpp"
#include "lrr/models.hpp"
#include "lrr/normal.hpp"
#include "lrr/selection.hpp"
#include "lrr/simulate.hpp"

namespace {

using lrr::RunConfig;

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// "lo:hi:steps,lo:hi:steps" -> beta and gamma axes.
void parse_grid_flag(const std::string& text, RunConfig& config) {
  lrr::GridAxis axes[2];
  std::size_t pos = 0;
  for (int a = 0; a < 2; ++a) {
    const std::size_t end = text.find(',', pos);
    const std::string part =
        end == std::string::npos ? text.substr(pos) : text.substr(pos, end - pos);
    double lo, hi;
    unsigned long steps;
    if (std::sscanf(part.c_str(), "%lf:%lf:%lu", &lo, &hi, &steps) != 3) {
      throw CLI::ValidationError("--grid expects 'lo:hi:steps,lo:hi:steps'");
    }
    axes[a] = lrr::GridAxis{lo, hi, steps};
    if (end == std::string::npos && a == 0) {
      throw CLI::ValidationError("--grid expects two comma-separated axes");
    }
    pos = end + 1;
  }
  config.beta_axis = axes[0];
  config.gamma_axis = axes[1];
  config.grid_overridden = true;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find(',', pos);
    const std::string part =
        end == std::string::npos ? text.substr(pos) : text.substr(pos, end - pos);
    out.push_back(std::stod(part));
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

int run_mc(RunConfig config) {
  const auto start = std::chrono::steady_clock::now();
  lrr::McSpec spec = lrr::McSpec::specification(config.spec_id);
  spec.n = config.n;
  spec.replications = config.replications;
  spec.plan = config.plan;
  if (!config.grid_overridden) {
    const lrr::ParameterGrid grid = lrr::default_grid(config.spec_id);
    config.beta_axis = grid.axis(0);
    config.gamma_axis = grid.axis(1);
  }
  config.validate();
  const lrr::CoverageGrid coverage = lrr::run_coverage(spec, config.make_grid());
  lrr::emit_report(coverage, config, config.out_dir, seconds_since(start));
  std::cout << "wrote " << config.out_dir << "/coverage.csv and summary.json\n";
  return 0;
}

int run_infer(RunConfig config) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const std::vector<lrr::WageRecord> records = lrr::ingest_csv(config.input_path);
  const lrr::Dataset data =
      lrr::apply_topcoding(records, config.topcode_fraction, config.z2_raw);

  // Bracket endpoints on the log scale: every censored row shares them.
  double z1 = 0.0;
  bool any_censored = false;
  for (std::size_t i = 0; i < data.rows && !any_censored; ++i) {
    if (data.at(i, 4) > 0.5) {
      z1 = data.at(i, 0);
      any_censored = true;
    }
  }
  if (!any_censored) {
    // Degenerate but legal: fall back to the max log wage as the threshold.
    for (std::size_t i = 0; i < data.rows; ++i) z1 = std::max(z1, data.at(i, 0));
  }
  const double z2 = std::log(config.z2_raw);

  if (!config.grid_overridden) {
    // Group bracket means with padding; covers the estimated set comfortably.
    double sum[2][2] = {{0, 0}, {0, 0}};
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < data.rows; ++i) {
      const int g = data.at(i, 2) > 0.5 ? 1 : 0;
      sum[g][0] += data.at(i, 0);
      sum[g][1] += data.at(i, 1);
      ++count[g];
    }
    if (count[0] == 0 || count[1] == 0) {
      throw std::runtime_error("need both gender groups to build the default grid");
    }
    const double l0 = sum[0][0] / count[0], u0 = sum[0][1] / count[0];
    const double l1 = sum[1][0] / count[1], u1 = sum[1][1] / count[1];
    const double pad0 = 0.25 * (u0 - l0) + 0.05;
    const double pad1 = 0.25 * ((u1 - l0) - (l1 - u0)) + 0.05;
    config.beta_axis = lrr::GridAxis{l0 - pad0, u0 + pad0, 41};
    config.gamma_axis = lrr::GridAxis{l1 - u0 - pad1, u1 - l0 + pad1, 41};
  }

  const lrr::IntervalModel model;
  const lrr::IntervalLrrCriterion criterion;
  const lrr::CounterfactualContext ctx = lrr::interval_context_from_data(data, z1, z2);
  const lrr::Method method = config.method == "bonferroni" ? lrr::Method::bonferroni
                                                           : lrr::Method::conservative;
  const lrr::ConfidenceReport report = lrr::confidence_set(
      data, model, criterion, ctx, config.make_grid(), config.plan, method);
  lrr::emit_report(report, config, config.out_dir, seconds_since(start));
  std::cout << "wrote " << config.out_dir << "/points.csv and summary.json\n";
  return 0;
}

int run_lrr_check(RunConfig config, double z1, double z2) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();

  lrr::ParameterPoint theta;
  lrr::CounterfactualContext ctx;
  std::unique_ptr<lrr::EtaStructuralModel> model;
  if (config.model == "interval") {
    if (config.theta.size() != 2) {
      throw std::runtime_error("interval model expects --theta 'beta,gamma'");
    }
    theta.beta = {config.theta[0]};
    theta.gamma = {config.theta[1]};
    model = std::make_unique<lrr::IntervalModel>();
    if (config.atoms.empty()) {
      ctx = lrr::CounterfactualContext::equal_weights({{1.0, 0.0, z1, z2}, {1.0, 1.0, z1, z2}});
    }
  } else {
    if (config.theta.size() != 4) {
      throw std::runtime_error("entry model expects --theta 'b1,b2,g1,g2'");
    }
    theta.beta = {config.theta[0], config.theta[1]};
    theta.gamma = {config.theta[2], config.theta[3]};
    model = std::make_unique<lrr::EntryGameModel>(1);
    if (config.atoms.empty()) {
      ctx = lrr::CounterfactualContext::equal_weights({{1.0}});
    }
  }
  if (!config.atoms.empty()) {
    ctx = lrr::CounterfactualContext::equal_weights(config.atoms);
  }

  const lrr::DiscretizedSelectionRule rule =
      lrr::DiscretizedSelectionRule::uniform(model->eta_grid(config.eta_bins));
  const lrr::SensitivityReport report =
      lrr::sensitivity_oracle(*model, theta, ctx, rule, config.scale_k, config.perturbations,
                              config.plan.seed);
  lrr::emit_report(report, config, config.out_dir, seconds_since(start));
  std::cout << "wrote " << config.out_dir << "/sensitivity.json and summary.json\n";
  return 0;
}

// Pre-scan for --config so file values become the defaults CLI11 overrides.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") return argv[i + 1];
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  std::string config_path = find_config_path(argc, argv);
  try {
    if (!config_path.empty()) config = RunConfig::load(config_path);
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", {{"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }

  CLI::App app{"Bootstrap confidence sets for interval-censored moment models "
               "with a robustness refinement"};
  app.require_subcommand(1);
  std::string config_flag;
  app.add_option("--config", config_flag, "JSON config file (flags override its values)");

  std::string grid_flag;
  std::string theta_flag;
  double z1_flag = 2.3;
  double z2_flag = 4.5;

  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo coverage study");
  mc->add_option("--config", config_flag, "JSON config file (flags override its values)");
  mc->add_option("--spec", config.spec_id, "design id (1 or 2)");
  mc->add_option("--n", config.n, "sample size per replicate");
  mc->add_option("--reps", config.replications, "number of replicates");
  mc->add_option("--boot", config.plan.replications, "bootstrap replications");
  mc->add_option("--alpha", config.plan.alpha, "nominal level");
  mc->add_option("--alpha1", config.plan.alpha1, "first-stage level");
  mc->add_option("--kappa", config.plan.kappa, "set-estimation slack");
  mc->add_option("--grid", grid_flag, "beta and gamma axes as lo:hi:steps,lo:hi:steps");
  mc->add_option("--out", config.out_dir, "output directory");
  mc->add_option("--seed", config.plan.seed, "master seed");
  mc->add_option("--method", config.method, "conservative, bonferroni or both");

  CLI::App* infer = app.add_subcommand("infer", "confidence sets from a wage CSV");
  infer->add_option("--config", config_flag, "JSON config file (flags override its values)");
  infer->add_option("--data", config.input_path, "CSV with header wage,gender");
  infer->add_option("--topcode-frac", config.topcode_fraction, "top-coded share, e.g. 0.05");
  infer->add_option("--z2", config.z2_raw, "upper wage bound on the raw scale");
  infer->add_option("--boot", config.plan.replications, "bootstrap replications");
  infer->add_option("--alpha", config.plan.alpha, "nominal level");
  infer->add_option("--alpha1", config.plan.alpha1, "first-stage level");
  infer->add_option("--kappa", config.plan.kappa, "set-estimation slack");
  infer->add_option("--grid", grid_flag, "beta and gamma axes as lo:hi:steps,lo:hi:steps");
  infer->add_option("--out", config.out_dir, "output directory");
  infer->add_option("--seed", config.plan.seed, "master seed");
  infer->add_option("--method", config.method, "conservative, bonferroni or both");

  CLI::App* check = app.add_subcommand("lrr-check", "sensitivity bound verification");
  check->add_option("--config", config_flag, "JSON config file (flags override its values)");
  check->add_option("--model", config.model, "interval or entry");
  check->add_option("--theta", theta_flag, "comma-separated parameter values");
  check->add_option("--eta-bins", config.eta_bins, "eta discretization bins");
  check->add_option("--perturbations", config.perturbations, "random directions to draw");
  check->add_option("--scale-k", config.scale_k, "perturbation radius K");
  check->add_option("--z1", z1_flag, "interval atom lower threshold");
  check->add_option("--z2-bound", z2_flag, "interval atom upper threshold");
  check->add_option("--out", config.out_dir, "output directory");
  check->add_option("--seed", config.plan.seed, "master seed");

  std::string active_command;
  try {
    app.parse(argc, argv);
    if (!grid_flag.empty()) parse_grid_flag(grid_flag, config);
    if (!theta_flag.empty()) config.theta = parse_csv_doubles(theta_flag);
    if (mc->parsed()) {
      active_command = config.command = "mc";
      return run_mc(std::move(config));
    }
    if (infer->parsed()) {
      active_command = config.command = "infer";
      return run_infer(std::move(config));
    }
    active_command = config.command = "lrr-check";
    return run_lrr_check(std::move(config), z1_flag, z2_flag);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    nlohmann::json err{{"error", {{"message", e.what()}, {"code", e.get_name()}}}};
    std::cerr << err.dump() << "\n";
    return e.get_exit_code();
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", {{"message", e.what()}, {"command", active_command}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
