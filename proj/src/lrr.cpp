#include "lrr/lrr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lrr/parallel.hpp"
#include "lrr/rng.hpp"

namespace lrr {

namespace {

constexpr std::uint64_t kPointTag = 0x67726964707431ull;

}  // namespace

std::string method_name(Method m) {
  return m == Method::conservative ? "conservative" : "bonferroni";
}

Method method_from_name(const std::string& name) {
  if (name == "conservative") return Method::conservative;
  if (name == "bonferroni") return Method::bonferroni;
  throw std::invalid_argument("unknown method: " + name);
}

GridMask gamma_lrr_upper(const Dataset& data, const MomentModel& model,
                         const LrrCriterion& criterion, const CounterfactualContext& context,
                         const ParameterGrid& grid, std::size_t beta_flat, double kappa) {
  const GridMask widened = gamma_hat_kappa(data, model, grid, beta_flat, -kappa);
  const GridMask tightened = gamma_hat_kappa(data, model, grid, beta_flat, kappa);

  const ParameterGrid gsub = grid.gamma_subgrid();
  std::vector<double> q(gsub.size());
  for (std::size_t g = 0; g < gsub.size(); ++g) {
    q[g] = criterion.evaluate(grid.point(grid.flat_from_parts(beta_flat, g)), context);
  }

  double infimum = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < gsub.size(); ++g) {
    if (tightened.test(g)) infimum = std::min(infimum, q[g]);
  }

  GridMask out(gsub);
  for (std::size_t g = 0; g < gsub.size(); ++g) {
    out.set(g, widened.test(g) && q[g] <= infimum + 2.0 * kappa);
  }
  return out;
}

ConfidenceReport confidence_set(const Dataset& data, const MomentModel& model,
                                const LrrCriterion& criterion,
                                const CounterfactualContext& context, const ParameterGrid& grid,
                                const BootstrapPlan& plan, Method method,
                                const PopulationMoments& population_moments) {
  plan.validate();
  const std::size_t total = grid.size();

  ConfidenceReport report;
  report.grid = grid;
  report.method = method;
  report.t_stat.resize(total);
  report.c_conservative.resize(total);
  report.c_bonferroni.resize(total);
  report.c_reference.assign(total, std::numeric_limits<double>::quiet_NaN());
  report.kappa_hat.resize(total);
  report.q_lrr.resize(total);
  report.cs_conservative = GridMask(grid);
  report.cs_bonferroni = GridMask(grid);
  report.lrr_admissible = GridMask(grid);
  report.lrr_cs_conservative = GridMask(grid);
  report.lrr_cs_bonferroni = GridMask(grid);

  // Slack objectives feeding the gamma set masks, cached per point.
  std::vector<double> q_minus(total), q_plus(total);

  parallel_for(total, [&](std::size_t flat) {
    const ParameterPoint theta = grid.point(flat);
    const MomentMatrix matrix = moment_matrix(data, model, theta);
    const MomentSummary summary = summarize(matrix);
    report.t_stat[flat] = test_statistic(summary);
    q_minus[flat] = q_hat(summary, -plan.kappa);
    q_plus[flat] = q_hat(summary, plan.kappa);
    report.q_lrr[flat] = criterion.evaluate(theta, context);

    const std::uint64_t stream = SubstreamRng::derive(plan.seed, kPointTag, flat);
    const BootstrapDraws draws = bootstrap_draws(matrix, plan.replications, stream);
    report.c_conservative[flat] = quantile_of_shifted_sum(draws, {}, 1.0 - plan.alpha);
    report.kappa_hat[flat] = min_statistic_quantile(draws, plan.alpha1);
    const std::vector<double> lambda = lambda_hat(summary, report.kappa_hat[flat]);
    report.c_bonferroni[flat] =
        quantile_of_shifted_sum(draws, lambda, 1.0 - plan.alpha + plan.alpha1);
    if (population_moments) {
      const std::vector<double> means = population_moments(theta);
      report.c_reference[flat] =
          recentered_quantile(draws, means, 1.0 - plan.alpha + plan.alpha1);
    }
  });

  // Per-beta refinement sets from the cached objectives.
  const std::size_t beta_count = grid.beta_size();
  const std::size_t gamma_count = grid.gamma_size();
  for (std::size_t b = 0; b < beta_count; ++b) {
    double infimum = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < gamma_count; ++g) {
      const std::size_t flat = grid.flat_from_parts(b, g);
      if (q_plus[flat] <= kZeroTol) infimum = std::min(infimum, report.q_lrr[flat]);
    }
    for (std::size_t g = 0; g < gamma_count; ++g) {
      const std::size_t flat = grid.flat_from_parts(b, g);
      const bool admissible =
          q_minus[flat] <= kZeroTol && report.q_lrr[flat] <= infimum + 2.0 * plan.kappa;
      report.lrr_admissible.set(flat, admissible);
    }
  }

  for (std::size_t flat = 0; flat < total; ++flat) {
    const bool in_cons = report.t_stat[flat] <= report.c_conservative[flat];
    const bool in_bonf = report.t_stat[flat] <= report.c_bonferroni[flat];
    report.cs_conservative.set(flat, in_cons);
    report.cs_bonferroni.set(flat, in_bonf);
    report.lrr_cs_conservative.set(flat, in_cons && report.lrr_admissible.test(flat));
    report.lrr_cs_bonferroni.set(flat, in_bonf && report.lrr_admissible.test(flat));
  }
  return report;
}

}  // namespace lrr
