#include "lrr/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "lrr/models.hpp"
#include "lrr/normal.hpp"
#include "lrr/rng.hpp"

namespace lrr {

namespace {

constexpr std::uint64_t kDgpTag = 0x6467705f726f77ull;
constexpr std::uint64_t kCoverageTag = 0x636f766572ull;

// E[(t + eps) 1{eps <= c} | eps <= d] * P(eps <= d) = t*Phi(c) - phi(c) for c <= d.
double truncated_lower_part(double t, double c) { return t * norm_cdf(c) - norm_pdf(c); }

}  // namespace

void McSpec::validate() const {
  if (!(z1 < z2)) throw std::invalid_argument("spec requires z1 < z2");
  if (n < 2) throw std::invalid_argument("spec requires n >= 2");
  if (replications < 1) throw std::invalid_argument("spec requires at least one replicate");
  plan.validate();
}

McSpec McSpec::specification(int id) {
  McSpec spec;
  if (id == 1) {
    spec.z1 = 2.3;
    spec.z2 = 4.5;
  } else if (id == 2) {
    spec.z1 = 1.0;
    spec.z2 = 5.0;
  } else {
    throw std::invalid_argument("specification id must be 1 or 2");
  }
  return spec;
}

ParameterGrid default_grid(int spec_id) {
  if (spec_id == 1) {
    return ParameterGrid({{1.6, 2.7, 23}, {-0.6, 2.2, 29}}, 1);
  }
  if (spec_id == 2) {
    return ParameterGrid({{0.7, 4.5, 20}, {-3.6, 4.2, 27}}, 1);
  }
  throw std::invalid_argument("specification id must be 1 or 2");
}

Dataset dgp_interval(const McSpec& spec, std::uint64_t seed, std::uint64_t replicate) {
  spec.validate();
  Dataset data = make_interval_dataset();
  data.values.reserve(spec.n * data.cols());
  for (std::size_t i = 0; i < spec.n; ++i) {
    SubstreamRng rng(SubstreamRng::derive(seed, kDgpTag, replicate, i));
    const int x = rng.next_bernoulli(0.5) ? 1 : 0;
    const double mean = spec.beta0 + spec.gamma0 * static_cast<double>(x);
    double y_star = mean + rng.next_normal();
    while (y_star > spec.z2) y_star = mean + rng.next_normal();

    IntervalObservation obs;
    obs.x_binary = x;
    obs.y_star = y_star;
    obs.censored = y_star > spec.z1;
    if (obs.censored) {
      obs.z1_tilde = spec.z1;
      obs.z2_tilde = spec.z2;
    } else {
      obs.z1_tilde = y_star;
      obs.z2_tilde = y_star;
    }
    append_observation(data, obs);
  }
  return data;
}

IntervalPopulation IntervalPopulation::from_spec(const McSpec& spec) {
  IntervalPopulation pop;
  double censor = 0.0;
  for (int x = 0; x <= 1; ++x) {
    const double t = spec.beta0 + spec.gamma0 * static_cast<double>(x);
    const double c = spec.z1 - t;
    const double d = spec.z2 - t;
    const double p_keep = norm_cdf(d);
    if (p_keep <= 0.0) throw std::invalid_argument("degenerate design: z2 unreachable");
    const double p_bracket = norm_cdf(d) - norm_cdf(c);
    const double lower_part = truncated_lower_part(t, c);
    const double ez1 = (lower_part + spec.z1 * p_bracket) / p_keep;
    const double ez2 = (lower_part + spec.z2 * p_bracket) / p_keep;
    if (x == 0) {
      pop.ez1_x0 = ez1;
      pop.ez2_x0 = ez2;
    } else {
      pop.ez1_x1 = ez1;
      pop.ez2_x1 = ez2;
    }
    censor += 0.5 * p_bracket / p_keep;
  }
  pop.censor_fraction = censor;
  return pop;
}

std::array<double, 4> IntervalPopulation::moment_means(const ParameterPoint& theta) const {
  const double beta = theta.beta.at(0);
  const double gamma = theta.gamma.at(0);
  const double p0 = 1.0 - p_x1;
  return {p0 * (ez1_x0 - beta), p0 * (beta - ez2_x0),
          p_x1 * (ez1_x1 - beta - gamma), p_x1 * (beta + gamma - ez2_x1)};
}

bool IntervalPopulation::identified(double beta, double gamma) const {
  return ez1_x0 <= beta && beta <= ez2_x0 && ez1_x1 <= beta + gamma && beta + gamma <= ez2_x1;
}

bool IntervalPopulation::interior(double beta, double gamma, double margin) const {
  return ez1_x0 + margin <= beta && beta <= ez2_x0 - margin &&
         ez1_x1 + margin <= beta + gamma && beta + gamma <= ez2_x1 - margin;
}

double population_lrr_argmin(const McSpec& spec, double beta, double step) {
  const IntervalPopulation pop = IntervalPopulation::from_spec(spec);
  const double lo = pop.gamma_lo(beta);
  const double hi = pop.gamma_hi(beta);
  if (!(lo <= hi)) throw std::invalid_argument("beta outside the population set");

  CounterfactualContext ctx;
  ctx.atoms = {{1.0, 0.0, spec.z1, spec.z2}, {1.0, 1.0, spec.z1, spec.z2}};
  ctx.weights = {1.0 - pop.p_x1, pop.p_x1};

  double best_gamma = lo;
  double best_value = std::numeric_limits<double>::infinity();
  const std::size_t steps = static_cast<std::size_t>(std::floor((hi - lo) / step)) + 1;
  for (std::size_t i = 0; i < steps; ++i) {
    const double gamma = std::min(lo + static_cast<double>(i) * step, hi);
    const double value = q_lrr_interval(ParameterPoint{{beta}, {gamma}}, ctx);
    if (value < best_value) {
      best_value = value;
      best_gamma = gamma;
    }
  }
  return best_gamma;
}

CoverageGrid run_coverage(const McSpec& spec, const ParameterGrid& grid) {
  spec.validate();
  const IntervalPopulation pop = IntervalPopulation::from_spec(spec);
  const IntervalModel model;
  const IntervalLrrCriterion criterion;

  CoverageGrid out;
  out.grid = grid;
  out.replications = spec.replications;
  out.cover_id_conservative.assign(grid.size(), 0);
  out.cover_id_bonferroni.assign(grid.size(), 0);
  out.cover_lrr_conservative.assign(grid.size(), 0);
  out.cover_lrr_bonferroni.assign(grid.size(), 0);

  // Population-identified grid points, fixed across replicates.
  std::vector<unsigned char> pop_identified(grid.size(), 0);
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    const ParameterPoint theta = grid.point(flat);
    pop_identified[flat] = pop.identified(theta.beta[0], theta.gamma[0]) ? 1 : 0;
  }
  const PopulationMoments pop_means = [&pop](const ParameterPoint& theta) {
    const std::array<double, 4> m = pop.moment_means(theta);
    return std::vector<double>(m.begin(), m.end());
  };

  for (std::size_t r = 0; r < spec.replications; ++r) {
    const Dataset data = dgp_interval(spec, spec.plan.seed, r);
    const CounterfactualContext ctx = interval_context_from_data(data, spec.z1, spec.z2);
    BootstrapPlan plan = spec.plan;
    plan.seed = SubstreamRng::derive(spec.plan.seed, kCoverageTag, r);
    const ConfidenceReport report = confidence_set(data, model, criterion, ctx, grid, plan,
                                                   Method::conservative, pop_means);

    bool strict_cons = false;
    bool strict_bonf = false;
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
      const bool id_cons = report.cs_conservative.test(flat);
      const bool id_bonf = report.cs_bonferroni.test(flat);
      const bool lrr_cons = report.lrr_cs_conservative.test(flat);
      const bool lrr_bonf = report.lrr_cs_bonferroni.test(flat);
      out.cover_id_conservative[flat] += id_cons;
      out.cover_id_bonferroni[flat] += id_bonf;
      out.cover_lrr_conservative[flat] += lrr_cons;
      out.cover_lrr_bonferroni[flat] += lrr_bonf;
      out.card_id_conservative += id_cons;
      out.card_id_bonferroni += id_bonf;
      if ((lrr_cons && !id_cons) || (lrr_bonf && !id_bonf)) ++out.lrr_subset_violations;
      if (id_cons && !lrr_cons) strict_cons = true;
      if (id_bonf && !lrr_bonf) strict_bonf = true;
      if (pop_identified[flat]) {
        ++out.cv_pairs;
        if (report.c_bonferroni[flat] >= report.c_reference[flat]) ++out.cv_holds;
      }
    }
    out.strict_containment_conservative += strict_cons;
    out.strict_containment_bonferroni += strict_bonf;
  }
  return out;
}

}  // namespace lrr
