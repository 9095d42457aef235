#pragma once

#include <array>
#include <cstdint>

#include "lrr/bootstrap.hpp"
#include "lrr/dataset.hpp"
#include "lrr/lrr.hpp"

namespace lrr {

// One Monte Carlo design for the interval model: true parameters, bracket
// thresholds, sample size, replication count, and the bootstrap plan.
struct McSpec {
  double beta0 = 2.0;
  double gamma0 = 1.0;
  double z1 = 2.3;
  double z2 = 4.5;
  std::size_t n = 200;
  std::size_t replications = 200;
  BootstrapPlan plan;

  void validate() const;

  // Preset designs: 1 has moments close to binding at the truth, 2 widens
  // the bracket so they are slack.
  static McSpec specification(int id);
};

// Default (beta, gamma) search lattices sized to contain each design's
// population set with margin.
ParameterGrid default_grid(int spec_id);

// n observations: x ~ Bernoulli(1/2), eps ~ N(0,1), y* = beta0 + gamma0*x + eps,
// censored into [z1, z2] when y* > z1. Rows with y* > z2 redraw eps so the
// bracket bound holds almost surely. Each row derives its own substream of
// (seed, replicate), so the dataset is reproducible in any evaluation order.
Dataset dgp_interval(const McSpec& spec, std::uint64_t seed, std::uint64_t replicate);

// Closed-form population quantities of the DGP above (the eps law is normal
// truncated at z2 - x'theta0 by the redraw rule).
struct IntervalPopulation {
  double ez1_x0 = 0.0;  // E[bracket lower | x=0]
  double ez2_x0 = 0.0;
  double ez1_x1 = 0.0;
  double ez2_x1 = 0.0;
  double censor_fraction = 0.0;
  double p_x1 = 0.5;

  static IntervalPopulation from_spec(const McSpec& spec);

  // Population means of the four moment functions at theta.
  std::array<double, 4> moment_means(const ParameterPoint& theta) const;

  // theta lies in the population set: all moment means <= 0.
  bool identified(double beta, double gamma) const;
  // ... with every bound satisfied by at least `margin`.
  bool interior(double beta, double gamma, double margin) const;

  // gamma bounds of the population set at a given beta.
  double gamma_lo(double beta) const { return ez1_x1 - beta; }
  double gamma_hi(double beta) const { return ez2_x1 - beta; }
};

// Population refinement target at one beta: the criterion minimizer over
// the population gamma interval, located by brute-force scan at `step`
// resolution.
double population_lrr_argmin(const McSpec& spec, double beta, double step = 1e-3);

// Per-point coverage frequencies plus run-level diagnostics accumulated
// over replicates.
struct CoverageGrid {
  ParameterGrid grid;
  std::size_t replications = 0;

  std::vector<std::size_t> cover_id_conservative;
  std::vector<std::size_t> cover_id_bonferroni;
  std::vector<std::size_t> cover_lrr_conservative;
  std::vector<std::size_t> cover_lrr_bonferroni;

  // Containment of the restricted set in the unrestricted one.
  std::size_t lrr_subset_violations = 0;
  std::size_t strict_containment_conservative = 0;
  std::size_t strict_containment_bonferroni = 0;

  // Unrestricted-set cardinalities per method, summed over replicates.
  std::size_t card_id_conservative = 0;
  std::size_t card_id_bonferroni = 0;

  // Critical-value comparison at population-identified points: count of
  // (replicate, point) pairs with c_bonferroni >= c_reference.
  std::size_t cv_pairs = 0;
  std::size_t cv_holds = 0;

  double frequency(const std::vector<std::size_t>& counts, std::size_t flat) const {
    return static_cast<double>(counts[flat]) / static_cast<double>(replications);
  }
};

// Runs the full coverage experiment: per replicate, simulate a dataset,
// compute both confidence sets, and accumulate membership counts.
CoverageGrid run_coverage(const McSpec& spec, const ParameterGrid& grid);

}  // namespace lrr
