#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lrr/models.hpp"
#include "lrr/normal.hpp"
#include "lrr/simulate.hpp"

using namespace lrr;

TEST_CASE("dgp is deterministic per (seed, replicate)") {
  McSpec spec = McSpec::specification(1);
  spec.n = 500;
  const Dataset a = dgp_interval(spec, 42, 3);
  const Dataset b = dgp_interval(spec, 42, 3);
  CHECK(a.values == b.values);
  const Dataset c = dgp_interval(spec, 42, 4);
  CHECK(a.values != c.values);
}

TEST_CASE("remote threshold disables censoring") {
  McSpec spec;
  spec.z1 = 1e9;
  spec.z2 = 2e9;
  spec.n = 2000;
  const Dataset data = dgp_interval(spec, 7, 0);
  for (std::size_t i = 0; i < data.rows; ++i) {
    CHECK(data.at(i, 4) == 0.0);
    CHECK(data.at(i, 0) == data.at(i, 1));
  }
}

TEST_CASE("every simulated row respects the bracket bound and conventions") {
  const McSpec spec = McSpec::specification(1);
  const Dataset data = dgp_interval(spec, 8, 0);
  for (std::size_t i = 0; i < data.rows; ++i) {
    const IntervalObservation obs = interval_observation(data.row(i));
    CHECK(obs.y_star <= spec.z2);
    CHECK(obs.z1_tilde <= obs.z2_tilde);
    if (obs.censored) {
      CHECK(obs.y_star > spec.z1);
      CHECK(obs.z1_tilde == spec.z1);
      CHECK(obs.z2_tilde == spec.z2);
    } else {
      CHECK(obs.y_star <= spec.z1);
      CHECK(obs.z1_tilde == obs.z2_tilde);
    }
  }
}

TEST_CASE("censoring fraction matches the closed-form value") {
  McSpec spec = McSpec::specification(1);
  spec.n = 100000;
  const Dataset data = dgp_interval(spec, 20240805, 0);
  std::size_t censored = 0;
  for (std::size_t i = 0; i < data.rows; ++i) censored += data.at(i, 4) > 0.5;
  const double frac = static_cast<double>(censored) / static_cast<double>(data.rows);

  const IntervalPopulation pop = IntervalPopulation::from_spec(spec);
  CHECK(std::fabs(frac - pop.censor_fraction) < 0.01);
}

TEST_CASE("population sets: design 2 strictly contains design 1") {
  const IntervalPopulation p1 = IntervalPopulation::from_spec(McSpec::specification(1));
  const IntervalPopulation p2 = IntervalPopulation::from_spec(McSpec::specification(2));
  CHECK(p2.ez1_x0 < p1.ez1_x0);
  CHECK(p2.ez2_x0 > p1.ez2_x0);
  CHECK(p2.ez1_x1 < p1.ez1_x1);
  CHECK(p2.ez2_x1 > p1.ez2_x1);
  // The truth lies in both sets.
  CHECK(p1.identified(2.0, 1.0));
  CHECK(p2.identified(2.0, 1.0));
  // Every point of set 1 on a probe grid lies in set 2.
  for (double beta = 1.5; beta <= 2.8; beta += 0.05) {
    for (double gamma = -0.8; gamma <= 2.4; gamma += 0.05) {
      if (p1.identified(beta, gamma)) CHECK(p2.identified(beta, gamma));
    }
  }
}

TEST_CASE("sample moments concentrate on the population moment means") {
  McSpec spec = McSpec::specification(1);
  spec.n = 100000;
  const Dataset data = dgp_interval(spec, 99, 1);
  const IntervalModel model;
  const IntervalPopulation pop = IntervalPopulation::from_spec(spec);

  const ParameterPoint theta0{{spec.beta0}, {spec.gamma0}};
  const MomentSummary s = sample_moments(data, model, theta0);
  const auto means = pop.moment_means(theta0);
  const double root_n = std::sqrt(static_cast<double>(spec.n));
  for (std::size_t j = 0; j < 4; ++j) {
    // At the truth the population means are nonpositive, and the sample
    // means sit within three standard errors of them.
    CHECK(means[j] <= 0.0);
    CHECK(std::fabs(s.mbar[j] - means[j]) <= 3.0 * s.sigma_hat[j] / root_n);
  }
}

TEST_CASE("large-sample gamma scan recovers the population set") {
  McSpec spec = McSpec::specification(1);
  spec.n = 20000;
  const Dataset data = dgp_interval(spec, 271828, 0);
  const IntervalModel model;
  const IntervalPopulation pop = IntervalPopulation::from_spec(spec);
  const ParameterGrid grid({{1.0, 3.0, 5}, {-0.5, 2.1, 131}}, 1);
  const std::size_t beta_flat = 2;  // beta = 2.0
  const GridMask flagged = gamma_hat_kappa(data, model, grid, beta_flat, 0.0);

  const double lo = pop.gamma_lo(2.0);
  const double hi = pop.gamma_hi(2.0);
  const ParameterGrid gsub = grid.gamma_subgrid();
  const double fuzz = 0.05;  // sampling noise allowance at this n
  for (std::size_t g = 0; g < gsub.size(); ++g) {
    const double gamma = gsub.point(g).gamma[0];
    if (flagged.test(g)) {
      CHECK(gamma >= lo - fuzz);
      CHECK(gamma <= hi + fuzz);
    } else {
      CHECK((gamma <= lo + fuzz || gamma >= hi - fuzz));
    }
  }
}

TEST_CASE("critical values stabilize across resampling seeds") {
  McSpec spec = McSpec::specification(1);
  spec.n = 200;
  const Dataset data = dgp_interval(spec, 1618, 0);
  const IntervalModel model;
  const IntervalPopulation pop = IntervalPopulation::from_spec(spec);
  // A population-binding point: beta on the lower bound, slope interior.
  const ParameterPoint theta{{pop.ez1_x0}, {1.0}};
  const MomentMatrix matrix = moment_matrix(data, model, theta);

  BootstrapPlan plan;
  plan.replications = 999;
  std::vector<double> cvs;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    cvs.push_back(bootstrap_critical_values(matrix, plan, seed).c_conservative);
  }
  const double lo = *std::min_element(cvs.begin(), cvs.end());
  const double hi = *std::max_element(cvs.begin(), cvs.end());
  CHECK(lo > 0.0);
  CHECK((hi - lo) / lo < 0.15);  // quantile noise at B=999 is a few percent
}

TEST_CASE("population refinement argmin sits at the lower gamma bound") {
  const McSpec spec = McSpec::specification(1);
  const IntervalPopulation pop = IntervalPopulation::from_spec(spec);
  const double argmin = population_lrr_argmin(spec, 2.0);
  // The criterion increases with the censored share, hence with gamma.
  CHECK(std::fabs(argmin - pop.gamma_lo(2.0)) <= 1e-3);
}

TEST_CASE("coverage study smoke run") {
  McSpec spec = McSpec::specification(1);
  spec.n = 80;
  spec.replications = 10;
  spec.plan.replications = 49;
  spec.plan.seed = 4711;
  const ParameterGrid grid({{1.8, 2.4, 4}, {0.0, 1.6, 5}}, 1);
  const CoverageGrid cov = run_coverage(spec, grid);

  CHECK(cov.replications == 10);
  CHECK(cov.lrr_subset_violations == 0);
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    CHECK(cov.cover_id_conservative[flat] <= cov.replications);
    CHECK(cov.cover_lrr_conservative[flat] <= cov.cover_id_conservative[flat]);
    CHECK(cov.cover_lrr_bonferroni[flat] <= cov.cover_id_bonferroni[flat]);
  }
  CHECK(cov.cv_pairs > 0);
  // The comparison inequality can only fail on a small share of pairs even
  // at this reduced scale.
  CHECK(static_cast<double>(cov.cv_holds) / static_cast<double>(cov.cv_pairs) > 0.9);

  // Single replicate: frequencies are 0 or 1.
  McSpec single = spec;
  single.replications = 1;
  const CoverageGrid once = run_coverage(single, grid);
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    const double f = once.frequency(once.cover_id_conservative, flat);
    CHECK((f == 0.0 || f == 1.0));
  }

  // Reruns reproduce counts exactly.
  const CoverageGrid again = run_coverage(spec, grid);
  CHECK(again.cover_id_conservative == cov.cover_id_conservative);
  CHECK(again.cover_lrr_bonferroni == cov.cover_lrr_bonferroni);
  CHECK(again.cv_holds == cov.cv_holds);
}

TEST_CASE("spec validation") {
  McSpec spec;
  spec.z1 = 5.0;
  spec.z2 = 4.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  CHECK_THROWS_AS(McSpec::specification(3), std::invalid_argument);
  CHECK_THROWS_AS(default_grid(0), std::invalid_argument);
}
