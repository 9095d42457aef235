#include <doctest.h>

#include <cmath>
#include <random>

#include "lrr/models.hpp"
#include "lrr/normal.hpp"
#include "lrr/rng.hpp"
#include "oracles.hpp"

using namespace lrr;

TEST_CASE("interval moments: indicator structure") {
  // x = 1 kills the first pair.
  const IntervalObservation censored1{2.3, 4.5, 1, 0.0, true};
  const auto m1 = interval_moments(censored1, 2.0, 1.0);
  CHECK(m1[0] == 0.0);
  CHECK(m1[1] == 0.0);
  CHECK(m1[2] == doctest::Approx(-0.7).epsilon(1e-15));
  CHECK(m1[3] == doctest::Approx(-1.5).epsilon(1e-15));

  // Uncensored point exactly on the regression line.
  const IntervalObservation on_line{2.0, 2.0, 0, 2.0, false};
  const auto m2 = interval_moments(on_line, 2.0, 1.0);
  for (double v : m2) CHECK(v == 0.0);
}

TEST_CASE("interval structural outcome branches") {
  // Boundary belongs to the uncensored branch.
  CHECK(interval_rho(2.0, 2.3, 4.5, 0.3, 0.77) == doctest::Approx(2.3).epsilon(1e-15));
  // Bracket endpoints.
  CHECK(interval_rho(2.0, 2.3, 4.5, 0.31, 1.0) == 2.3);
  CHECK(interval_rho(2.0, 2.3, 4.5, 0.31, 0.0) == 4.5);
  // Nondecreasing in eps below the threshold, constant above it.
  double prev = -100.0;
  for (double eps = -3.0; eps <= 0.3; eps += 0.01) {
    const double v = interval_rho(2.0, 2.3, 4.5, eps, 0.4);
    CHECK(v >= prev);
    prev = v;
  }
  const double censored_value = interval_rho(2.0, 2.3, 4.5, 0.5, 0.4);
  for (double eps = 0.31; eps < 4.0; eps += 0.13) {
    CHECK(interval_rho(2.0, 2.3, 4.5, eps, 0.4) == censored_value);
  }
}

TEST_CASE("interval criterion closed form") {
  // Zero-width bracket: nothing to select.
  const CounterfactualContext degenerate =
      CounterfactualContext::equal_weights({{1.0, 0.0, 3.0, 3.0}});
  CHECK(q_lrr_interval(ParameterPoint{{2.0}, {1.0}}, degenerate) == 0.0);

  // Single-atom value, cross-checked against a Monte Carlo oracle over
  // (eps, eta1, eta2) using the mean-deviation identity
  // Var(rho) = E[(rho(eta1) - rho(eta2))^2] / 2.
  const CounterfactualContext single =
      CounterfactualContext::equal_weights({{1.0, 0.0, 2.3, 4.5}});
  const ParameterPoint theta{{2.0}, {1.0}};
  const double closed = q_lrr_interval(theta, single);
  CHECK(closed == doctest::Approx(0.154109).epsilon(2e-5));

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double mc = oracle::monte_carlo(8675309, 4000000, [&](std::mt19937_64& rng) {
    const double eps = gauss(rng);
    const double r1 = interval_rho(2.0, 2.3, 4.5, eps, unif(rng));
    const double r2 = interval_rho(2.0, 2.3, 4.5, eps, unif(rng));
    const double d = r1 - r2;
    return 0.5 * d * d;
  });
  CHECK(std::fabs(mc - closed) / closed < 5e-3);
}

TEST_CASE("interval criterion responds to the index and the bracket width") {
  const ParameterPoint theta{{2.0}, {1.0}};
  // Strictly increasing in x'theta for a fixed atom.
  double prev = -1.0;
  for (double beta = 0.5; beta <= 4.0; beta += 0.25) {
    const CounterfactualContext ctx =
        CounterfactualContext::equal_weights({{1.0, 0.0, 2.3, 4.5}});
    const double v = q_lrr_interval(ParameterPoint{{beta}, {0.0}}, ctx);
    CHECK(v > prev);
    prev = v;
  }
  // Scaling the bracket width by c multiplies the value by c^2.
  const CounterfactualContext base =
      CounterfactualContext::equal_weights({{1.0, 0.0, 2.3, 4.5}});
  const CounterfactualContext wide =
      CounterfactualContext::equal_weights({{1.0, 0.0, 2.3, 2.3 + 3.0 * 2.2}});
  CHECK(q_lrr_interval(theta, wide) ==
        doctest::Approx(9.0 * q_lrr_interval(theta, base)).epsilon(1e-12));
}

TEST_CASE("entry outcome by region") {
  EntryParameters params;
  params.beta1 = -1.0;
  params.beta2 = -1.0;
  params.gamma1 = {0.0};
  params.gamma2 = {0.0};
  const std::vector<double> x{1.0};

  // Both profitable regardless of the rival.
  auto both = entry_rho(x, -2.0, -2.0, 0.3, params);
  CHECK(both.first == 1.0);
  CHECK(both.second == 1.0);
  // Neither profitable.
  auto neither = entry_rho(x, 2.0, 2.0, 0.3, params);
  CHECK(neither.first == 0.0);
  CHECK(neither.second == 0.0);
  // Multiplicity rectangle: the index picks beween opposing monopolies.
  auto eta_one = entry_rho(x, -0.5, -0.5, 1.0, params);
  CHECK(eta_one.first == 1.0);
  CHECK(eta_one.second == 0.0);
  auto eta_zero = entry_rho(x, -0.5, -0.5, 0.0, params);
  CHECK(eta_zero.first == 0.0);
  CHECK(eta_zero.second == 1.0);
}

TEST_CASE("entry outcome matches a region-geometry oracle") {
  // Independent case analysis from the raw payoff inequalities, including
  // constancy under perturbations that stay inside a region.
  SubstreamRng rng(5551212);
  for (int trial = 0; trial < 4000; ++trial) {
    EntryParameters params;
    params.beta1 = -2.0 * rng.next_unit() - 0.05;
    params.beta2 = -2.0 * rng.next_unit() - 0.05;
    params.gamma1 = {2.0 * rng.next_unit() - 1.0};
    params.gamma2 = {2.0 * rng.next_unit() - 1.0};
    const std::vector<double> x{1.0};
    const double e1 = 6.0 * rng.next_unit() - 3.0;
    const double e2 = 6.0 * rng.next_unit() - 3.0;
    const double eta = rng.next_unit();

    const double t1 = params.gamma1[0];
    const double t2 = params.gamma2[0];
    const bool a2 = e1 <= params.beta1 + t1 && e2 <= params.beta2 + t2;
    const bool a3 = e1 > params.beta1 + t1 && e2 <= t2;
    const bool a4 = e1 <= t1 && e2 > params.beta2 + t2;
    double rho1, rho2;
    if (a2) {
      rho1 = 1.0;
      rho2 = 1.0;
    } else if (a3 && a4) {
      rho1 = eta;
      rho2 = 1.0 - eta;
    } else if (a3) {
      rho1 = 0.0;
      rho2 = 1.0;
    } else if (a4) {
      rho1 = 1.0;
      rho2 = 0.0;
    } else {
      rho1 = 0.0;
      rho2 = 0.0;
    }
    const auto got = entry_rho(x, e1, e2, eta, params);
    CHECK(got.first == rho1);
    CHECK(got.second == rho2);

    // Small interior nudge keeps the outcome (piecewise constant in eps).
    const double nudge = 1e-9;
    const auto nudged = entry_rho(x, e1 + nudge, e2 - nudge, eta, params);
    const bool near_boundary =
        std::fabs(e1 - t1) < 1e-8 || std::fabs(e1 - params.beta1 - t1) < 1e-8 ||
        std::fabs(e2 - t2) < 1e-8 || std::fabs(e2 - params.beta2 - t2) < 1e-8;
    if (!near_boundary) {
      CHECK(nudged.first == got.first);
      CHECK(nudged.second == got.second);
    }
  }
}

TEST_CASE("multiplicity probability") {
  EntryParameters params;
  params.beta1 = -1.0;
  params.beta2 = -1.0;
  params.gamma1 = {0.0};
  params.gamma2 = {0.0};
  const std::vector<double> x{1.0};

  const double p = multiplicity_probability(x, params);
  CHECK(p == doctest::Approx(0.11651623).epsilon(1e-6));

  // Monte Carlo rectangle oracle.
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double mc = oracle::monte_carlo(424242, 1000000, [&](std::mt19937_64& rng) {
    const double e1 = gauss(rng);
    const double e2 = gauss(rng);
    return (e1 > -1.0 && e1 <= 0.0 && e2 > -1.0 && e2 <= 0.0) ? 1.0 : 0.0;
  });
  CHECK(std::fabs(mc - p) < 1.5e-3);

  // Empty rectangle at zero interaction; monotone shrinkage toward it.
  params.beta1 = 0.0;
  CHECK(multiplicity_probability(x, params) == 0.0);
  double prev = 1.0;
  for (double b1 = -2.0; b1 <= 0.0; b1 += 0.1) {
    EntryParameters p2 = params;
    p2.beta1 = b1;
    p2.beta2 = -1.0;
    const double v = multiplicity_probability(x, p2);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }

  // Unsupported sign configurations are explicit errors on every entry path.
  params.beta1 = 0.5;
  CHECK_THROWS_AS(multiplicity_probability(x, params), std::invalid_argument);
  CHECK_THROWS_AS(entry_rho(x, 0.0, 0.0, 0.5, params), std::invalid_argument);
  CHECK_THROWS_AS(entry_regions(x, params), std::invalid_argument);
}

TEST_CASE("entry criterion closed form") {
  EntryParameters params;
  params.beta1 = -1.0;
  params.beta2 = -1.0;
  params.gamma1 = {0.0};
  params.gamma2 = {0.0};
  const CounterfactualContext ctx = CounterfactualContext::equal_weights({{1.0}});
  const double value = q_lrr_entry(params.to_point(), ctx);
  CHECK(value == doctest::Approx(0.05825812).epsilon(1e-6));

  EntryParameters zero = params;
  zero.beta1 = 0.0;
  zero.beta2 = 0.0;
  CHECK(q_lrr_entry(zero.to_point(), ctx) == 0.0);

  EntryParameters bad = params;
  bad.beta2 = 0.3;
  CHECK_THROWS_AS(q_lrr_entry(bad.to_point(), ctx), std::invalid_argument);
}

TEST_CASE("entry parameter round trip") {
  EntryParameters params;
  params.beta1 = -0.7;
  params.beta2 = -1.3;
  params.gamma1 = {0.2, -0.4};
  params.gamma2 = {0.9, 0.1};
  const EntryParameters back = EntryParameters::from_point(params.to_point());
  CHECK(back.beta1 == params.beta1);
  CHECK(back.beta2 == params.beta2);
  CHECK(back.gamma1 == params.gamma1);
  CHECK(back.gamma2 == params.gamma2);
}
