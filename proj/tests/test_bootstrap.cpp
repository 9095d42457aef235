#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lrr/bootstrap.hpp"
#include "lrr/rng.hpp"

using namespace lrr;

namespace {

class MeanModel : public MomentModel {
 public:
  std::size_t moment_count() const override { return 1; }
  void evaluate(std::span<const double> row, const ParameterPoint&,
                std::span<double> out) const override {
    out[0] = row[0];
  }
};

Dataset one_column(std::vector<double> values) {
  Dataset d;
  d.columns = {"z"};
  for (double v : values) d.append_row(std::span<const double>(&v, 1));
  return d;
}

BootstrapPlan small_plan(std::size_t B, std::uint64_t seed) {
  BootstrapPlan plan;
  plan.replications = B;
  plan.seed = seed;
  return plan;
}

}  // namespace

TEST_CASE("plan invariants") {
  BootstrapPlan plan;
  CHECK_NOTHROW(plan.validate());
  plan.alpha1 = 0.2;
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
  plan.alpha1 = 0.005;
  plan.kappa = -0.1;
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
  plan.kappa = 0.0;
  plan.replications = 0;
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
}

TEST_CASE("resampling is deterministic in (n, B, seed)") {
  const auto a = resample_indices(17, 8, 4242);
  const auto b = resample_indices(17, 8, 4242);
  CHECK(a == b);
  const auto c = resample_indices(17, 8, 4243);
  CHECK(a != c);
}

TEST_CASE("singleton support resamples itself") {
  const auto draws = resample_indices(1, 5, 9);
  for (const auto& row : draws) {
    for (std::uint32_t idx : row) CHECK(idx == 0);
  }
}

TEST_CASE("resampled indices are uniform (law of large numbers)") {
  const std::size_t n = 10;
  const std::size_t B = 100000;
  const auto draws = resample_indices(n, B, 20240803);
  std::size_t hits = 0;
  std::size_t total = 0;
  for (const auto& row : draws) {
    for (std::uint32_t idx : row) {
      hits += idx == 0;
      ++total;
    }
  }
  const double freq = static_cast<double>(hits) / static_cast<double>(total);
  CHECK(freq == doctest::Approx(0.1).epsilon(0.1));  // 0.1 +- 0.01
}

TEST_CASE("order-statistic quantile rule") {
  CHECK(empirical_quantile({1.0, 2.0, 3.0, 4.0}, 0.95) == 4.0);
  CHECK(empirical_quantile({4.0, 1.0, 3.0, 2.0}, 0.5) == 3.0);  // k = ceil(0.5*5) = 3
  CHECK(empirical_quantile({5.0}, 0.01) == 5.0);
  CHECK(empirical_quantile({1.0, 2.0}, 1.0) == 2.0);  // clamped to the top draw
  std::vector<double> draws(999);
  for (std::size_t i = 0; i < draws.size(); ++i) draws[i] = static_cast<double>(i + 1);
  CHECK(empirical_quantile(draws, 0.95) == 950.0);  // k = ceil(0.95*1000)
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), std::invalid_argument);
}

TEST_CASE("identity resample gives a zero statistic") {
  const Dataset data = one_column({1.0, 2.0, 3.0, 4.0});
  const MeanModel model;
  const MomentMatrix matrix = moment_matrix(data, model, ParameterPoint{});
  std::vector<std::uint32_t> identity{0, 1, 2, 3};
  CHECK(conservative_statistic(matrix, identity) == 0.0);
}

TEST_CASE("hand-computed conservative statistic on four rows") {
  const Dataset data = one_column({1.0, 2.0, 3.0, 4.0});
  const MeanModel model;
  const MomentMatrix matrix = moment_matrix(data, model, ParameterPoint{});

  // Independent arithmetic: mbar = 2.5, sigma = sqrt(1.25); the resample
  // (4, 4, 3, 2) averages 3.25.
  const std::vector<std::uint32_t> resample{3, 3, 2, 1};
  const double mbar = (1.0 + 2.0 + 3.0 + 4.0) / 4.0;
  const double sigma = std::sqrt(((1 - mbar) * (1 - mbar) + (2 - mbar) * (2 - mbar) +
                                  (3 - mbar) * (3 - mbar) + (4 - mbar) * (4 - mbar)) /
                                 4.0);
  const double star = (4.0 + 4.0 + 3.0 + 2.0) / 4.0;
  const double expected = 2.0 * (star - mbar) / sigma;
  CHECK(conservative_statistic(matrix, resample) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("degenerate sample: every bootstrap quantity vanishes") {
  const Dataset data = one_column({7.0, 7.0, 7.0, 7.0});
  const MeanModel model;
  const MomentMatrix matrix = moment_matrix(data, model, ParameterPoint{});
  const CriticalValues cv = bootstrap_critical_values(matrix, small_plan(99, 7), 7);
  CHECK(cv.c_conservative == 0.0);
  CHECK(cv.kappa_hat == 0.0);
  CHECK(cv.c_bonferroni == 0.0);
}

TEST_CASE("critical values are deterministic and stream-tied") {
  const Dataset data = one_column({0.3, -1.2, 0.7, 2.4, -0.5, 1.1});
  const MeanModel model;
  const MomentMatrix matrix = moment_matrix(data, model, ParameterPoint{});
  const CriticalValues a = bootstrap_critical_values(matrix, small_plan(199, 11), 123);
  const CriticalValues b = bootstrap_critical_values(matrix, small_plan(199, 11), 123);
  CHECK(a.c_conservative == b.c_conservative);
  CHECK(a.c_bonferroni == b.c_bonferroni);
  CHECK(a.kappa_hat == b.kappa_hat);
  const CriticalValues c = bootstrap_critical_values(matrix, small_plan(199, 11), 124);
  CHECK(a.c_conservative != c.c_conservative);
}

TEST_CASE("draw cache consumes the same streams as the index generator") {
  const Dataset data = one_column({0.3, -1.2, 0.7, 2.4, -0.5, 1.1});
  const MeanModel model;
  const MomentMatrix matrix = moment_matrix(data, model, ParameterPoint{});
  const std::size_t B = 25;
  const std::uint64_t seed = 909;
  const auto indices = resample_indices(data.rows, B, seed);
  const BootstrapDraws draws = bootstrap_draws(matrix, B, seed);
  for (std::size_t b = 0; b < B; ++b) {
    const double from_indices = conservative_statistic(matrix, indices[b]);
    double from_cache = 0.0;
    for (std::size_t j = 0; j < draws.p; ++j) {
      from_cache += std::max(draws.at(b, j), 0.0);
    }
    CHECK(from_indices == doctest::Approx(from_cache).epsilon(1e-14));
  }
}

TEST_CASE("first-stage quantile approaches the normal limit") {
  // Simulated standard normal sample; the recentered bootstrap mean is
  // asymptotically standard normal, so the 0.005 quantile sits near the
  // 0.5% point of the normal law (about -2.576).
  SubstreamRng rng(314159);
  std::vector<double> values(4000);
  for (double& v : values) v = rng.next_normal();
  const Dataset data = one_column(values);
  const MeanModel model;
  const MomentMatrix matrix = moment_matrix(data, model, ParameterPoint{});
  const BootstrapDraws draws = bootstrap_draws(matrix, 10000, 2718);
  const double kappa = min_statistic_quantile(draws, 0.005);
  CHECK(kappa == doctest::Approx(-2.5758).epsilon(0.08));
}

TEST_CASE("lambda cases") {
  MomentSummary s;
  s.n = 100;
  s.mbar = {-5.0, 0.02, 0.0};
  s.sigma_hat = {1.0, 2.0, 1.0};
  const double kappa = -2.0;  // first-stage estimate, typically negative
  const std::vector<double> lambda = lambda_hat(s, kappa);
  // Slack moment: the min binds on the first argument.
  CHECK(lambda[0] == doctest::Approx(-5.0 - 1.0 * kappa / 10.0).epsilon(1e-15));
  // Boundary: mbar exactly offsets the deviation term.
  MomentSummary b;
  b.n = 100;
  b.mbar = {2.0 * kappa / 10.0};
  b.sigma_hat = {2.0};
  CHECK(lambda_hat(b, kappa)[0] == 0.0);
  // Nonpositive kappa with a zero mean never produces a positive value.
  CHECK(lambda[2] == 0.0);
  for (double v : lambda) CHECK(v <= 0.0);
}

TEST_CASE("zero lambda collapses the corrected quantile onto the raw one") {
  // Symmetric data with exact zero mean: lambda is exactly zero, so the
  // corrected statistic reuses the conservative draws bit for bit.
  const Dataset data = one_column({-1.0, 1.0, -1.0, 1.0, -1.0, 1.0});
  const MeanModel model;
  const MomentMatrix matrix = moment_matrix(data, model, ParameterPoint{});
  const CriticalValues cv = bootstrap_critical_values(matrix, small_plan(199, 5), 99);
  for (double v : cv.lambda_hat) CHECK(v == 0.0);
  CHECK(cv.c_bonferroni == cv.c_conservative_high);
}

TEST_CASE("very negative lambda clips every corrected draw to zero") {
  const Dataset data = one_column({-1e7, -1.0000001e7, -0.9999999e7, -1e7});
  const MeanModel model;
  const MomentMatrix matrix = moment_matrix(data, model, ParameterPoint{});
  const CriticalValues cv = bootstrap_critical_values(matrix, small_plan(99, 3), 17);
  CHECK(cv.lambda_hat[0] < -1e6);
  CHECK(cv.c_bonferroni == 0.0);
}

TEST_CASE("shift monotonicity of the corrected quantile") {
  const Dataset data = one_column({0.3, -1.2, 0.7, 2.4, -0.5, 1.1, 0.0, -0.8});
  const MeanModel model;
  const MomentMatrix matrix = moment_matrix(data, model, ParameterPoint{});
  const BootstrapDraws draws = bootstrap_draws(matrix, 299, 2024);
  SubstreamRng rng(5150);
  for (int trial = 0; trial < 20; ++trial) {
    const double lo = -2.0 * rng.next_unit();
    const double hi = lo + rng.next_unit();
    const double level = 0.5 + 0.49 * rng.next_unit();
    const std::vector<double> s_lo{lo};
    const std::vector<double> s_hi{hi};
    CHECK(quantile_of_shifted_sum(draws, s_lo, level) <=
          quantile_of_shifted_sum(draws, s_hi, level));
  }
}

TEST_CASE("quantiles are nondecreasing in their level") {
  const Dataset data = one_column({0.3, -1.2, 0.7, 2.4, -0.5, 1.1});
  const MeanModel model;
  const MomentMatrix matrix = moment_matrix(data, model, ParameterPoint{});
  const BootstrapDraws draws = bootstrap_draws(matrix, 199, 31);
  double prev = 0.0;
  for (double level = 0.05; level <= 1.0; level += 0.05) {
    const double q = quantile_of_shifted_sum(draws, {}, level);
    CHECK(q >= prev);
    CHECK(q >= 0.0);
    prev = q;
  }
}
