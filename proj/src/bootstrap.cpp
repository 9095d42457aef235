#include "lrr/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lrr/rng.hpp"

namespace lrr {

namespace {

constexpr std::uint64_t kResampleTag = 0x7265736d706c31ull;  // stream domain separator

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

double quantile_sorted(const std::vector<double>& s, double q) {
  const std::size_t B = s.size();
  const double raw = std::ceil(q * static_cast<double>(B + 1));
  std::size_t k = raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
  if (k > B) k = B;
  return s[k - 1];
}

}  // namespace

void BootstrapPlan::validate() const {
  if (replications < 1) throw std::invalid_argument("bootstrap replications must be >= 1");
  if (!(alpha1 > 0.0 && alpha1 < alpha && alpha < 1.0)) {
    throw std::invalid_argument("plan requires 0 < alpha1 < alpha < 1");
  }
  if (!(kappa >= 0.0)) throw std::invalid_argument("plan requires kappa >= 0");
}

double empirical_quantile(std::vector<double> draws, double q) {
  if (draws.empty()) throw std::invalid_argument("quantile of empty draws");
  std::sort(draws.begin(), draws.end());
  return quantile_sorted(draws, q);
}

std::vector<std::vector<std::uint32_t>> resample_indices(std::size_t n, std::size_t B,
                                                         std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("resample needs n >= 1");
  std::vector<std::vector<std::uint32_t>> out(B);
  for (std::size_t b = 0; b < B; ++b) {
    SubstreamRng rng(SubstreamRng::derive(seed, kResampleTag, b));
    out[b].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      out[b][i] = static_cast<std::uint32_t>(rng.next_below(n));
    }
  }
  return out;
}

double conservative_statistic(const MomentMatrix& matrix,
                              std::span<const std::uint32_t> resample) {
  if (resample.size() != matrix.n) throw std::invalid_argument("resample length mismatch");
  const MomentSummary s = summarize(matrix);
  std::vector<double> star(matrix.p, 0.0);
  for (std::uint32_t idx : resample) {
    for (std::size_t j = 0; j < matrix.p; ++j) star[j] += matrix.at(idx, j);
  }
  const double inv_n = 1.0 / static_cast<double>(matrix.n);
  double total = 0.0;
  for (std::size_t j = 0; j < matrix.p; ++j) {
    const double sigma = std::max(s.sigma_hat[j], kSigmaFloor);
    const double v = (star[j] * inv_n - s.mbar[j]) / sigma;
    if (v > 0.0) total += v;
  }
  return std::sqrt(static_cast<double>(matrix.n)) * total;
}

BootstrapDraws bootstrap_draws(const MomentMatrix& matrix, std::size_t B, std::uint64_t seed) {
  const MomentSummary s = summarize(matrix);
  BootstrapDraws d;
  d.B = B;
  d.p = matrix.p;
  d.n = matrix.n;
  d.u.resize(B * matrix.p);
  d.sqrt_n_over_sigma.resize(matrix.p);
  const double sqrt_n = std::sqrt(static_cast<double>(matrix.n));
  for (std::size_t j = 0; j < matrix.p; ++j) {
    d.sqrt_n_over_sigma[j] = sqrt_n / std::max(s.sigma_hat[j], kSigmaFloor);
  }
  const double inv_n = 1.0 / static_cast<double>(matrix.n);
  std::vector<double> star(matrix.p);
  for (std::size_t b = 0; b < B; ++b) {
    SubstreamRng rng(SubstreamRng::derive(seed, kResampleTag, b));
    std::fill(star.begin(), star.end(), 0.0);
    for (std::size_t i = 0; i < matrix.n; ++i) {
      const std::size_t idx = static_cast<std::size_t>(rng.next_below(matrix.n));
      const double* row = matrix.values.data() + idx * matrix.p;
      for (std::size_t j = 0; j < matrix.p; ++j) star[j] += row[j];
    }
    for (std::size_t j = 0; j < matrix.p; ++j) {
      d.u[b * matrix.p + j] = (star[j] * inv_n - s.mbar[j]) * d.sqrt_n_over_sigma[j];
    }
  }
  return d;
}

double quantile_of_shifted_sum(const BootstrapDraws& draws, std::span<const double> shift,
                               double level) {
  if (!shift.empty() && shift.size() != draws.p) {
    throw std::invalid_argument("shift length mismatch");
  }
  std::vector<double> scaled(draws.p, 0.0);
  for (std::size_t j = 0; j < shift.size(); ++j) {
    scaled[j] = shift[j] * draws.sqrt_n_over_sigma[j];
  }
  std::vector<double> values(draws.B);
  for (std::size_t b = 0; b < draws.B; ++b) {
    double total = 0.0;
    for (std::size_t j = 0; j < draws.p; ++j) {
      const double v = draws.at(b, j) + scaled[j];
      if (v > 0.0) total += v;
    }
    values[b] = total;
  }
  return quantile_sorted(sorted(std::move(values)), level);
}

double min_statistic_quantile(const BootstrapDraws& draws, double level) {
  std::vector<double> values(draws.B);
  for (std::size_t b = 0; b < draws.B; ++b) {
    double lowest = draws.at(b, 0);
    for (std::size_t j = 1; j < draws.p; ++j) lowest = std::min(lowest, draws.at(b, j));
    values[b] = lowest;
  }
  return quantile_sorted(sorted(std::move(values)), level);
}

std::vector<double> lambda_hat(const MomentSummary& summary, double kappa_hat) {
  const double sqrt_n = std::sqrt(static_cast<double>(summary.n));
  std::vector<double> lambda(summary.mbar.size());
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    lambda[j] = std::min(summary.mbar[j] - summary.sigma_hat[j] * kappa_hat / sqrt_n, 0.0);
  }
  return lambda;
}

CriticalValues bootstrap_critical_values(const MomentMatrix& matrix, const BootstrapPlan& plan,
                                         std::uint64_t seed) {
  plan.validate();
  const MomentSummary s = summarize(matrix);
  const BootstrapDraws draws = bootstrap_draws(matrix, plan.replications, seed);
  CriticalValues cv;
  cv.c_conservative = quantile_of_shifted_sum(draws, {}, 1.0 - plan.alpha);
  cv.c_conservative_high = quantile_of_shifted_sum(draws, {}, 1.0 - plan.alpha + plan.alpha1);
  cv.kappa_hat = min_statistic_quantile(draws, plan.alpha1);
  cv.lambda_hat = lambda_hat(s, cv.kappa_hat);
  cv.c_bonferroni = quantile_of_shifted_sum(draws, cv.lambda_hat, 1.0 - plan.alpha + plan.alpha1);
  return cv;
}

double recentered_quantile(const BootstrapDraws& draws, std::span<const double> moment_means,
                           double level) {
  return quantile_of_shifted_sum(draws, moment_means, level);
}

double conservative_critical_value(const Dataset& data, const MomentModel& model,
                                   const ParameterPoint& theta, const BootstrapPlan& plan) {
  return bootstrap_critical_values(moment_matrix(data, model, theta), plan, plan.seed)
      .c_conservative;
}

double kappa_hat_value(const Dataset& data, const MomentModel& model, const ParameterPoint& theta,
                       const BootstrapPlan& plan) {
  return bootstrap_critical_values(moment_matrix(data, model, theta), plan, plan.seed).kappa_hat;
}

double bonferroni_critical_value(const Dataset& data, const MomentModel& model,
                                 const ParameterPoint& theta, const BootstrapPlan& plan) {
  return bootstrap_critical_values(moment_matrix(data, model, theta), plan, plan.seed)
      .c_bonferroni;
}

}  // namespace lrr
