#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrr/moments.hpp"

namespace lrr {

// Resampling configuration. alpha is the nominal level of the confidence
// region, alpha1 the slice spent on the first-stage slack estimate of the
// two-stage correction, kappa the set-estimation slack.
struct BootstrapPlan {
  std::size_t replications = 999;
  double alpha = 0.05;
  double alpha1 = 0.005;
  double kappa = 0.02;
  std::uint64_t seed = 0;
  // Quantile rule tag, echoed into reports. Only the order-statistic rule
  // below is implemented.
  std::string quantile_rule = "order-statistic-ceil";

  void validate() const;
};

// Level-q quantile of the draws: with sorted values t(1) <= ... <= t(B),
// returns t(k) for k = clamp(ceil(q*(B+1)), 1, B).
double empirical_quantile(std::vector<double> draws, double q);

// B with-replacement index vectors of length n. Replicate b is generated
// from its own substream of `seed`, so the output is fully determined by
// (n, B, seed, b) and independent of evaluation order.
std::vector<std::vector<std::uint32_t>> resample_indices(std::size_t n, std::size_t B,
                                                         std::uint64_t seed);

// sqrt(n) * sum_j [ (mbar*_j - mbar_j) / sigma_j ]_+ for one resample;
// sigma comes from the original sample.
double conservative_statistic(const MomentMatrix& matrix, std::span<const std::uint32_t> resample);

// One pass of bootstrap moment recentering: u[b][j] = sqrt(n)(mbar*_j - mbar_j)/sigma_j.
// All critical values below are deterministic functions of this cache, so
// the first-stage slack estimate and both second-stage statistics consume
// the same resample streams.
struct BootstrapDraws {
  std::size_t B = 0;
  std::size_t p = 0;
  std::size_t n = 0;
  std::vector<double> u;                  // B x p, row-major
  std::vector<double> sqrt_n_over_sigma;  // sqrt(n)/sigma_j (floored)

  double at(std::size_t b, std::size_t j) const { return u[b * p + j]; }
};

BootstrapDraws bootstrap_draws(const MomentMatrix& matrix, std::size_t B, std::uint64_t seed);

// Level-q quantile of sum_j [ u_bj + sqrt(n)*shift_j/sigma_j ]_+ over
// replicates. An empty shift means zero shift (the conservative statistic).
double quantile_of_shifted_sum(const BootstrapDraws& draws, std::span<const double> shift,
                               double level);

// Level-q quantile of min_j u_bj over replicates (the first-stage statistic).
double min_statistic_quantile(const BootstrapDraws& draws, double level);

// lambda_j = min{ mbar_j - sigma_j * kappa_hat / sqrt(n), 0 }.
std::vector<double> lambda_hat(const MomentSummary& summary, double kappa_hat);

// Bootstrap critical values at one theta.
struct CriticalValues {
  double c_conservative = 0.0;       // 1-alpha quantile of the conservative statistic
  double c_bonferroni = 0.0;         // 1-alpha+alpha1 quantile of the shifted statistic
  double kappa_hat = 0.0;            // alpha1 quantile of the min statistic
  std::vector<double> lambda_hat;    // never positive
  // 1-alpha+alpha1 quantile of the conservative draws; reference point for
  // the critical-value comparison diagnostics.
  double c_conservative_high = 0.0;
};

// Computes every critical value from a single resampling pass. `seed`
// identifies the resample streams; callers tie it to (plan.seed, grid index).
CriticalValues bootstrap_critical_values(const MomentMatrix& matrix, const BootstrapPlan& plan,
                                         std::uint64_t seed);

// Oracle-recentered conservative quantile: level-q quantile of
// sum_j [ u_bj + sqrt(n)*shift_j/sigma_j ]_+ with shift_j set to externally
// supplied moment means. Used by the simulation harness, where population
// means are available in closed form.
double recentered_quantile(const BootstrapDraws& draws, std::span<const double> moment_means,
                           double level);

// Spec-shaped wrappers driving the fused pass above at a single theta.
double conservative_critical_value(const Dataset& data, const MomentModel& model,
                                   const ParameterPoint& theta, const BootstrapPlan& plan);
double kappa_hat_value(const Dataset& data, const MomentModel& model, const ParameterPoint& theta,
                       const BootstrapPlan& plan);
double bonferroni_critical_value(const Dataset& data, const MomentModel& model,
                                 const ParameterPoint& theta, const BootstrapPlan& plan);

}  // namespace lrr
