#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lrr/dataset.hpp"
#include "lrr/grid.hpp"

namespace lrr {

// Moment floor / tolerance constants shared by the estimation stack.
inline constexpr double kSigmaFloor = 1e-10;   // lower bound on sigma_hat before division
inline constexpr double kClampedMoment = -1e6; // normalized moment when floored and mbar <= 0
inline constexpr double kZeroTol = 1e-12;      // "equals zero" test for the objective

// A model contributing p moment inequality functions E[m_j(Z_i; theta)] <= 0.
// evaluate() must be deterministic and total on valid observation rows.
class MomentModel {
 public:
  virtual ~MomentModel() = default;
  virtual std::size_t moment_count() const = 0;
  virtual void evaluate(std::span<const double> row, const ParameterPoint& theta,
                        std::span<double> out) const = 0;
};

// Per-observation moment values at a fixed theta, row-major n x p.
// Computed once per grid point and shared by the sample summary and every
// bootstrap replicate.
struct MomentMatrix {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * p + j]; }
};

// Sample mean moments and their standard deviations (divisor n).
struct MomentSummary {
  std::vector<double> mbar;
  std::vector<double> sigma_hat;
  std::size_t n = 0;
};

MomentMatrix moment_matrix(const Dataset& data, const MomentModel& model,
                           const ParameterPoint& theta);

MomentSummary summarize(const MomentMatrix& matrix);

// Convenience composition of the two steps above. Requires n >= 2.
MomentSummary sample_moments(const Dataset& data, const MomentModel& model,
                             const ParameterPoint& theta);

// mbar/sigma with the floor rule: sigma is floored at kSigmaFloor, and a
// floored denominator with mbar <= 0 yields kClampedMoment instead of a
// huge negative quotient.
double normalized_moment(double mbar, double sigma);

// Objective sum_j [ mbar_j/sigma_j + kappa ]_+ .
double q_hat(const MomentSummary& summary, double kappa);

// Test statistic sqrt(n) * q_hat(summary, 0).
double test_statistic(const MomentSummary& summary);

// Gamma points (for the grid's beta point at beta_flat) where the
// kappa-slackened objective vanishes: {gamma : q_hat(theta, kappa) <= kZeroTol}.
// Returns a mask over grid.gamma_subgrid().
GridMask gamma_hat_kappa(const Dataset& data, const MomentModel& model,
                         const ParameterGrid& grid, std::size_t beta_flat, double kappa);

}  // namespace lrr
