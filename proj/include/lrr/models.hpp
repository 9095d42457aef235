#pragma once

#include <array>
#include <utility>
#include <vector>

#include "lrr/dataset.hpp"
#include "lrr/moments.hpp"
#include "lrr/selection.hpp"

namespace lrr {

// ---------------------------------------------------------------------------
// Interval / top-coded linear outcome model.
//
// Latent outcome y* = x'theta + eps. When y* <= z1 it is observed exactly;
// otherwise only the bracket [z1, z2] is known and the realized reduced form
// is eta*z1 + (1-eta)*z2 for an index eta in [0,1].
// ---------------------------------------------------------------------------

// One observation: bracket endpoints, the binary covariate, and simulation
// provenance (latent outcome and censoring marker).
struct IntervalObservation {
  double z1_tilde = 0.0;
  double z2_tilde = 0.0;
  int x_binary = 0;
  double y_star = 0.0;
  bool censored = false;
};

// Dataset columns used by the interval model, in fixed positions.
Dataset make_interval_dataset();
void append_observation(Dataset& data, const IntervalObservation& obs);
IntervalObservation interval_observation(std::span<const double> row);

// The four moment functions (x == 0 bracket pair, then x == 1 bracket pair)
// for the binary-covariate case.
std::array<double, 4> interval_moments(const IntervalObservation& obs, double beta, double gamma);

// Structural outcome: x_theta + eps on the uncensored branch (x_theta + eps
// <= z1, boundary included), else the bracket blend eta*z1 + (1-eta)*z2.
double interval_rho(double x_theta, double z1, double z2, double eps, double eta);

// Closed-form criterion value: (1/12) * avg over atoms of
// (z1-z2)^2 * (1 - Phi(z1 - x'theta)), standard normal errors.
// Context atoms are laid out as [x_beta..., x_gamma..., z1, z2].
double q_lrr_interval(const ParameterPoint& theta, const CounterfactualContext& context);

// Moment model + structural model for the interval setup. Covariate blocks
// have fixed dimensions (1 + 1 binary in the simulation study).
class IntervalModel : public MomentModel, public EtaStructuralModel {
 public:
  IntervalModel() = default;

  // MomentModel: rows are interval-dataset rows.
  std::size_t moment_count() const override { return 4; }
  void evaluate(std::span<const double> row, const ParameterPoint& theta,
                std::span<double> out) const override;

  // EtaStructuralModel: atoms are [x_beta..., x_gamma..., z1, z2].
  std::size_t outcome_dim() const override { return 1; }
  std::size_t epsilon_dim() const override { return 1; }
  EtaGrid eta_grid(std::size_t bins) const override;
  EpsQuadrature epsilon_quadrature(std::span<const double> atom, const ParameterPoint& theta,
                                   std::size_t budget) const override;
  void structural_outcome(std::span<const double> atom, std::span<const double> eps, double eta,
                          const ParameterPoint& theta, std::span<double> out) const override;
};

// Counterfactual context for the interval model: one atom per distinct
// covariate value found in the data (weighted by frequency), with the
// bracket thresholds appended.
CounterfactualContext interval_context_from_data(const Dataset& data, double z1, double z2);

// ---------------------------------------------------------------------------
// 2x2 entry game with strategic substitutes (beta1, beta2 <= 0).
// ---------------------------------------------------------------------------

struct EntryParameters {
  double beta1 = 0.0;
  double beta2 = 0.0;
  std::vector<double> gamma1;
  std::vector<double> gamma2;

  ParameterPoint to_point() const;
  static EntryParameters from_point(const ParameterPoint& theta);
};

// Payoff regions of the entry system for one covariate value; eps pairs are
// classified with the stated strict/weak boundaries. The region layout is
// derived for entry deterrence, so positive strategic interactions are
// rejected rather than silently misclassified.
struct EntryRegions {
  double t1 = 0.0;  // x'gamma1
  double t2 = 0.0;  // x'gamma2
  double beta1 = 0.0;
  double beta2 = 0.0;

  bool in_a1(double e1, double e2) const { return t1 < e1 && t2 < e2; }
  bool in_a2(double e1, double e2) const { return beta1 + t1 >= e1 && beta2 + t2 >= e2; }
  bool in_a3(double e1, double e2) const { return beta1 + t1 < e1 && t2 >= e2; }
  bool in_a4(double e1, double e2) const { return t1 >= e1 && beta2 + t2 < e2; }
};

EntryRegions entry_regions(std::span<const double> x, const EntryParameters& params);

// Entry outcomes (rho1, rho2). On the multiplicity region A3 and A4 overlap
// and eta blends the two monopoly profiles: eta = 1 selects firm 1's entry,
// eta = 0 firm 2's.
std::pair<double, double> entry_rho(std::span<const double> x, double e1, double e2, double eta,
                                    const EntryParameters& params);

// P{(eps1, eps2) in A3 cap A4} with independent standard normal errors:
// [Phi(x'g1) - Phi(x'g1 + b1)] * [Phi(x'g2) - Phi(x'g2 + b2)].
// Requires beta1, beta2 <= 0; throws otherwise.
double multiplicity_probability(std::span<const double> x, const EntryParameters& params);

// Closed-form criterion value: (1/2) * avg over atoms of the multiplicity
// probability. Context atoms are the covariate vectors.
double q_lrr_entry(const ParameterPoint& theta, const CounterfactualContext& context);

class EntryGameModel : public EtaStructuralModel {
 public:
  explicit EntryGameModel(std::size_t covariate_dim = 1) : covariate_dim_(covariate_dim) {}

  std::size_t covariate_dim() const { return covariate_dim_; }
  std::size_t outcome_dim() const override { return 2; }
  std::size_t epsilon_dim() const override { return 2; }

  // The index only ever selects between the two pure profiles on the
  // multiplicity region, so its support is the two-point set {0,1} with
  // the uniform dominating measure; `bins` is ignored.
  EtaGrid eta_grid(std::size_t bins) const override;

  EpsQuadrature epsilon_quadrature(std::span<const double> atom, const ParameterPoint& theta,
                                   std::size_t budget) const override;
  void structural_outcome(std::span<const double> atom, std::span<const double> eps, double eta,
                          const ParameterPoint& theta, std::span<double> out) const override;

 private:
  std::size_t covariate_dim_;
};

}  // namespace lrr
