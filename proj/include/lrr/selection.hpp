#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrr/grid.hpp"

namespace lrr {

// Discretized support of the reduced-form index eta together with the
// masses of the dominating measure (masses sum to one).
struct EtaGrid {
  std::vector<double> eta;
  std::vector<double> mass;

  std::size_t size() const { return eta.size(); }
  void validate() const;
};

// Counterfactual distribution of the covariate part of w: a finite list of
// atoms with weights summing to one. Atom layout is model-specific.
struct CounterfactualContext {
  std::vector<std::vector<double>> atoms;
  std::vector<double> weights;

  static CounterfactualContext equal_weights(std::vector<std::vector<double>> atoms);
  void validate() const;
};

// Quadrature of a model's error law for one atom: `count` nodes of
// dimension `dim` with weights summing to one. Models choose nodes that
// respect their own kink structure, so piecewise-defined structural
// functions integrate exactly.
struct EpsQuadrature {
  std::size_t dim = 0;
  std::vector<double> nodes;  // count x dim, row-major
  std::vector<double> weights;

  std::size_t count() const { return weights.size(); }
  std::span<const double> node(std::size_t i) const {
    return std::span<const double>(nodes.data() + i * dim, dim);
  }
};

// A structural model exposing its reduced forms rho(w; eta) for the
// counterfactual machinery: the eta discretization, an error-law
// quadrature per atom, and the structural outcome itself.
class EtaStructuralModel {
 public:
  virtual ~EtaStructuralModel() = default;

  virtual std::size_t outcome_dim() const = 0;
  virtual std::size_t epsilon_dim() const = 0;

  // Discretization of eta's support with dominating-measure masses. Models
  // with an intrinsically finite support may ignore `bins`.
  virtual EtaGrid eta_grid(std::size_t bins) const = 0;

  virtual EpsQuadrature epsilon_quadrature(std::span<const double> atom,
                                           const ParameterPoint& theta,
                                           std::size_t budget) const = 0;

  virtual void structural_outcome(std::span<const double> atom, std::span<const double> eps,
                                  double eta, const ParameterPoint& theta,
                                  std::span<double> out) const = 0;
};

// A selection rule over the discretized eta states, stored as density
// values with respect to the dominating measure. Either one shared row or
// one row per discretized w state (atom x epsilon node, atom-major).
struct DiscretizedSelectionRule {
  EtaGrid grid;
  std::vector<std::vector<double>> density;

  static DiscretizedSelectionRule uniform(EtaGrid grid);
  void validate() const;
};

// Precomputed structural outcomes over the discretized (w, eta) product
// space for one theta. w states enumerate context atoms crossed with their
// epsilon quadrature nodes.
struct StructuralTable {
  std::size_t w_count = 0;
  std::size_t dim = 0;
  EtaGrid eta;
  std::vector<double> w_weight;
  std::vector<double> rho;  // w x eta x dim

  double rho_at(std::size_t w, std::size_t k, std::size_t c) const {
    return rho[(w * eta.size() + k) * dim + c];
  }
};

inline constexpr std::size_t kDefaultEtaBins = 101;
inline constexpr std::size_t kDefaultEpsBudget = 24;

StructuralTable build_structural_table(const EtaStructuralModel& model,
                                       const ParameterPoint& theta,
                                       const CounterfactualContext& context,
                                       std::size_t eta_bins = kDefaultEtaBins,
                                       std::size_t eps_budget = kDefaultEpsBudget);

// Counterfactual average structural outcome under rule G (one component
// per outcome dimension).
std::vector<double> aso(const StructuralTable& table, const DiscretizedSelectionRule& rule);
std::vector<double> aso(const EtaStructuralModel& model, const ParameterPoint& theta,
                        const DiscretizedSelectionRule& rule, const CounterfactualContext& context,
                        std::size_t eps_budget = kDefaultEpsBudget);

// Discretized average squared eta-deviation of the structural function:
// sum_w wt_w sum_k mass_k || rho(w,k) - mean_mu rho(w,.) ||^2.
double q_lrr_generic(const StructuralTable& table);
double q_lrr_generic(const EtaStructuralModel& model, const ParameterPoint& theta,
                     const CounterfactualContext& context, std::size_t eta_bins,
                     std::size_t eps_budget = kDefaultEpsBudget);

// Outcome of the perturbation experiment around a selection rule: the
// criterion value, the largest sensitivity ratio seen over random feasible
// density perturbations, and the ratio of the deviation-aligned direction.
struct SensitivityReport {
  double q_lrr = 0.0;
  double bound = 0.0;  // sqrt(q_lrr)
  double max_observed_ratio = 0.0;
  double extremal_ratio = 0.0;
  bool extremal_feasible = false;
  std::size_t perturbations = 0;  // feasible directions evaluated
};

// Draws `n_perturbations` random density perturbations with per-w zero
// mean, rescaled to stay nonnegative and within delta-distance K of the
// rule, and records |ASO(G+h) - ASO(G)| / delta(G+h, G) for each. Also
// evaluates the deviation-aligned direction, which attains the bound.
// Throws when no valid perturbation exists (K <= 0 or a single eta state).
SensitivityReport sensitivity_oracle(const EtaStructuralModel& model, const ParameterPoint& theta,
                                     const CounterfactualContext& context,
                                     const DiscretizedSelectionRule& rule, double K,
                                     std::size_t n_perturbations, std::uint64_t seed,
                                     std::size_t eps_budget = kDefaultEpsBudget);

}  // namespace lrr
