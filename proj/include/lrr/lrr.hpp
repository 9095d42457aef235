#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lrr/bootstrap.hpp"
#include "lrr/models.hpp"
#include "lrr/moments.hpp"
#include "lrr/selection.hpp"

namespace lrr {

// Criterion ranking nuisance values by the eta-sensitivity of their
// counterfactual predictions; smaller is more robust.
class LrrCriterion {
 public:
  virtual ~LrrCriterion() = default;
  virtual double evaluate(const ParameterPoint& theta,
                          const CounterfactualContext& context) const = 0;
};

// Closed forms for the two bundled models.
class IntervalLrrCriterion : public LrrCriterion {
 public:
  double evaluate(const ParameterPoint& theta,
                  const CounterfactualContext& context) const override {
    return q_lrr_interval(theta, context);
  }
};

class EntryLrrCriterion : public LrrCriterion {
 public:
  double evaluate(const ParameterPoint& theta,
                  const CounterfactualContext& context) const override {
    return q_lrr_entry(theta, context);
  }
};

// Discretized evaluation for any structural model; useful as a cross-check
// of the closed forms.
class GenericLrrCriterion : public LrrCriterion {
 public:
  GenericLrrCriterion(const EtaStructuralModel& model, std::size_t eta_bins,
                      std::size_t eps_budget = kDefaultEpsBudget)
      : model_(model), eta_bins_(eta_bins), eps_budget_(eps_budget) {}

  double evaluate(const ParameterPoint& theta,
                  const CounterfactualContext& context) const override {
    return q_lrr_generic(model_, theta, context, eta_bins_, eps_budget_);
  }

 private:
  const EtaStructuralModel& model_;
  std::size_t eta_bins_;
  std::size_t eps_budget_;
};

// Estimated upper refinement set for gamma at one beta: gamma points of the
// widened set where the criterion is within 2*kappa of its infimum over the
// tightened set (an empty tightened set leaves the widened set unrestricted).
GridMask gamma_lrr_upper(const Dataset& data, const MomentModel& model,
                         const LrrCriterion& criterion, const CounterfactualContext& context,
                         const ParameterGrid& grid, std::size_t beta_flat, double kappa);

enum class Method { conservative, bonferroni };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

// Per-grid-point membership flags and diagnostics for one dataset. Both
// critical-value schemes are computed from the same resample streams; the
// selected method drives the primary masks.
struct ConfidenceReport {
  ParameterGrid grid;
  Method method = Method::conservative;

  std::vector<double> t_stat;
  std::vector<double> c_conservative;
  std::vector<double> c_bonferroni;
  std::vector<double> c_reference;  // oracle-recentered comparison value, NaN if unavailable
  std::vector<double> kappa_hat;
  std::vector<double> q_lrr;

  GridMask cs_conservative;      // unrestricted confidence set
  GridMask cs_bonferroni;
  GridMask lrr_admissible;       // gamma in the upper refinement set at its beta
  GridMask lrr_cs_conservative;  // restricted confidence set
  GridMask lrr_cs_bonferroni;

  const GridMask& cs_selected() const {
    return method == Method::conservative ? cs_conservative : cs_bonferroni;
  }
  const GridMask& lrr_cs_selected() const {
    return method == Method::conservative ? lrr_cs_conservative : lrr_cs_bonferroni;
  }
};

// Optional provider of population moment means, used by the simulation
// harness to compute the oracle-recentered comparison quantile.
using PopulationMoments = std::function<std::vector<double>(const ParameterPoint&)>;

// Full grid scan: test statistic, critical values, criterion cache, set
// masks. Bootstrap streams are keyed by (plan.seed, grid index); points are
// evaluated in parallel with identical results for any worker count.
ConfidenceReport confidence_set(const Dataset& data, const MomentModel& model,
                                const LrrCriterion& criterion,
                                const CounterfactualContext& context, const ParameterGrid& grid,
                                const BootstrapPlan& plan, Method method,
                                const PopulationMoments& population_moments = nullptr);

}  // namespace lrr
