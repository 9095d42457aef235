#include "lrr/selection.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lrr/rng.hpp"

namespace lrr {

namespace {

constexpr std::uint64_t kPerturbTag = 0x70657274757262ull;
constexpr double kWeightTol = 1e-9;

// Density row for w state `w`: shared row or per-state row.
const std::vector<double>& rule_row(const DiscretizedSelectionRule& rule, std::size_t w) {
  return rule.density.size() == 1 ? rule.density[0] : rule.density[w];
}

// Normalized weighted mean, computed about the first value so that a
// constant sequence returns the constant exactly (the masses only sum to
// one up to rounding).
double weighted_mean(std::span<const double> mass, const double* values, std::size_t stride,
                     std::size_t count) {
  const double anchor = values[0];
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    num += mass[k] * (values[k * stride] - anchor);
    den += mass[k];
  }
  return anchor + num / den;
}

// eta-mean of rho for each (w, component) under the dominating measure.
std::vector<double> eta_means(const StructuralTable& table) {
  const std::size_t K = table.eta.size();
  std::vector<double> means(table.w_count * table.dim);
  for (std::size_t w = 0; w < table.w_count; ++w) {
    for (std::size_t c = 0; c < table.dim; ++c) {
      means[w * table.dim + c] =
          weighted_mean(table.eta.mass, &table.rho[(w * K) * table.dim + c], table.dim, K);
    }
  }
  return means;
}

}  // namespace

void EtaGrid::validate() const {
  if (eta.empty() || eta.size() != mass.size()) {
    throw std::invalid_argument("eta grid needs matching state and mass lists");
  }
  double total = 0.0;
  for (double m : mass) {
    if (!(m >= 0.0)) throw std::invalid_argument("eta masses must be nonnegative");
    total += m;
  }
  if (std::fabs(total - 1.0) > kWeightTol) {
    throw std::invalid_argument("eta masses must sum to one");
  }
}

CounterfactualContext CounterfactualContext::equal_weights(
    std::vector<std::vector<double>> atoms) {
  CounterfactualContext ctx;
  ctx.weights.assign(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
  ctx.atoms = std::move(atoms);
  return ctx;
}

void CounterfactualContext::validate() const {
  if (atoms.empty() || atoms.size() != weights.size()) {
    throw std::invalid_argument("context needs matching atom and weight lists");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("context weights must be nonnegative");
    total += w;
  }
  if (std::fabs(total - 1.0) > kWeightTol) {
    throw std::invalid_argument("context weights must sum to one");
  }
}

DiscretizedSelectionRule DiscretizedSelectionRule::uniform(EtaGrid grid) {
  grid.validate();
  DiscretizedSelectionRule rule;
  rule.density.assign(1, std::vector<double>(grid.size(), 1.0));
  rule.grid = std::move(grid);
  return rule;
}

void DiscretizedSelectionRule::validate() const {
  grid.validate();
  if (density.empty()) throw std::invalid_argument("selection rule needs a density row");
  for (const std::vector<double>& row : density) {
    if (row.size() != grid.size()) {
      throw std::invalid_argument("density row length does not match eta grid");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!(row[k] >= 0.0)) throw std::invalid_argument("density values must be nonnegative");
      total += row[k] * grid.mass[k];
    }
    if (std::fabs(total - 1.0) > kWeightTol) {
      throw std::invalid_argument("each density row must integrate to one");
    }
  }
}

StructuralTable build_structural_table(const EtaStructuralModel& model,
                                       const ParameterPoint& theta,
                                       const CounterfactualContext& context,
                                       std::size_t eta_bins, std::size_t eps_budget) {
  context.validate();
  StructuralTable table;
  table.eta = model.eta_grid(eta_bins);
  table.eta.validate();
  table.dim = model.outcome_dim();

  const std::size_t K = table.eta.size();
  std::vector<double> out(table.dim);
  for (std::size_t a = 0; a < context.atoms.size(); ++a) {
    const EpsQuadrature quad =
        model.epsilon_quadrature(context.atoms[a], theta, eps_budget);
    for (std::size_t e = 0; e < quad.count(); ++e) {
      table.w_weight.push_back(context.weights[a] * quad.weights[e]);
      for (std::size_t k = 0; k < K; ++k) {
        model.structural_outcome(context.atoms[a], quad.node(e), table.eta.eta[k], theta,
                                 std::span<double>(out));
        table.rho.insert(table.rho.end(), out.begin(), out.end());
      }
    }
  }
  table.w_count = table.w_weight.size();
  return table;
}

std::vector<double> aso(const StructuralTable& table, const DiscretizedSelectionRule& rule) {
  rule.validate();
  if (rule.grid.size() != table.eta.size()) {
    throw std::invalid_argument("selection rule eta grid does not match the model grid");
  }
  if (rule.density.size() != 1 && rule.density.size() != table.w_count) {
    throw std::invalid_argument("selection rule rows must be shared or one per w state");
  }
  const std::size_t K = table.eta.size();
  std::vector<double> total(table.dim, 0.0);
  for (std::size_t w = 0; w < table.w_count; ++w) {
    const std::vector<double>& g = rule_row(rule, w);
    for (std::size_t k = 0; k < K; ++k) {
      const double weight = table.w_weight[w] * table.eta.mass[k] * g[k];
      for (std::size_t c = 0; c < table.dim; ++c) {
        total[c] += weight * table.rho_at(w, k, c);
      }
    }
  }
  return total;
}

std::vector<double> aso(const EtaStructuralModel& model, const ParameterPoint& theta,
                        const DiscretizedSelectionRule& rule, const CounterfactualContext& context,
                        std::size_t eps_budget) {
  const StructuralTable table =
      build_structural_table(model, theta, context, rule.grid.size(), eps_budget);
  if (table.eta.size() != rule.grid.size()) {
    throw std::invalid_argument("selection rule eta grid does not match the model grid");
  }
  return aso(table, rule);
}

double q_lrr_generic(const StructuralTable& table) {
  const std::vector<double> means = eta_means(table);
  const std::size_t K = table.eta.size();
  double total = 0.0;
  for (std::size_t w = 0; w < table.w_count; ++w) {
    for (std::size_t k = 0; k < K; ++k) {
      double sq = 0.0;
      for (std::size_t c = 0; c < table.dim; ++c) {
        const double d = table.rho_at(w, k, c) - means[w * table.dim + c];
        sq += d * d;
      }
      total += table.w_weight[w] * table.eta.mass[k] * sq;
    }
  }
  return total;
}

double q_lrr_generic(const EtaStructuralModel& model, const ParameterPoint& theta,
                     const CounterfactualContext& context, std::size_t eta_bins,
                     std::size_t eps_budget) {
  return q_lrr_generic(build_structural_table(model, theta, context, eta_bins, eps_budget));
}

SensitivityReport sensitivity_oracle(const EtaStructuralModel& model, const ParameterPoint& theta,
                                     const CounterfactualContext& context,
                                     const DiscretizedSelectionRule& rule, double K,
                                     std::size_t n_perturbations, std::uint64_t seed,
                                     std::size_t eps_budget) {
  rule.validate();
  if (!(K > 0.0)) throw std::invalid_argument("perturbation radius K must be positive");
  if (rule.grid.size() < 2) {
    throw std::invalid_argument("no valid perturbation exists on a single eta state");
  }

  const StructuralTable table =
      build_structural_table(model, theta, context, rule.grid.size(), eps_budget);
  if (table.eta.size() != rule.grid.size()) {
    throw std::invalid_argument("selection rule eta grid does not match the model grid");
  }
  const std::size_t W = table.w_count;
  const std::size_t nk = table.eta.size();
  if (rule.density.size() != 1 && rule.density.size() != W) {
    throw std::invalid_argument("selection rule rows must be shared or one per w state");
  }

  // Expand to one density row per w state so perturbations can vary freely.
  DiscretizedSelectionRule base;
  base.grid = rule.grid;
  base.density.resize(W);
  for (std::size_t w = 0; w < W; ++w) base.density[w] = rule_row(rule, w);

  const std::vector<double> aso_base = aso(table, base);

  SensitivityReport report;
  report.q_lrr = q_lrr_generic(table);
  report.bound = std::sqrt(report.q_lrr);

  // delta-norm of a candidate direction h (w x eta).
  const auto direction_norm = [&](const std::vector<std::vector<double>>& h) {
    double sq = 0.0;
    for (std::size_t w = 0; w < W; ++w) {
      for (std::size_t k = 0; k < nk; ++k) {
        sq += table.w_weight[w] * table.eta.mass[k] * h[w][k] * h[w][k];
      }
    }
    return std::sqrt(sq);
  };

  // Largest step keeping every density value nonnegative.
  const auto feasible_scale = [&](const std::vector<std::vector<double>>& h) {
    double t = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < W; ++w) {
      for (std::size_t k = 0; k < nk; ++k) {
        if (h[w][k] < 0.0) t = std::min(t, base.density[w][k] / (-h[w][k]));
      }
    }
    return t;
  };

  // Ratio of the honestly recomputed ASO difference to the rule distance.
  const auto evaluate_ratio = [&](const std::vector<std::vector<double>>& h, double scale,
                                  double norm) {
    DiscretizedSelectionRule moved = base;
    for (std::size_t w = 0; w < W; ++w) {
      for (std::size_t k = 0; k < nk; ++k) moved.density[w][k] += scale * h[w][k];
    }
    const std::vector<double> aso_moved = aso(table, moved);
    double diff_sq = 0.0;
    for (std::size_t c = 0; c < table.dim; ++c) {
      const double d = aso_moved[c] - aso_base[c];
      diff_sq += d * d;
    }
    return std::sqrt(diff_sq) / (scale * norm);
  };

  std::vector<std::vector<double>> h(W, std::vector<double>(nk, 0.0));
  for (std::size_t t = 0; t < n_perturbations; ++t) {
    SubstreamRng rng(SubstreamRng::derive(seed, kPerturbTag, t));
    for (std::size_t w = 0; w < W; ++w) {
      for (std::size_t k = 0; k < nk; ++k) h[w][k] = rng.next_normal();
      const double mean = weighted_mean(table.eta.mass, h[w].data(), 1, nk);
      for (std::size_t k = 0; k < nk; ++k) h[w][k] -= mean;
    }
    const double norm = direction_norm(h);
    if (norm == 0.0) continue;
    const double target = K * (0.25 + 0.75 * rng.next_unit());
    const double scale = std::min(target / norm, feasible_scale(h) * (1.0 - 1e-12));
    if (!(scale > 0.0)) continue;
    const double ratio = evaluate_ratio(h, scale, norm);
    report.max_observed_ratio = std::max(report.max_observed_ratio, ratio);
    ++report.perturbations;
  }

  // Deviation-aligned direction: combine the per-component eta deviations
  // with the leading eigenvector of their Gram matrix. For a scalar outcome
  // this is the deviation itself.
  const std::vector<double> means = eta_means(table);
  std::vector<double> gram(table.dim * table.dim, 0.0);
  for (std::size_t w = 0; w < W; ++w) {
    for (std::size_t k = 0; k < nk; ++k) {
      const double weight = table.w_weight[w] * table.eta.mass[k];
      for (std::size_t c = 0; c < table.dim; ++c) {
        const double dc = table.rho_at(w, k, c) - means[w * table.dim + c];
        for (std::size_t c2 = 0; c2 < table.dim; ++c2) {
          const double d2 = table.rho_at(w, k, c2) - means[w * table.dim + c2];
          gram[c * table.dim + c2] += weight * dc * d2;
        }
      }
    }
  }
  std::vector<double> direction(table.dim, 0.0);
  if (table.dim == 1) {
    direction[0] = 1.0;
  } else if (table.dim == 2) {
    // Closed-form leading eigenvector of the 2x2 Gram matrix.
    const double a = gram[0];
    const double b = gram[1];
    const double c = gram[3];
    const double half_gap = 0.5 * (a - c);
    const double radius = std::sqrt(half_gap * half_gap + b * b);
    const double top = 0.5 * (a + c) + radius;
    if (b == 0.0) {
      direction[a >= c ? 0 : 1] = 1.0;
    } else {
      const double n1 = b * b + (top - a) * (top - a);
      const double n2 = (top - c) * (top - c) + b * b;
      if (n1 >= n2) {
        direction = {b / std::sqrt(n1), (top - a) / std::sqrt(n1)};
      } else {
        direction = {(top - c) / std::sqrt(n2), b / std::sqrt(n2)};
      }
    }
  } else {
    // Power iteration seeded from the heaviest Gram column.
    std::size_t seed_col = 0;
    double best = -1.0;
    for (std::size_t c = 0; c < table.dim; ++c) {
      double colsq = 0.0;
      for (std::size_t c2 = 0; c2 < table.dim; ++c2) {
        colsq += gram[c2 * table.dim + c] * gram[c2 * table.dim + c];
      }
      if (colsq > best) {
        best = colsq;
        seed_col = c;
      }
    }
    for (std::size_t c = 0; c < table.dim; ++c) direction[c] = gram[c * table.dim + seed_col];
    direction[seed_col] += 1e-300;  // keep nonzero when the Gram vanishes
    for (int iter = 0; iter < 200; ++iter) {
      std::vector<double> next(table.dim, 0.0);
      for (std::size_t c = 0; c < table.dim; ++c) {
        for (std::size_t c2 = 0; c2 < table.dim; ++c2) {
          next[c] += gram[c * table.dim + c2] * direction[c2];
        }
      }
      double norm = 0.0;
      for (double v : next) norm += v * v;
      norm = std::sqrt(norm);
      if (norm == 0.0) break;
      for (double& v : next) v /= norm;
      direction = std::move(next);
    }
  }

  for (std::size_t w = 0; w < W; ++w) {
    for (std::size_t k = 0; k < nk; ++k) {
      double v = 0.0;
      for (std::size_t c = 0; c < table.dim; ++c) {
        v += direction[c] * (table.rho_at(w, k, c) - means[w * table.dim + c]);
      }
      h[w][k] = v;
    }
    // Mean-zero to rounding; re-center so huge feasibility scales stay exact.
    const double mean = weighted_mean(table.eta.mass, h[w].data(), 1, nk);
    for (std::size_t k = 0; k < nk; ++k) h[w][k] -= mean;
  }
  const double norm = direction_norm(h);
  if (norm > 0.0) {
    const double scale = std::min(K / norm, feasible_scale(h) * (1.0 - 1e-12));
    if (scale > 0.0) {
      report.extremal_ratio = evaluate_ratio(h, scale, norm);
      report.extremal_feasible = true;
    }
  }
  return report;
}

}  // namespace lrr
