#include "lrr/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "lrr/normal.hpp"

namespace lrr {

namespace {

constexpr double kNegligibleMass = 1e-14;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// x'theta for an atom laid out as [x_beta..., x_gamma..., extra...].
double atom_x_theta(std::span<const double> atom, const ParameterPoint& theta) {
  const std::size_t db = theta.beta.size();
  const std::size_t dg = theta.gamma.size();
  if (atom.size() < db + dg) throw std::invalid_argument("atom shorter than theta layout");
  return dot(atom.first(db), theta.beta) + dot(atom.subspan(db, dg), theta.gamma);
}

// Equal-probability strata of N(0,1) restricted to (lo_p, hi_p) in
// probability space, with each node at the conditional mean of its cell.
// Linear integrands then aggregate exactly (the phi terms telescope).
void append_strata(EpsQuadrature& quad, double lo_p, double hi_p, double lo_e, double hi_e,
                   std::size_t cells) {
  const double total = hi_p - lo_p;
  if (total < kNegligibleMass) return;
  const double w = total / static_cast<double>(cells);
  double prev_e = lo_e;
  double prev_pdf = std::isinf(lo_e) ? 0.0 : norm_pdf(lo_e);
  for (std::size_t i = 1; i <= cells; ++i) {
    double cur_e;
    if (i == cells) {
      cur_e = hi_e;
    } else {
      cur_e = norm_quantile(lo_p + total * static_cast<double>(i) / static_cast<double>(cells));
    }
    const double cur_pdf = std::isinf(cur_e) ? 0.0 : norm_pdf(cur_e);
    quad.nodes.push_back((prev_pdf - cur_pdf) / w);
    quad.weights.push_back(w);
    prev_e = cur_e;
    prev_pdf = cur_pdf;
  }
  (void)prev_e;
}

}  // namespace

// ---------------------------------------------------------------------------
// Interval model
// ---------------------------------------------------------------------------

Dataset make_interval_dataset() {
  Dataset d;
  d.columns = {"z1_tilde", "z2_tilde", "x", "y_star", "censored"};
  return d;
}

void append_observation(Dataset& data, const IntervalObservation& obs) {
  const double row[5] = {obs.z1_tilde, obs.z2_tilde, static_cast<double>(obs.x_binary),
                         obs.y_star, obs.censored ? 1.0 : 0.0};
  data.append_row(std::span<const double>(row, 5));
}

IntervalObservation interval_observation(std::span<const double> row) {
  IntervalObservation obs;
  obs.z1_tilde = row[0];
  obs.z2_tilde = row[1];
  obs.x_binary = row[2] > 0.5 ? 1 : 0;
  if (row.size() >= 5) {
    obs.y_star = row[3];
    obs.censored = row[4] > 0.5;
  }
  return obs;
}

std::array<double, 4> interval_moments(const IntervalObservation& obs, double beta, double gamma) {
  if (obs.x_binary == 0) {
    return {obs.z1_tilde - beta, beta - obs.z2_tilde, 0.0, 0.0};
  }
  return {0.0, 0.0, obs.z1_tilde - (beta + gamma), (beta + gamma) - obs.z2_tilde};
}

double interval_rho(double x_theta, double z1, double z2, double eps, double eta) {
  const double y_star = x_theta + eps;
  if (y_star <= z1) return y_star;
  // eta*z1 + (1-eta)*z2, written so a zero-width bracket is exactly constant.
  return z2 + eta * (z1 - z2);
}

double q_lrr_interval(const ParameterPoint& theta, const CounterfactualContext& context) {
  context.validate();
  const std::size_t db = theta.beta.size();
  const std::size_t dg = theta.gamma.size();
  double total = 0.0;
  for (std::size_t a = 0; a < context.atoms.size(); ++a) {
    const std::vector<double>& atom = context.atoms[a];
    if (atom.size() != db + dg + 2) {
      throw std::invalid_argument("interval atom must be [x..., z1, z2]");
    }
    const double z1 = atom[db + dg];
    const double z2 = atom[db + dg + 1];
    const double width = z1 - z2;
    const double x_theta = atom_x_theta(atom, theta);
    total += context.weights[a] * width * width * (1.0 - norm_cdf(z1 - x_theta));
  }
  return total / 12.0;
}

void IntervalModel::evaluate(std::span<const double> row, const ParameterPoint& theta,
                             std::span<double> out) const {
  if (theta.beta.size() != 1 || theta.gamma.size() != 1) {
    throw std::invalid_argument("interval moments use scalar beta and gamma");
  }
  const std::array<double, 4> m =
      interval_moments(interval_observation(row), theta.beta[0], theta.gamma[0]);
  std::copy(m.begin(), m.end(), out.begin());
}

EtaGrid IntervalModel::eta_grid(std::size_t bins) const {
  if (bins < 1) throw std::invalid_argument("eta grid needs at least one bin");
  EtaGrid grid;
  grid.eta.resize(bins);
  grid.mass.assign(bins, 1.0 / static_cast<double>(bins));
  for (std::size_t k = 0; k < bins; ++k) {
    grid.eta[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(bins);
  }
  return grid;
}

EpsQuadrature IntervalModel::epsilon_quadrature(std::span<const double> atom,
                                                const ParameterPoint& theta,
                                                std::size_t budget) const {
  const std::size_t db = theta.beta.size();
  const std::size_t dg = theta.gamma.size();
  if (atom.size() != db + dg + 2) {
    throw std::invalid_argument("interval atom must be [x..., z1, z2]");
  }
  const double z1 = atom[db + dg];
  const double cut = z1 - atom_x_theta(atom, theta);
  const double below = norm_cdf(cut);

  EpsQuadrature quad;
  quad.dim = 1;
  if (budget < 2) budget = 2;
  // One stratum set per censoring branch; the outcome is piecewise in eps
  // with the kink at `cut`, so branch membership is exact by construction.
  const std::size_t cells_below = std::max<std::size_t>(1, (budget * 2) / 3);
  const std::size_t cells_above = std::max<std::size_t>(1, budget - cells_below);
  const double inf = std::numeric_limits<double>::infinity();
  append_strata(quad, 0.0, below, -inf, cut, cells_below);
  append_strata(quad, below, 1.0, cut, inf, cells_above);
  return quad;
}

void IntervalModel::structural_outcome(std::span<const double> atom, std::span<const double> eps,
                                       double eta, const ParameterPoint& theta,
                                       std::span<double> out) const {
  const std::size_t db = theta.beta.size();
  const std::size_t dg = theta.gamma.size();
  const double z1 = atom[db + dg];
  const double z2 = atom[db + dg + 1];
  out[0] = interval_rho(atom_x_theta(atom, theta), z1, z2, eps[0], eta);
}

CounterfactualContext interval_context_from_data(const Dataset& data, double z1, double z2) {
  if (data.rows == 0) throw std::invalid_argument("empty dataset has no covariate atoms");
  std::map<double, std::size_t> counts;
  for (std::size_t i = 0; i < data.rows; ++i) ++counts[data.at(i, 2)];
  CounterfactualContext ctx;
  for (const auto& [x, count] : counts) {
    ctx.atoms.push_back({1.0, x, z1, z2});
    ctx.weights.push_back(static_cast<double>(count) / static_cast<double>(data.rows));
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// Entry game
// ---------------------------------------------------------------------------

ParameterPoint EntryParameters::to_point() const {
  if (gamma1.size() != gamma2.size()) {
    throw std::invalid_argument("entry gammas must have matching dimensions");
  }
  ParameterPoint theta;
  theta.beta = {beta1, beta2};
  theta.gamma = gamma1;
  theta.gamma.insert(theta.gamma.end(), gamma2.begin(), gamma2.end());
  return theta;
}

EntryParameters EntryParameters::from_point(const ParameterPoint& theta) {
  if (theta.beta.size() != 2 || theta.gamma.size() % 2 != 0 || theta.gamma.empty()) {
    throw std::invalid_argument("entry theta needs beta=(b1,b2) and an even gamma block");
  }
  EntryParameters p;
  p.beta1 = theta.beta[0];
  p.beta2 = theta.beta[1];
  const std::size_t half = theta.gamma.size() / 2;
  p.gamma1.assign(theta.gamma.begin(), theta.gamma.begin() + static_cast<std::ptrdiff_t>(half));
  p.gamma2.assign(theta.gamma.begin() + static_cast<std::ptrdiff_t>(half), theta.gamma.end());
  return p;
}

EntryRegions entry_regions(std::span<const double> x, const EntryParameters& params) {
  if (x.size() != params.gamma1.size() || x.size() != params.gamma2.size()) {
    throw std::invalid_argument("covariate dimension mismatch in entry game");
  }
  if (params.beta1 > 0.0 || params.beta2 > 0.0) {
    throw std::invalid_argument(
        "entry game regions require nonpositive strategic interactions");
  }
  EntryRegions r;
  r.t1 = dot(x, params.gamma1);
  r.t2 = dot(x, params.gamma2);
  r.beta1 = params.beta1;
  r.beta2 = params.beta2;
  return r;
}

std::pair<double, double> entry_rho(std::span<const double> x, double e1, double e2, double eta,
                                    const EntryParameters& params) {
  const EntryRegions r = entry_regions(x, params);
  const bool a2 = r.in_a2(e1, e2);
  const bool a3 = r.in_a3(e1, e2);
  const bool a4 = r.in_a4(e1, e2);
  double rho1 = 0.0;
  double rho2 = 0.0;
  if (a2) {
    rho1 = 1.0;
    rho2 = 1.0;
  } else if (a3 && a4) {
    rho1 = eta;
    rho2 = 1.0 - eta;
  } else if (a4) {
    rho1 = 1.0;
  } else if (a3) {
    rho2 = 1.0;
  }
  return {rho1, rho2};
}

double multiplicity_probability(std::span<const double> x, const EntryParameters& params) {
  const EntryRegions r = entry_regions(x, params);
  const double side1 = norm_cdf(r.t1) - norm_cdf(r.t1 + r.beta1);
  const double side2 = norm_cdf(r.t2) - norm_cdf(r.t2 + r.beta2);
  return side1 * side2;
}

double q_lrr_entry(const ParameterPoint& theta, const CounterfactualContext& context) {
  context.validate();
  const EntryParameters params = EntryParameters::from_point(theta);
  double total = 0.0;
  for (std::size_t a = 0; a < context.atoms.size(); ++a) {
    total += context.weights[a] * multiplicity_probability(context.atoms[a], params);
  }
  return 0.5 * total;
}

EtaGrid EntryGameModel::eta_grid(std::size_t bins) const {
  (void)bins;
  EtaGrid grid;
  grid.eta = {0.0, 1.0};
  grid.mass = {0.5, 0.5};
  return grid;
}

EpsQuadrature EntryGameModel::epsilon_quadrature(std::span<const double> atom,
                                                 const ParameterPoint& theta,
                                                 std::size_t budget) const {
  (void)budget;
  const EntryParameters params = EntryParameters::from_point(theta);
  const EntryRegions r = entry_regions(atom, params);

  // Per-axis strata split at the region boundaries; the outcome is constant
  // on each of the product cells, so the cell probabilities integrate it
  // exactly. Nodes sit at the cell conditional means.
  struct AxisCell {
    double mean;
    double prob;
  };
  const auto axis_cells = [](double lo, double hi) {
    if (lo > hi) std::swap(lo, hi);
    std::vector<AxisCell> cells;
    const double p_lo = norm_cdf(lo);
    const double p_hi = norm_cdf(hi);
    const double pdf_lo = norm_pdf(lo);
    const double pdf_hi = norm_pdf(hi);
    if (p_lo > kNegligibleMass) cells.push_back({-pdf_lo / p_lo, p_lo});
    if (p_hi - p_lo > kNegligibleMass) {
      cells.push_back({(pdf_lo - pdf_hi) / (p_hi - p_lo), p_hi - p_lo});
    }
    if (1.0 - p_hi > kNegligibleMass) cells.push_back({pdf_hi / (1.0 - p_hi), 1.0 - p_hi});
    return cells;
  };

  const std::vector<AxisCell> one = axis_cells(r.beta1 + r.t1, r.t1);
  const std::vector<AxisCell> two = axis_cells(r.beta2 + r.t2, r.t2);
  EpsQuadrature quad;
  quad.dim = 2;
  for (const AxisCell& c1 : one) {
    for (const AxisCell& c2 : two) {
      quad.nodes.push_back(c1.mean);
      quad.nodes.push_back(c2.mean);
      quad.weights.push_back(c1.prob * c2.prob);
    }
  }
  return quad;
}

void EntryGameModel::structural_outcome(std::span<const double> atom,
                                        std::span<const double> eps, double eta,
                                        const ParameterPoint& theta,
                                        std::span<double> out) const {
  const EntryParameters params = EntryParameters::from_point(theta);
  const auto [rho1, rho2] = entry_rho(atom, eps[0], eps[1], eta, params);
  out[0] = rho1;
  out[1] = rho2;
}

}  // namespace lrr
