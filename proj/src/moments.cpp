#include "lrr/moments.hpp"

#include <cmath>
#include <stdexcept>

namespace lrr {

MomentMatrix moment_matrix(const Dataset& data, const MomentModel& model,
                           const ParameterPoint& theta) {
  MomentMatrix m;
  m.n = data.rows;
  m.p = model.moment_count();
  m.values.resize(m.n * m.p);
  for (std::size_t i = 0; i < m.n; ++i) {
    model.evaluate(data.row(i), theta, std::span<double>(m.values.data() + i * m.p, m.p));
  }
  return m;
}

MomentSummary summarize(const MomentMatrix& matrix) {
  if (matrix.n < 2) throw std::invalid_argument("sample moments need at least 2 observations");
  MomentSummary s;
  s.n = matrix.n;
  s.mbar.assign(matrix.p, 0.0);
  s.sigma_hat.assign(matrix.p, 0.0);
  for (std::size_t i = 0; i < matrix.n; ++i) {
    for (std::size_t j = 0; j < matrix.p; ++j) s.mbar[j] += matrix.at(i, j);
  }
  const double inv_n = 1.0 / static_cast<double>(matrix.n);
  for (std::size_t j = 0; j < matrix.p; ++j) s.mbar[j] *= inv_n;
  for (std::size_t i = 0; i < matrix.n; ++i) {
    for (std::size_t j = 0; j < matrix.p; ++j) {
      const double d = matrix.at(i, j) - s.mbar[j];
      s.sigma_hat[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < matrix.p; ++j) {
    s.sigma_hat[j] = std::sqrt(s.sigma_hat[j] * inv_n);
  }
  return s;
}

MomentSummary sample_moments(const Dataset& data, const MomentModel& model,
                             const ParameterPoint& theta) {
  return summarize(moment_matrix(data, model, theta));
}

double normalized_moment(double mbar, double sigma) {
  if (sigma < kSigmaFloor) {
    if (mbar <= 0.0) return kClampedMoment;
    return mbar / kSigmaFloor;
  }
  return mbar / sigma;
}

double q_hat(const MomentSummary& summary, double kappa) {
  double total = 0.0;
  for (std::size_t j = 0; j < summary.mbar.size(); ++j) {
    const double v = normalized_moment(summary.mbar[j], summary.sigma_hat[j]) + kappa;
    if (v > 0.0) total += v;
  }
  return total;
}

double test_statistic(const MomentSummary& summary) {
  return std::sqrt(static_cast<double>(summary.n)) * q_hat(summary, 0.0);
}

GridMask gamma_hat_kappa(const Dataset& data, const MomentModel& model,
                         const ParameterGrid& grid, std::size_t beta_flat, double kappa) {
  const ParameterGrid gsub = grid.gamma_subgrid();
  GridMask mask(gsub);
  for (std::size_t g = 0; g < gsub.size(); ++g) {
    const ParameterPoint theta = grid.point(grid.flat_from_parts(beta_flat, g));
    const MomentSummary s = sample_moments(data, model, theta);
    mask.set(g, q_hat(s, kappa) <= kZeroTol);
  }
  return mask;
}

}  // namespace lrr
