#include "lrr/grid.hpp"

#include <cmath>

namespace lrr {

namespace {

void require_same_grid(const GridMask& a, const GridMask& b) {
  if (!(a.grid() == b.grid())) {
    throw std::invalid_argument("grid mismatch between masks");
  }
}

}  // namespace

ParameterGrid::ParameterGrid(std::vector<GridAxis> axes, std::size_t beta_axes)
    : axes_(std::move(axes)), beta_axes_(beta_axes) {
  if (axes_.empty()) throw std::invalid_argument("grid needs at least one axis");
  if (beta_axes_ > axes_.size()) throw std::invalid_argument("beta_axes exceeds axis count");
  size_ = 1;
  for (const GridAxis& ax : axes_) {
    if (!(ax.lo < ax.hi)) throw std::invalid_argument("axis requires lo < hi");
    if (ax.steps < 2) throw std::invalid_argument("axis requires at least 2 steps");
    if (!std::isfinite(ax.lo) || !std::isfinite(ax.hi)) {
      throw std::invalid_argument("axis bounds must be finite");
    }
    size_ *= ax.steps;
  }
}

std::vector<std::size_t> ParameterGrid::indices(std::size_t flat) const {
  if (flat >= size_) throw std::out_of_range("flat index out of range");
  std::vector<std::size_t> idx(axes_.size());
  for (std::size_t k = axes_.size(); k-- > 0;) {
    idx[k] = flat % axes_[k].steps;
    flat /= axes_[k].steps;
  }
  return idx;
}

std::size_t ParameterGrid::flat_index(const std::vector<std::size_t>& idx) const {
  if (idx.size() != axes_.size()) throw std::invalid_argument("index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    if (idx[k] >= axes_[k].steps) throw std::out_of_range("axis index out of range");
    flat = flat * axes_[k].steps + idx[k];
  }
  return flat;
}

ParameterPoint ParameterGrid::point(std::size_t flat) const { return point(indices(flat)); }

ParameterPoint ParameterGrid::point(const std::vector<std::size_t>& idx) const {
  if (idx.size() != axes_.size()) throw std::invalid_argument("index rank mismatch");
  ParameterPoint theta;
  theta.beta.reserve(beta_axes_);
  theta.gamma.reserve(axes_.size() - beta_axes_);
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    const double c = axes_[k].coordinate(idx[k]);
    if (k < beta_axes_) {
      theta.beta.push_back(c);
    } else {
      theta.gamma.push_back(c);
    }
  }
  return theta;
}

ParameterGrid ParameterGrid::beta_subgrid() const {
  std::vector<GridAxis> sub(axes_.begin(), axes_.begin() + static_cast<std::ptrdiff_t>(beta_axes_));
  return ParameterGrid(std::move(sub), beta_axes_);
}

ParameterGrid ParameterGrid::gamma_subgrid() const {
  std::vector<GridAxis> sub(axes_.begin() + static_cast<std::ptrdiff_t>(beta_axes_), axes_.end());
  return ParameterGrid(std::move(sub), 0);
}

std::size_t ParameterGrid::beta_size() const {
  std::size_t s = 1;
  for (std::size_t k = 0; k < beta_axes_; ++k) s *= axes_[k].steps;
  return s;
}

std::size_t ParameterGrid::gamma_size() const {
  std::size_t s = 1;
  for (std::size_t k = beta_axes_; k < axes_.size(); ++k) s *= axes_[k].steps;
  return s;
}

std::size_t ParameterGrid::flat_from_parts(std::size_t beta_flat, std::size_t gamma_flat) const {
  const std::size_t gsize = gamma_size();
  if (beta_flat >= beta_size() || gamma_flat >= gsize) {
    throw std::out_of_range("sub-grid index out of range");
  }
  return beta_flat * gsize + gamma_flat;
}

std::vector<ParameterPoint> enumerate(const ParameterGrid& grid) {
  std::vector<ParameterPoint> points;
  points.reserve(grid.size());
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    points.push_back(grid.point(flat));
  }
  return points;
}

std::size_t GridMask::count() const {
  std::size_t c = 0;
  for (unsigned char f : flags_) c += f;
  return c;
}

bool mask_subset(const GridMask& a, const GridMask& b) {
  require_same_grid(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.test(i) && !b.test(i)) return false;
  }
  return true;
}

GridMask mask_intersection(const GridMask& a, const GridMask& b) {
  require_same_grid(a, b);
  GridMask out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.test(i) && b.test(i));
  return out;
}

GridMask mask_union(const GridMask& a, const GridMask& b) {
  require_same_grid(a, b);
  GridMask out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.test(i) || b.test(i));
  return out;
}

}  // namespace lrr
