#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lrr {

// A parameter value theta = (beta, gamma): beta is the parameter of
// interest, gamma the nuisance block. Dimensions are fixed per model.
struct ParameterPoint {
  std::vector<double> beta;
  std::vector<double> gamma;
};

// One closed-interval axis. Points are lo + i*(hi-lo)/(steps-1) for
// i = 0..steps-1, evaluated in exactly that expression order so the same
// indices always reproduce the same coordinates bit for bit.
struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t steps = 2;

  double coordinate(std::size_t i) const {
    return lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(steps - 1);
  }

  bool operator==(const GridAxis&) const = default;
};

// Rectangular lattice over theta. The first beta_axes axes carry beta
// coordinates, the rest gamma. Enumeration is row-major with the last
// axis varying fastest. Immutable after construction.
class ParameterGrid {
 public:
  ParameterGrid() = default;
  ParameterGrid(std::vector<GridAxis> axes, std::size_t beta_axes);

  std::size_t axis_count() const { return axes_.size(); }
  std::size_t beta_axis_count() const { return beta_axes_; }
  const GridAxis& axis(std::size_t k) const { return axes_.at(k); }

  // Total number of lattice points (product of per-axis step counts).
  std::size_t size() const { return size_; }

  std::vector<std::size_t> indices(std::size_t flat) const;
  std::size_t flat_index(const std::vector<std::size_t>& idx) const;

  ParameterPoint point(std::size_t flat) const;
  ParameterPoint point(const std::vector<std::size_t>& idx) const;

  // Sub-lattices over the beta axes only / gamma axes only.
  ParameterGrid beta_subgrid() const;
  ParameterGrid gamma_subgrid() const;
  std::size_t beta_size() const;
  std::size_t gamma_size() const;

  // flat == flat_from_parts(beta_flat, gamma_flat) for the row-major order
  // above (beta axes are the slow-running ones).
  std::size_t flat_from_parts(std::size_t beta_flat, std::size_t gamma_flat) const;

  bool operator==(const ParameterGrid&) const = default;

 private:
  std::vector<GridAxis> axes_;
  std::size_t beta_axes_ = 0;
  std::size_t size_ = 0;
};

// Deterministic enumeration of all grid points; length equals grid.size().
std::vector<ParameterPoint> enumerate(const ParameterGrid& grid);

// Boolean membership flags over a grid; represents estimated sets.
class GridMask {
 public:
  GridMask() = default;
  explicit GridMask(ParameterGrid grid, bool value = false)
      : grid_(std::move(grid)), flags_(grid_.size(), value ? 1 : 0) {}

  const ParameterGrid& grid() const { return grid_; }
  std::size_t size() const { return flags_.size(); }

  bool test(std::size_t flat) const { return flags_.at(flat) != 0; }
  void set(std::size_t flat, bool value) { flags_.at(flat) = value ? 1 : 0; }

  // Number of flagged points.
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  bool operator==(const GridMask&) const = default;

 private:
  ParameterGrid grid_;
  std::vector<unsigned char> flags_;
};

// True iff every point flagged in a is flagged in b. Throws on grid mismatch.
bool mask_subset(const GridMask& a, const GridMask& b);

GridMask mask_intersection(const GridMask& a, const GridMask& b);
GridMask mask_union(const GridMask& a, const GridMask& b);

}  // namespace lrr
