#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrr {

// Row-major table of observations. Column meaning is a contract between
// the producer (DGP, CSV ingestion) and the moment model consuming it.
struct Dataset {
  std::vector<std::string> columns;
  std::size_t rows = 0;
  std::vector<double> values;  // rows * columns.size(), row-major

  std::size_t cols() const { return columns.size(); }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values.data() + i * cols(), cols());
  }

  double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }

  void append_row(std::span<const double> r) {
    if (r.size() != cols()) throw std::invalid_argument("row width mismatch");
    values.insert(values.end(), r.begin(), r.end());
    ++rows;
  }

  std::size_t column_index(const std::string& name) const {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j] == name) return j;
    }
    throw std::invalid_argument("dataset has no column named " + name);
  }
};

}  // namespace lrr
