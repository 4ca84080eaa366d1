#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pupilload {

/// Dense row-major matrix of doubles. Just enough linear-algebra surface for
/// the learners; not a general math library.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data.data() + i * cols, cols);
  }
  std::span<double> row(std::size_t i) {
    return std::span<double>(data.data() + i * cols, cols);
  }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows_in) {
    Matrix m(rows_in.size(), rows_in.empty() ? 0 : rows_in.front().size());
    for (std::size_t i = 0; i < rows_in.size(); ++i)
      for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rows_in[i][j];
    return m;
  }
};

}  // namespace pupilload
