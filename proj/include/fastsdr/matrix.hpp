#pragma once

#include <cstddef>
#include <vector>

namespace fastsdr {

/// Row-major dense real matrix for small result tables (K x M).
struct RealMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  RealMatrix() = default;
  RealMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }

  RealMatrix transposed() const {
    RealMatrix t(cols, rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
    }
    return t;
  }
};

}  // namespace fastsdr
