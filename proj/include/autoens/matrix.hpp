#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "autoens/error.hpp"

namespace autoens {

// Dense row-major matrix of doubles. Deliberately minimal: the weight
// matrices in this library are tiny, so clarity and a fixed accumulation
// order beat BLAS throughput.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows * cols, row-major

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  DenseMatrix(std::size_t r, std::size_t c, std::vector<double> values)
      : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != rows * cols) {
      throw ShapeError("matrix data length " + std::to_string(data.size()) +
                       " != " + std::to_string(rows) + "x" + std::to_string(cols));
    }
  }

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  bool all_finite() const {
    for (double v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  double frobenius_norm() const {
    double sum = 0.0;
    for (double v : data) sum += v * v;
    return std::sqrt(sum);
  }

  bool operator==(const DenseMatrix&) const = default;
};

// Standard matrix product with a fixed left-to-right accumulation order over
// the inner index. The determinism tests in the search/cluster modules rely
// on every reduction in the library being order-fixed.
inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) {
    throw ShapeError("matmul: " + std::to_string(a.rows) + "x" +
                     std::to_string(a.cols) + " times " + std::to_string(b.rows) +
                     "x" + std::to_string(b.cols));
  }
  DenseMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < b.cols; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) {
        acc += a.at(i, k) * b.at(k, j);
      }
      out.at(i, j) = acc;
    }
  }
  return out;
}

// Dot product with fixed accumulation order.
inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw ShapeError("dot: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double l2_norm(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace autoens
