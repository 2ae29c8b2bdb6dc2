#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace feddmf {

// Dense row-major matrix of doubles. The universal numeric carrier for
// embeddings, layer weights and gradients.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows * cols, row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }

  std::span<double> row_span(std::size_t r) { return {row(r), cols}; }
  std::span<const double> row_span(std::size_t r) const { return {row(r), cols}; }

  std::size_t size() const { return data.size(); }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

  std::string shape_str() const {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%zux%zu", rows, cols);
    return buf;
  }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  void fill(double v) { data.assign(data.size(), v); }
};

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                a.shape_str() + " vs " + b.shape_str());
}

// copies the listed rows of `table` into a new |rows| x cols matrix
inline Matrix gather_rows(const Matrix& table, std::span<const std::uint32_t> rows) {
  Matrix out(rows.size(), table.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double* src = table.row(rows[i]);
    double* dst = out.row(i);
    for (std::size_t k = 0; k < table.cols; ++k) dst[k] = src[k];
  }
  return out;
}

// C = A * B
inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    throw std::invalid_argument("matmul: inner dims differ, " + a.shape_str() +
                                " * " + b.shape_str());
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      const double* brow = b.row(k);
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

// C += A^T * B   (A: n x r, B: n x c, C: r x c)
inline void matmul_at_b_accum(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.rows != b.rows || c.rows != a.cols || c.cols != b.cols)
    throw std::invalid_argument("matmul_at_b_accum: shape mismatch " + a.shape_str() +
                                "^T * " + b.shape_str() + " -> " + c.shape_str());
  for (std::size_t n = 0; n < a.rows; ++n) {
    const double* arow = a.row(n);
    const double* brow = b.row(n);
    for (std::size_t i = 0; i < a.cols; ++i) {
      const double ani = arow[i];
      double* crow = c.row(i);
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += ani * brow[j];
    }
  }
}

// C = A * B^T   (A: n x c, B: m x c, C: n x m)
inline Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols)
    throw std::invalid_argument("matmul_a_bt: inner dims differ, " + a.shape_str() +
                                " * " + b.shape_str() + "^T");
  Matrix c(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (std::size_t j = 0; j < b.rows; ++j) {
      const double* brow = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) s += arow[k] * brow[k];
      crow[j] = s;
    }
  }
  return c;
}

}  // namespace feddmf
