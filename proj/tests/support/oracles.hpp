// Independent oracles used to check the library: these deliberately avoid the
// implementation paths they verify (naive loops, finite differences).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "feddmf/matrix.hpp"
#include "feddmf/metrics.hpp"

namespace oracle {

// plain triple-loop matrix multiply
inline feddmf::Matrix matmul_naive(const feddmf::Matrix& a, const feddmf::Matrix& b) {
  feddmf::Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) s += a.at(i, k) * b.at(k, j);
      c.at(i, j) = s;
    }
  return c;
}

// central finite difference of `loss` with respect to the value in `slot`
inline double fd_central(const std::function<double()>& loss, double& slot, double h = 1e-6) {
  const double orig = slot;
  slot = orig + h;
  const double lp = loss();
  slot = orig - h;
  const double lm = loss();
  slot = orig;
  return (lp - lm) / (2.0 * h);
}

// relative error with a floor so near-zero pairs compare on absolute terms
inline double rel_err(double a, double b, double floor = 1e-3) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / scale;
}

// direct tally, independent of feddmf::confusion
inline feddmf::ConfusionCounts confusion_naive(std::span<const double> scores,
                                               std::span<const double> labels, double t) {
  feddmf::ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > t) {
      if (labels[i] == 1.0) ++c.tp;
      else ++c.fp;
    } else {
      if (labels[i] == 1.0) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

inline double mean_naive(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double pop_std_naive(std::span<const double> v) {
  const double m = mean_naive(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace oracle
