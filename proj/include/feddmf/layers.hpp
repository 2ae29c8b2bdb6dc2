#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "feddmf/matrix.hpp"
#include "feddmf/rng.hpp"

namespace feddmf {

// Fully connected layer, y = x W + b, with accumulating gradients.
class DenseLayer {
 public:
  DenseLayer(std::size_t in_dim, std::size_t out_dim)
      : weight(in_dim, out_dim),
        grad_weight(in_dim, out_dim),
        bias(out_dim, 0.0),
        grad_bias(out_dim, 0.0) {
    if (in_dim == 0 || out_dim == 0)
      throw std::invalid_argument("DenseLayer: dims must be >= 1");
  }

  std::size_t in_dim() const { return weight.rows; }
  std::size_t out_dim() const { return weight.cols; }

  void init_uniform(Rng& rng, double lo, double hi) {
    for (double& w : weight.data) w = rng.uniform(lo, hi);
    for (double& b : bias) b = rng.uniform(lo, hi);
  }

  // Caches the input for the next backward call.
  Matrix forward(const Matrix& input) {
    Matrix out = apply(input);
    cached_input_ = input;
    has_cached_input_ = true;
    return out;
  }

  // Pure forward, no cache; usable on const layers (eval paths).
  Matrix apply(const Matrix& input) const {
    if (input.cols != in_dim())
      throw std::invalid_argument("dense_forward: input cols " +
                                  std::to_string(input.cols) + " != layer in_dim " +
                                  std::to_string(in_dim()) + " (input " + input.shape_str() +
                                  ", weight " + weight.shape_str() + ")");
    Matrix out = matmul(input, weight);
    for (std::size_t i = 0; i < out.rows; ++i) {
      double* orow = out.row(i);
      for (std::size_t j = 0; j < out.cols; ++j) orow[j] += bias[j];
    }
    return out;
  }

  // Accumulates grad_weight += x^T g, grad_bias += colsum(g); returns g W^T.
  Matrix backward(const Matrix& grad_out) {
    if (!has_cached_input_)
      throw std::runtime_error("dense_backward: no cached forward input");
    if (grad_out.cols != out_dim() || grad_out.rows != cached_input_.rows)
      throw std::invalid_argument("dense_backward: grad_out " + grad_out.shape_str() +
                                  " does not match forward batch " +
                                  cached_input_.shape_str() + " with out_dim " +
                                  std::to_string(out_dim()));
    matmul_at_b_accum(cached_input_, grad_out, grad_weight);
    for (std::size_t i = 0; i < grad_out.rows; ++i) {
      const double* grow = grad_out.row(i);
      for (std::size_t j = 0; j < grad_out.cols; ++j) grad_bias[j] += grow[j];
    }
    return matmul_a_bt(grad_out, weight);
  }

  void zero_grads() {
    grad_weight.fill(0.0);
    grad_bias.assign(grad_bias.size(), 0.0);
  }

  Matrix weight;      // in_dim x out_dim
  Matrix grad_weight;
  std::vector<double> bias;  // out_dim
  std::vector<double> grad_bias;

 private:
  Matrix cached_input_;
  bool has_cached_input_ = false;
};

inline Matrix relu(const Matrix& input) {
  Matrix out = input;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

inline Matrix relu_backward(const Matrix& grad_out, const Matrix& cached_input) {
  require_same_shape(grad_out, cached_input, "relu_backward");
  Matrix g = grad_out;
  for (std::size_t i = 0; i < g.data.size(); ++i)
    if (cached_input.data[i] <= 0.0) g.data[i] = 0.0;
  return g;
}

struct DropoutResult {
  Matrix output;
  Matrix mask;  // per-element scale: 0 (dropped) or 1/(1-rate) (kept); all ones in eval
};

// Inverted dropout: kept elements are scaled at train time so eval is identity.
inline DropoutResult dropout(const Matrix& input, double rate, bool train, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw std::invalid_argument("dropout: rate must be in [0,1), got " + std::to_string(rate));
  DropoutResult r;
  r.mask = Matrix(input.rows, input.cols, 1.0);
  if (!train || rate == 0.0) {
    r.output = input;
    return r;
  }
  const double scale = 1.0 / (1.0 - rate);
  r.output = input;
  for (std::size_t i = 0; i < input.data.size(); ++i) {
    if (rng.uniform() < rate) {
      r.mask.data[i] = 0.0;
      r.output.data[i] = 0.0;
    } else {
      r.mask.data[i] = scale;
      r.output.data[i] *= scale;
    }
  }
  return r;
}

inline Matrix dropout_backward(const Matrix& grad_out, const Matrix& mask) {
  require_same_shape(grad_out, mask, "dropout_backward");
  Matrix g = grad_out;
  for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] *= mask.data[i];
  return g;
}

inline double sigmoid_scalar(double x) {
  double y;
  if (x >= 0.0) {
    y = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    y = e / (1.0 + e);
  }
  // keep outputs strictly inside (0,1) even at saturation
  const double hi = std::nextafter(1.0, 0.0);
  const double lo = std::numeric_limits<double>::min();
  if (y > hi) y = hi;
  if (y < lo) y = lo;
  return y;
}

inline Matrix sigmoid(const Matrix& input) {
  Matrix out = input;
  for (double& v : out.data) v = sigmoid_scalar(v);
  return out;
}

}  // namespace feddmf
