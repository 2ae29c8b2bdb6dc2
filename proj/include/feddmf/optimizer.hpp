#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "feddmf/layers.hpp"
#include "feddmf/matrix.hpp"

namespace feddmf {

// One SGD step over a flat parameter slab: p -= lr * g, then g = 0.
// With momentum > 0 and a velocity buffer: v = momentum*v + g; p -= lr*v.
// Aborts on non-finite gradients, naming the offending tensor.
inline void sgd_step(double* param, double* grad, std::size_t n, double lr,
                     std::string_view name, double momentum = 0.0,
                     double* velocity = nullptr) {
  if (momentum > 0.0 && velocity == nullptr)
    throw std::invalid_argument("sgd_step: momentum requires a velocity buffer");
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    if (!std::isfinite(g))
      throw std::runtime_error("sgd_step: non-finite gradient in " + std::string(name));
    if (momentum > 0.0) {
      velocity[i] = momentum * velocity[i] + g;
      param[i] -= lr * velocity[i];
    } else {
      param[i] -= lr * g;
    }
    grad[i] = 0.0;
  }
}

inline void sgd_step(Matrix& param, Matrix& grad, double lr, std::string_view name,
                     double momentum = 0.0, Matrix* velocity = nullptr) {
  require_same_shape(param, grad, "sgd_step");
  sgd_step(param.data.data(), grad.data.data(), param.size(), lr, name, momentum,
           velocity ? velocity->data.data() : nullptr);
}

struct LayerVelocity {
  Matrix weight;
  std::vector<double> bias;
};

inline void sgd_step(DenseLayer& layer, double lr, std::string_view name,
                     double momentum = 0.0, LayerVelocity* velocity = nullptr) {
  sgd_step(layer.weight, layer.grad_weight, lr, std::string(name) + ".weight", momentum,
           velocity ? &velocity->weight : nullptr);
  sgd_step(layer.bias.data(), layer.grad_bias.data(), layer.bias.size(), lr,
           std::string(name) + ".bias", momentum,
           velocity ? velocity->bias.data() : nullptr);
}

}  // namespace feddmf
