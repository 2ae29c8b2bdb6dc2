#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "feddmf/matrix.hpp"

namespace feddmf {

struct MseResult {
  double loss = 0.0;
  Matrix grad_pred;
};

// loss = (1/N) sum (pred - target)^2, grad = (2/N)(pred - target)
inline MseResult mse_loss(const Matrix& pred, const Matrix& target) {
  require_same_shape(pred, target, "mse_loss");
  const std::size_t n = pred.size();
  if (n == 0) throw std::invalid_argument("mse_loss: empty batch");
  MseResult r;
  r.grad_pred = Matrix(pred.rows, pred.cols);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pred.data[i] - target.data[i];
    r.loss += d * d * inv_n;
    r.grad_pred.data[i] = 2.0 * d * inv_n;
  }
  return r;
}

struct CosineMarginResult {
  double loss = 0.0;
  Matrix grad_local;
};

namespace detail {

inline double row_norm(const double* v, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += v[k] * v[k];
  return std::sqrt(s);
}

}  // namespace detail

// Embedding similarity loss over row pairs:
//   loss = (beta/|P|) * sum_r max(1 - cos(local_r, peer_r), margin)
// Gradient flows only into `local`; `peer` is treated as a frozen snapshot.
// Rows whose cosine distance is already <= margin contribute zero gradient.
// `peer_norms`, when given, must hold the precomputed L2 norm of each peer row.
inline CosineMarginResult cosine_margin_loss(const Matrix& local, const Matrix& peer,
                                             double margin, double beta,
                                             const std::vector<double>* peer_norms = nullptr) {
  require_same_shape(local, peer, "cosine_margin_loss");
  if (local.rows == 0) throw std::invalid_argument("cosine_margin_loss: empty pair set");
  if (!(margin >= 0.0 && margin < 1.0))
    throw std::invalid_argument("cosine_margin_loss: margin must be in [0,1)");
  if (!(beta > 0.0)) throw std::invalid_argument("cosine_margin_loss: beta must be > 0");

  const std::size_t n = local.rows, d = local.cols;
  const double w = beta / static_cast<double>(n);
  CosineMarginResult r;
  r.grad_local = Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double* a = local.row(i);
    const double* b = peer.row(i);
    double aa = 0.0, ab = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      aa += a[k] * a[k];
      ab += a[k] * b[k];
    }
    const double na = std::sqrt(aa);
    const double nb = peer_norms ? (*peer_norms)[i] : detail::row_norm(b, d);
    if (na == 0.0)
      throw std::invalid_argument("cosine_margin_loss: zero-norm row " + std::to_string(i) +
                                  " in local embeddings");
    if (nb == 0.0)
      throw std::invalid_argument("cosine_margin_loss: zero-norm row " + std::to_string(i) +
                                  " in peer embeddings");
    const double cos = ab / (na * nb);
    const double dist = 1.0 - cos;
    if (dist > margin) {
      r.loss += w * dist;
      // d(1-cos)/da = cos * a/|a|^2 - b/(|a||b|)
      const double ca = cos / aa;
      const double cb = 1.0 / (na * nb);
      double* g = r.grad_local.row(i);
      for (std::size_t k = 0; k < d; ++k) g[k] = w * (ca * a[k] - cb * b[k]);
    } else {
      r.loss += w * margin;  // constant branch, zero gradient
    }
  }
  return r;
}

}  // namespace feddmf
