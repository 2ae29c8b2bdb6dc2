// End-to-end finite-difference gradient check of the full model against the
// combined MSE + embedding-similarity loss. The loss is evaluated through the
// eval pipeline (bit-identical to the dropout-free training path), while the
// analytic gradients come from the training forward/backward.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "feddmf/federation.hpp"
#include "feddmf/losses.hpp"
#include "feddmf/model.hpp"
#include "feddmf/rng.hpp"
#include "support/oracles.hpp"

namespace gradcheck {

struct Setup {
  std::size_t num_users = 4;
  std::size_t num_features = 5;
  std::size_t embed_dim = 6;
  std::size_t hidden_dim = 7;
  std::size_t batch = 12;
  double margin = 0.2;
  double beta = 100.0;
  bool with_emb = true;
  feddmf::Fusion fusion = feddmf::Fusion::kConcat;
};

struct Result {
  double max_rel_err = 0.0;
  std::size_t params_checked = 0;
  std::size_t draws_done = 0;
};

inline double total_loss(const feddmf::DmfModel& m, const std::vector<std::uint32_t>& users,
                         const std::vector<std::uint32_t>& feats, const feddmf::Matrix& labels,
                         const feddmf::Matrix* peer, const std::vector<std::uint32_t>* common,
                         double margin, double beta) {
  const feddmf::Matrix pred = m.predict(users, feats);
  double loss = feddmf::mse_loss(pred, labels).loss;
  if (peer != nullptr) {
    const feddmf::Matrix local = feddmf::gather_rows(m.feature_embeddings, *common);
    loss += feddmf::cosine_margin_loss(local, *peer, margin, beta).loss;
  }
  return loss;
}

// Draws random parameters/batches `draws` times (redrawing when a ReLU
// pre-activation or a cosine distance sits too close to its kink), compares
// every analytic parameter gradient against central differences, and returns
// the worst relative error.
inline Result run(std::size_t draws, std::uint64_t seed, const Setup& s = {}, double h = 1e-6) {
  feddmf::Rng rng(seed);
  feddmf::DmfConfig mcfg;
  mcfg.embed_dim = s.embed_dim;
  mcfg.hidden_dim = s.hidden_dim;
  mcfg.dropout_rate = 0.0;  // dropout off so eval and train paths agree
  mcfg.fusion = s.fusion;

  std::vector<std::uint32_t> common = {0, 2, 4};
  for (auto& c : common)
    if (c >= s.num_features) c = 0;

  Result result;
  for (std::size_t draw = 0; draw < draws; ++draw) {
    feddmf::DmfModel model = feddmf::DmfModel::zeros(s.num_users, s.num_features, mcfg);
    feddmf::Matrix peer(common.size(), s.embed_dim);
    std::vector<std::uint32_t> users(s.batch), feats(s.batch);
    feddmf::Matrix labels(s.batch, 1);

    bool safe = false;
    for (int attempt = 0; attempt < 100 && !safe; ++attempt) {
      for (auto* grp : feddmf::param_groups(model))
        for (double& v : *grp) v = rng.uniform(-0.5, 0.5);
      for (double& v : peer.data) v = rng.uniform(-0.5, 0.5);
      for (std::size_t i = 0; i < s.batch; ++i) {
        users[i] = static_cast<std::uint32_t>(rng.uniform_index(s.num_users));
        feats[i] = static_cast<std::uint32_t>(rng.uniform_index(s.num_features));
        labels.data[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
      }
      // reject draws near the ReLU kink or the margin boundary
      feddmf::Rng dummy(0);
      auto [pred, cache] = model.forward(users, feats, true, dummy);
      safe = true;
      for (double v : cache.user_pre.data)
        if (std::abs(v) < 1e-4) safe = false;
      for (double v : cache.feat_pre.data)
        if (std::abs(v) < 1e-4) safe = false;
      if (s.with_emb) {
        const feddmf::Matrix local = feddmf::gather_rows(model.feature_embeddings, common);
        for (std::size_t r = 0; r < common.size(); ++r) {
          double aa = 0, ab = 0, bb = 0;
          for (std::size_t k = 0; k < s.embed_dim; ++k) {
            aa += local.at(r, k) * local.at(r, k);
            ab += local.at(r, k) * peer.at(r, k);
            bb += peer.at(r, k) * peer.at(r, k);
          }
          const double dist = 1.0 - ab / std::sqrt(aa * bb);
          if (std::abs(dist - s.margin) < 1e-3) safe = false;
        }
      }
      model.zero_grads();
    }
    if (!safe) continue;  // could not find a kink-free draw; skip

    // analytic gradients
    feddmf::Rng dummy(0);
    auto [pred, cache] = model.forward(users, feats, true, dummy);
    const feddmf::MseResult mse = feddmf::mse_loss(pred, labels);
    model.backward(cache, mse.grad_pred);
    if (s.with_emb) {
      const feddmf::Matrix local = feddmf::gather_rows(model.feature_embeddings, common);
      const feddmf::CosineMarginResult cm =
          feddmf::cosine_margin_loss(local, peer, s.margin, s.beta);
      model.accumulate_feature_embedding_grads(common, cm.grad_local);
    }

    const feddmf::Matrix* peer_p = s.with_emb ? &peer : nullptr;
    const std::vector<std::uint32_t>* common_p = s.with_emb ? &common : nullptr;
    auto loss_fn = [&]() {
      return total_loss(model, users, feats, labels, peer_p, common_p, s.margin, s.beta);
    };

    std::vector<std::pair<double*, double*>> slots;  // (param, analytic grad)
    auto add = [&](feddmf::Matrix& p, feddmf::Matrix& g) {
      for (std::size_t i = 0; i < p.size(); ++i) slots.emplace_back(&p.data[i], &g.data[i]);
    };
    add(model.user_embeddings, model.grad_user_embeddings);
    add(model.feature_embeddings, model.grad_feature_embeddings);
    add(model.user_fc.weight, model.user_fc.grad_weight);
    add(model.feat_fc.weight, model.feat_fc.grad_weight);
    add(model.out_fc.weight, model.out_fc.grad_weight);
    for (std::size_t i = 0; i < model.user_fc.bias.size(); ++i)
      slots.emplace_back(&model.user_fc.bias[i], &model.user_fc.grad_bias[i]);
    for (std::size_t i = 0; i < model.feat_fc.bias.size(); ++i)
      slots.emplace_back(&model.feat_fc.bias[i], &model.feat_fc.grad_bias[i]);
    for (std::size_t i = 0; i < model.out_fc.bias.size(); ++i)
      slots.emplace_back(&model.out_fc.bias[i], &model.out_fc.grad_bias[i]);

    for (auto [param, grad] : slots) {
      const double fd = oracle::fd_central(loss_fn, *param, h);
      const double err = oracle::rel_err(*grad, fd);
      if (err > result.max_rel_err) result.max_rel_err = err;
      ++result.params_checked;
    }
    ++result.draws_done;
  }
  return result;
}

}  // namespace gradcheck
