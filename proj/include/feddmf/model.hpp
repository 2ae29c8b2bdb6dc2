#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "feddmf/layers.hpp"
#include "feddmf/losses.hpp"
#include "feddmf/matrix.hpp"
#include "feddmf/optimizer.hpp"
#include "feddmf/rng.hpp"

namespace feddmf {

// How the two tower outputs are fused before the output layer.
enum class Fusion : std::uint32_t { kConcat = 0, kProduct = 1, kSum = 2 };

struct DmfConfig {
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 64;
  double dropout_rate = 0.5;
  Fusion fusion = Fusion::kConcat;

  std::size_t fused_dim() const {
    return fusion == Fusion::kConcat ? 2 * hidden_dim : hidden_dim;
  }
};

struct ForwardCache {
  std::vector<std::uint32_t> users, features;
  Matrix user_pre, feat_pre;  // tower outputs before ReLU
  Matrix user_act, feat_act;  // after ReLU
  Matrix dropout_mask;
  Matrix pred;
  bool trainable = false;  // false for eval-mode caches
  bool consumed = false;
};

// One client's model: user/feature embedding tables, two FC towers with ReLU,
// fusion, dropout, output FC with sigmoid. Feature table rows are indexed by
// the GLOBAL feature index so common-feature rows align across clients.
class DmfModel {
 public:
  // All parameters are drawn uniform in [-0.05, 0.05]. When `feature_rng` is
  // given, the feature-side parameters (feature table and feature tower) draw
  // from it instead of `rng`; federated clients use this to agree on a shared
  // feature-side initialization while keeping user-side parameters private.
  DmfModel(std::size_t num_users, std::size_t num_features, const DmfConfig& cfg, Rng& rng,
           Rng* feature_rng = nullptr)
      : DmfModel(num_users, num_features, cfg, kPrivateTag{}) {
    const double lo = -0.05, hi = 0.05;
    Rng& frng = feature_rng != nullptr ? *feature_rng : rng;
    for (double& v : user_embeddings.data) v = rng.uniform(lo, hi);
    for (double& v : feature_embeddings.data) v = frng.uniform(lo, hi);
    user_fc.init_uniform(rng, lo, hi);
    feat_fc.init_uniform(frng, lo, hi);
    out_fc.init_uniform(rng, lo, hi);
  }

  static DmfModel zeros(std::size_t num_users, std::size_t num_features, const DmfConfig& cfg) {
    return DmfModel(num_users, num_features, cfg, kPrivateTag{});
  }

  std::size_t num_users() const { return user_embeddings.rows; }
  std::size_t num_features() const { return feature_embeddings.rows; }

  std::pair<Matrix, ForwardCache> forward(std::span<const std::uint32_t> users,
                                          std::span<const std::uint32_t> features,
                                          bool train, Rng& rng) {
    if (users.size() != features.size())
      throw std::invalid_argument("forward: user batch size " + std::to_string(users.size()) +
                                  " != feature batch size " + std::to_string(features.size()));
    check_indices(users, features);
    ForwardCache cache;
    cache.users.assign(users.begin(), users.end());
    cache.features.assign(features.begin(), features.end());

    const Matrix user_in = gather(user_embeddings, users);
    const Matrix feat_in = gather(feature_embeddings, features);

    if (!train) {
      Matrix pred = eval_pipeline(user_in, feat_in);
      cache.pred = pred;
      return {std::move(pred), std::move(cache)};
    }

    cache.user_pre = user_fc.forward(user_in);
    cache.feat_pre = feat_fc.forward(feat_in);
    cache.user_act = relu(cache.user_pre);
    cache.feat_act = relu(cache.feat_pre);
    Matrix fused = fuse(cache.user_act, cache.feat_act);
    DropoutResult drop = dropout(fused, config.dropout_rate, true, rng);
    cache.dropout_mask = std::move(drop.mask);
    Matrix pred = sigmoid(out_fc.forward(drop.output));
    cache.pred = pred;
    cache.trainable = true;
    return {std::move(pred), std::move(cache)};
  }

  // Eval-mode prediction; pure function of (parameters, indices).
  Matrix predict(std::span<const std::uint32_t> users,
                 std::span<const std::uint32_t> features) const {
    if (users.size() != features.size())
      throw std::invalid_argument("predict: batch size mismatch");
    check_indices(users, features);
    return eval_pipeline(gather(user_embeddings, users), gather(feature_embeddings, features));
  }

  // Same pipeline as eval forward, but the feature-embedding lookup is replaced
  // by the supplied rows. The model's own feature table is untouched.
  Matrix predict_with_foreign_features(std::span<const std::uint32_t> users,
                                       const Matrix& foreign_features) const {
    if (foreign_features.cols != config.embed_dim)
      throw std::invalid_argument("predict_with_foreign_features: foreign width " +
                                  std::to_string(foreign_features.cols) + " != embed_dim " +
                                  std::to_string(config.embed_dim));
    if (foreign_features.rows != users.size())
      throw std::invalid_argument("predict_with_foreign_features: foreign rows " +
                                  std::to_string(foreign_features.rows) + " != batch size " +
                                  std::to_string(users.size()));
    for (std::uint32_t u : users)
      if (u >= num_users())
        throw std::out_of_range("predict_with_foreign_features: user index " +
                                std::to_string(u) + " out of range (num_users=" +
                                std::to_string(num_users()) + ")");
    return eval_pipeline(gather(user_embeddings, users), foreign_features);
  }

  // Accumulates gradients into all parameter groups; only the embedding rows
  // touched by the batch receive gradient.
  void backward(ForwardCache& cache, const Matrix& grad_pred) {
    if (!cache.trainable)
      throw std::runtime_error("backward: cache was produced in eval mode");
    if (cache.consumed)
      throw std::runtime_error("backward: forward cache already consumed");
    require_same_shape(grad_pred, cache.pred, "backward(grad_pred)");

    // sigmoid: dz = dpred * y(1-y)
    Matrix grad_z = grad_pred;
    for (std::size_t i = 0; i < grad_z.data.size(); ++i) {
      const double y = cache.pred.data[i];
      grad_z.data[i] *= y * (1.0 - y);
    }
    Matrix grad_fused = dropout_backward(out_fc.backward(grad_z), cache.dropout_mask);
    auto [grad_uact, grad_fact] = unfuse(grad_fused, cache.user_act, cache.feat_act);
    Matrix grad_user_in = user_fc.backward(relu_backward(grad_uact, cache.user_pre));
    Matrix grad_feat_in = feat_fc.backward(relu_backward(grad_fact, cache.feat_pre));

    scatter_add(grad_user_embeddings, grad_user_in, cache.users, touched_users_, user_touched_);
    scatter_add(grad_feature_embeddings, grad_feat_in, cache.features, touched_features_,
                feature_touched_);
    cache.consumed = true;
  }

  // Adds external gradients (e.g. the embedding similarity loss) into the
  // feature table rows listed in `rows`.
  void accumulate_feature_embedding_grads(std::span<const std::uint32_t> rows,
                                          const Matrix& grads) {
    if (grads.rows != rows.size() || grads.cols != config.embed_dim)
      throw std::invalid_argument("accumulate_feature_embedding_grads: grads " +
                                  grads.shape_str() + " does not match " +
                                  std::to_string(rows.size()) + " rows x embed_dim " +
                                  std::to_string(config.embed_dim));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::uint32_t r = rows[i];
      if (r >= num_features())
        throw std::out_of_range("accumulate_feature_embedding_grads: row " + std::to_string(r) +
                                " out of range");
      double* dst = grad_feature_embeddings.row(r);
      const double* src = grads.row(i);
      for (std::size_t k = 0; k < config.embed_dim; ++k) dst[k] += src[k];
      touch(r, touched_features_, feature_touched_);
    }
  }

  // Marks a feature row as gradient-carrying so sparse optimizer steps visit
  // it (used by external losses that write into grad_feature_embeddings).
  void mark_feature_row_touched(std::uint32_t r) {
    if (r >= num_features())
      throw std::out_of_range("mark_feature_row_touched: row " + std::to_string(r) +
                              " out of range");
    touch(r, touched_features_, feature_touched_);
  }

  // p -= lr * grad for every parameter group, then zero the gradients.
  // Embedding tables are updated sparsely via the touched-row lists.
  void sgd_step(double lr, double momentum = 0.0) {
    if (momentum > 0.0 && !velocity_) alloc_velocity();
    for (std::uint32_t r : touched_users_) {
      sgd_step_row(user_embeddings, grad_user_embeddings, r, lr, momentum,
                   velocity_ ? &velocity_->user : nullptr, "user_embeddings");
      user_touched_[r] = 0;
    }
    touched_users_.clear();
    for (std::uint32_t r : touched_features_) {
      sgd_step_row(feature_embeddings, grad_feature_embeddings, r, lr, momentum,
                   velocity_ ? &velocity_->feature : nullptr, "feature_embeddings");
      feature_touched_[r] = 0;
    }
    touched_features_.clear();
    feddmf::sgd_step(user_fc, lr, "user_fc", momentum, velocity_ ? &velocity_->user_fc : nullptr);
    feddmf::sgd_step(feat_fc, lr, "feat_fc", momentum, velocity_ ? &velocity_->feat_fc : nullptr);
    feddmf::sgd_step(out_fc, lr, "out_fc", momentum, velocity_ ? &velocity_->out_fc : nullptr);
  }

  void zero_grads() {
    for (std::uint32_t r : touched_users_) {
      std::fill_n(grad_user_embeddings.row(r), config.embed_dim, 0.0);
      user_touched_[r] = 0;
    }
    for (std::uint32_t r : touched_features_) {
      std::fill_n(grad_feature_embeddings.row(r), config.embed_dim, 0.0);
      feature_touched_[r] = 0;
    }
    touched_users_.clear();
    touched_features_.clear();
    user_fc.zero_grads();
    feat_fc.zero_grads();
    out_fc.zero_grads();
  }

  const std::vector<std::uint32_t>& touched_feature_rows() const { return touched_features_; }
  const std::vector<std::uint32_t>& touched_user_rows() const { return touched_users_; }

  void save_checkpoint(const std::string& path) const;
  static DmfModel load_checkpoint(const std::string& path);

  DmfConfig config;
  Matrix user_embeddings;     // num_users x embed_dim
  Matrix feature_embeddings;  // num_features x embed_dim (global feature space)
  Matrix grad_user_embeddings, grad_feature_embeddings;
  DenseLayer user_fc, feat_fc, out_fc;

 private:
  struct kPrivateTag {};

  DmfModel(std::size_t num_users, std::size_t num_features, const DmfConfig& cfg, kPrivateTag)
      : config(cfg),
        user_embeddings(num_users, cfg.embed_dim),
        feature_embeddings(num_features, cfg.embed_dim),
        grad_user_embeddings(num_users, cfg.embed_dim),
        grad_feature_embeddings(num_features, cfg.embed_dim),
        user_fc(cfg.embed_dim, cfg.hidden_dim),
        feat_fc(cfg.embed_dim, cfg.hidden_dim),
        out_fc(cfg.fused_dim(), 1),
        user_touched_(num_users, 0),
        feature_touched_(num_features, 0) {
    if (num_users == 0 || num_features == 0)
      throw std::invalid_argument("DmfModel: num_users and num_features must be >= 1");
    if (cfg.embed_dim == 0 || cfg.hidden_dim == 0)
      throw std::invalid_argument("DmfModel: embed_dim and hidden_dim must be >= 1");
    if (!(cfg.dropout_rate >= 0.0 && cfg.dropout_rate < 1.0))
      throw std::invalid_argument("DmfModel: dropout_rate must be in [0,1)");
  }

  struct Velocity {
    Matrix user, feature;
    LayerVelocity user_fc, feat_fc, out_fc;
  };

  void alloc_velocity() {
    velocity_.emplace();
    velocity_->user = Matrix(num_users(), config.embed_dim);
    velocity_->feature = Matrix(num_features(), config.embed_dim);
    velocity_->user_fc = {Matrix(config.embed_dim, config.hidden_dim),
                          std::vector<double>(config.hidden_dim, 0.0)};
    velocity_->feat_fc = {Matrix(config.embed_dim, config.hidden_dim),
                          std::vector<double>(config.hidden_dim, 0.0)};
    velocity_->out_fc = {Matrix(config.fused_dim(), 1), std::vector<double>(1, 0.0)};
  }

  static void sgd_step_row(Matrix& param, Matrix& grad, std::uint32_t r, double lr,
                           double momentum, Matrix* vel, std::string_view name) {
    feddmf::sgd_step(param.row(r), grad.row(r), param.cols, lr, name, momentum,
                     vel ? vel->row(r) : nullptr);
  }

  void check_indices(std::span<const std::uint32_t> users,
                     std::span<const std::uint32_t> features) const {
    for (std::uint32_t u : users)
      if (u >= num_users())
        throw std::out_of_range("forward: user index " + std::to_string(u) +
                                " out of range (num_users=" + std::to_string(num_users()) + ")");
    for (std::uint32_t f : features)
      if (f >= num_features())
        throw std::out_of_range("forward: feature index " + std::to_string(f) +
                                " out of range (num_features=" + std::to_string(num_features()) +
                                ")");
  }

  static Matrix gather(const Matrix& table, std::span<const std::uint32_t> rows) {
    Matrix out(rows.size(), table.cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
      std::memcpy(out.row(i), table.row(rows[i]), table.cols * sizeof(double));
    return out;
  }

  static void scatter_add(Matrix& grad_table, const Matrix& grads,
                          const std::vector<std::uint32_t>& rows,
                          std::vector<std::uint32_t>& touched, std::vector<std::uint8_t>& flags) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double* dst = grad_table.row(rows[i]);
      const double* src = grads.row(i);
      for (std::size_t k = 0; k < grads.cols; ++k) dst[k] += src[k];
    }
    for (std::uint32_t r : rows) {
      if (!flags[r]) {
        flags[r] = 1;
        touched.push_back(r);
      }
    }
  }

  void touch(std::uint32_t r, std::vector<std::uint32_t>& touched,
             std::vector<std::uint8_t>& flags) {
    if (!flags[r]) {
      flags[r] = 1;
      touched.push_back(r);
    }
  }

  Matrix fuse(const Matrix& u, const Matrix& f) const {
    switch (config.fusion) {
      case Fusion::kConcat: {
        Matrix out(u.rows, u.cols + f.cols);
        for (std::size_t i = 0; i < u.rows; ++i) {
          std::memcpy(out.row(i), u.row(i), u.cols * sizeof(double));
          std::memcpy(out.row(i) + u.cols, f.row(i), f.cols * sizeof(double));
        }
        return out;
      }
      case Fusion::kProduct: {
        Matrix out = u;
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= f.data[i];
        return out;
      }
      case Fusion::kSum: {
        Matrix out = u;
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += f.data[i];
        return out;
      }
    }
    throw std::logic_error("fuse: unknown fusion");
  }

  std::pair<Matrix, Matrix> unfuse(const Matrix& grad_fused, const Matrix& u_act,
                                   const Matrix& f_act) const {
    switch (config.fusion) {
      case Fusion::kConcat: {
        Matrix gu(u_act.rows, u_act.cols), gf(f_act.rows, f_act.cols);
        for (std::size_t i = 0; i < gu.rows; ++i) {
          std::memcpy(gu.row(i), grad_fused.row(i), gu.cols * sizeof(double));
          std::memcpy(gf.row(i), grad_fused.row(i) + gu.cols, gf.cols * sizeof(double));
        }
        return {std::move(gu), std::move(gf)};
      }
      case Fusion::kProduct: {
        Matrix gu = grad_fused, gf = grad_fused;
        for (std::size_t i = 0; i < gu.data.size(); ++i) {
          gu.data[i] *= f_act.data[i];
          gf.data[i] *= u_act.data[i];
        }
        return {std::move(gu), std::move(gf)};
      }
      case Fusion::kSum:
        return {grad_fused, grad_fused};
    }
    throw std::logic_error("unfuse: unknown fusion");
  }

  Matrix eval_pipeline(const Matrix& user_in, const Matrix& feat_in) const {
    const Matrix u = relu(user_fc.apply(user_in));
    const Matrix f = relu(feat_fc.apply(feat_in));
    return sigmoid(out_fc.apply(fuse(u, f)));
  }

  std::vector<std::uint32_t> touched_users_, touched_features_;
  std::vector<std::uint8_t> user_touched_, feature_touched_;
  std::optional<Velocity> velocity_;
};

// The parameter groups as flat slabs, in checkpoint order.
inline std::vector<std::vector<double>*> param_groups(DmfModel& m) {
  return {&m.user_embeddings.data, &m.feature_embeddings.data, &m.user_fc.weight.data,
          &m.user_fc.bias,         &m.feat_fc.weight.data,     &m.feat_fc.bias,
          &m.out_fc.weight.data,   &m.out_fc.bias};
}

inline std::vector<const std::vector<double>*> param_groups(const DmfModel& m) {
  auto groups = param_groups(const_cast<DmfModel&>(m));
  return {groups.begin(), groups.end()};
}

inline std::vector<std::vector<double>*> grad_groups(DmfModel& m) {
  return {&m.grad_user_embeddings.data, &m.grad_feature_embeddings.data,
          &m.user_fc.grad_weight.data,  &m.user_fc.grad_bias,
          &m.feat_fc.grad_weight.data,  &m.feat_fc.grad_bias,
          &m.out_fc.grad_weight.data,   &m.out_fc.grad_bias};
}

enum class OptimizerKind { kSgd, kAdam };

// Applies accumulated gradients to a model and zeroes them. Optimizer state
// (momentum velocity, Adam moments) lives here rather than in the model, so a
// federated client keeps its state across rounds even when the round replaces
// the model parameters. Embedding tables update sparsely via the touched-row
// lists; untouched rows keep their moments unchanged (sparse-Adam semantics).
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double lr, double momentum = 0.0)
      : kind_(kind), lr_(lr), momentum_(momentum) {}

  void step(DmfModel& model) {
    const auto params = param_groups(model);
    const auto grads = grad_groups(model);
    ensure_state(params);
    ++t_;
    bias1_ = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    bias2_ = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    const std::size_t dim = model.config.embed_dim;
    for (std::uint32_t r : model.touched_user_rows())
      step_span(*params[0], *grads[0], 0, r * dim, dim, "user_embeddings");
    for (std::uint32_t r : model.touched_feature_rows())
      step_span(*params[1], *grads[1], 1, r * dim, dim, "feature_embeddings");
    for (std::size_t g = 2; g < params.size(); ++g)
      step_span(*params[g], *grads[g], g, 0, params[g]->size(), kGroupNames[g]);
    model.zero_grads();
  }

  std::size_t steps() const { return t_; }

 private:
  static constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  static constexpr const char* kGroupNames[8] = {
      "user_embeddings", "feature_embeddings", "user_fc.weight", "user_fc.bias",
      "feat_fc.weight",  "feat_fc.bias",       "out_fc.weight",  "out_fc.bias"};

  void ensure_state(const std::vector<std::vector<double>*>& params) {
    const bool needs_m = kind_ == OptimizerKind::kAdam ||
                         (kind_ == OptimizerKind::kSgd && momentum_ > 0.0);
    if (!needs_m || !m_.empty()) {
      if (!m_.empty() && m_[0].size() != params[0]->size())
        throw std::logic_error("Optimizer: model shape changed under the optimizer");
      return;
    }
    m_.resize(params.size());
    for (std::size_t g = 0; g < params.size(); ++g) m_[g].assign(params[g]->size(), 0.0);
    if (kind_ == OptimizerKind::kAdam) {
      v_.resize(params.size());
      for (std::size_t g = 0; g < params.size(); ++g) v_[g].assign(params[g]->size(), 0.0);
    }
  }

  void step_span(std::vector<double>& p, std::vector<double>& g, std::size_t slab,
                 std::size_t off, std::size_t n, const char* name) {
    for (std::size_t i = off; i < off + n; ++i) {
      const double grad = g[i];
      if (!std::isfinite(grad))
        throw std::runtime_error("sgd_step: non-finite gradient in " + std::string(name));
      if (kind_ == OptimizerKind::kAdam) {
        double& m = m_[slab][i];
        double& v = v_[slab][i];
        m = kBeta1 * m + (1.0 - kBeta1) * grad;
        v = kBeta2 * v + (1.0 - kBeta2) * grad * grad;
        p[i] -= lr_ * (m / bias1_) / (std::sqrt(v / bias2_) + kEps);
      } else if (momentum_ > 0.0) {
        double& vel = m_[slab][i];
        vel = momentum_ * vel + grad;
        p[i] -= lr_ * vel;
      } else {
        p[i] -= lr_ * grad;
      }
    }
  }

  OptimizerKind kind_;
  double lr_, momentum_;
  std::size_t t_ = 0;
  double bias1_ = 1.0, bias2_ = 1.0;
  std::vector<std::vector<double>> m_, v_;
};

// Checkpoint layout (little-endian), stable across runs:
//   magic "FDMFCKP1" (8 bytes)
//   u64 num_users, num_features, embed_dim, hidden_dim
//   u32 fusion (0=concat, 1=product, 2=sum)
//   f64 dropout_rate
//   f64 arrays, row-major, in order: user_embeddings, feature_embeddings,
//     user_fc.weight, user_fc.bias, feat_fc.weight, feat_fc.bias,
//     out_fc.weight, out_fc.bias
inline void DmfModel::save_checkpoint(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  const char magic[8] = {'F', 'D', 'M', 'F', 'C', 'K', 'P', '1'};
  out.write(magic, 8);
  auto w_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  auto w_f64s = [&](const double* p, std::size_t n) {
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * 8));
  };
  w_u64(num_users());
  w_u64(num_features());
  w_u64(config.embed_dim);
  w_u64(config.hidden_dim);
  const std::uint32_t fu = static_cast<std::uint32_t>(config.fusion);
  out.write(reinterpret_cast<const char*>(&fu), 4);
  const double dr = config.dropout_rate;
  out.write(reinterpret_cast<const char*>(&dr), 8);
  w_f64s(user_embeddings.data.data(), user_embeddings.size());
  w_f64s(feature_embeddings.data.data(), feature_embeddings.size());
  w_f64s(user_fc.weight.data.data(), user_fc.weight.size());
  w_f64s(user_fc.bias.data(), user_fc.bias.size());
  w_f64s(feat_fc.weight.data.data(), feat_fc.weight.size());
  w_f64s(feat_fc.bias.data(), feat_fc.bias.size());
  w_f64s(out_fc.weight.data.data(), out_fc.weight.size());
  w_f64s(out_fc.bias.data(), out_fc.bias.size());
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

inline DmfModel DmfModel::load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "FDMFCKP1", 8) != 0)
    throw std::runtime_error("load_checkpoint: bad magic in " + path);
  auto r_u64 = [&]() {
    std::uint64_t v;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  const std::uint64_t nu = r_u64(), nf = r_u64(), ed = r_u64(), hd = r_u64();
  std::uint32_t fu;
  in.read(reinterpret_cast<char*>(&fu), 4);
  double dr;
  in.read(reinterpret_cast<char*>(&dr), 8);
  if (!in || fu > 2) throw std::runtime_error("load_checkpoint: corrupt header in " + path);
  DmfConfig cfg;
  cfg.embed_dim = ed;
  cfg.hidden_dim = hd;
  cfg.dropout_rate = dr;
  cfg.fusion = static_cast<Fusion>(fu);
  DmfModel m = DmfModel::zeros(nu, nf, cfg);
  auto r_f64s = [&](double* p, std::size_t n) {
    in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * 8));
  };
  r_f64s(m.user_embeddings.data.data(), m.user_embeddings.size());
  r_f64s(m.feature_embeddings.data.data(), m.feature_embeddings.size());
  r_f64s(m.user_fc.weight.data.data(), m.user_fc.weight.size());
  r_f64s(m.user_fc.bias.data(), m.user_fc.bias.size());
  r_f64s(m.feat_fc.weight.data.data(), m.feat_fc.weight.size());
  r_f64s(m.feat_fc.bias.data(), m.feat_fc.bias.size());
  r_f64s(m.out_fc.weight.data.data(), m.out_fc.weight.size());
  r_f64s(m.out_fc.bias.data(), m.out_fc.bias.size());
  if (!in) throw std::runtime_error("load_checkpoint: truncated file " + path);
  return m;
}

}  // namespace feddmf
