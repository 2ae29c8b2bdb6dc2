#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "feddmf/dataset.hpp"
#include "feddmf/losses.hpp"
#include "feddmf/model.hpp"
#include "feddmf/rng.hpp"

namespace feddmf {

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double learning_rate = 0.001;
  double margin = 0.2;  // m of the embedding similarity loss
  double beta = 100.0;  // weight of the embedding similarity loss
  std::size_t negatives_per_positive = 4;
  double dropout_rate = 0.5;
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 64;
  double threshold = 0.5;  // classification threshold on the sigmoid output
  std::uint64_t seed = 1;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double momentum = 0.0;             // classical momentum for optimizer = sgd
  bool shared_feature_init = true;   // FedDMF clients agree on the feature-side init seed
  Fusion fusion = Fusion::kConcat;   // tower fusion
  bool emb_loss_per_epoch = false;   // apply L_emb once per epoch instead of every batch
  bool full_block_training = false;  // train on all block pairs instead of sampled negatives

  void validate() const {
    if (epochs == 0) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (!(learning_rate > 0.0))
      throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (!(margin >= 0.0 && margin < 1.0))
      throw std::invalid_argument("TrainConfig: margin must be in [0,1)");
    if (!(beta >= 0.0)) throw std::invalid_argument("TrainConfig: beta must be >= 0");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
      throw std::invalid_argument("TrainConfig: dropout_rate must be in [0,1)");
    if (embed_dim == 0 || hidden_dim == 0)
      throw std::invalid_argument("TrainConfig: embed_dim and hidden_dim must be >= 1");
    if (!(threshold > 0.0 && threshold < 1.0))
      throw std::invalid_argument("TrainConfig: threshold must be in (0,1)");
    if (!(momentum >= 0.0 && momentum < 1.0))
      throw std::invalid_argument("TrainConfig: momentum must be in [0,1)");
  }

  DmfConfig model_config() const {
    DmfConfig c;
    c.embed_dim = embed_dim;
    c.hidden_dim = hidden_dim;
    c.dropout_rate = dropout_rate;
    c.fusion = fusion;
    return c;
  }

  Optimizer make_optimizer() const { return Optimizer(optimizer, learning_rate, momentum); }
};

enum class Strategy { kCentralized, kFedAvg, kFedDmf, kRandom };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kCentralized: return "dmf";
    case Strategy::kFedAvg: return "fedavg";
    case Strategy::kFedDmf: return "feddmf";
    case Strategy::kRandom: return "random";
  }
  throw std::logic_error("strategy_name: unknown strategy");
}

inline Strategy parse_strategy(const std::string& s) {
  if (s == "dmf" || s == "centralized") return Strategy::kCentralized;
  if (s == "fedavg") return Strategy::kFedAvg;
  if (s == "feddmf") return Strategy::kFedDmf;
  if (s == "random" || s == "rand") return Strategy::kRandom;
  throw std::invalid_argument("unknown strategy '" + s +
                              "' (expected dmf|fedavg|feddmf|random)");
}

// Audit log of everything that crosses a client boundary. In FedDMF runs the
// only permitted payload is the common-feature embedding rows.
struct ExchangeRecord {
  std::size_t round = 0;
  int from_node = 0;  // client index, or kServer for the FedAvg aggregator
  int to_node = 0;
  std::string payload_kind;
  std::size_t rows = 0;
  std::size_t bytes = 0;
};

struct ExchangeLog {
  static constexpr int kServer = -1;
  static constexpr const char* kCommonFeaturePayload = "common_feature_embeddings";
  static constexpr const char* kFullModelPayload = "full_model_parameters";

  std::vector<ExchangeRecord> records;

  void add(std::size_t round, int from, int to, std::string kind, std::size_t rows,
           std::size_t bytes) {
    records.push_back({round, from, to, std::move(kind), rows, bytes});
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("ExchangeLog::write: cannot open " + path);
    for (const auto& r : records) {
      out << "round=" << r.round << " from=" << r.from_node << " to=" << r.to_node
          << " kind=" << r.payload_kind << " rows=" << r.rows << " bytes=" << r.bytes << '\n';
    }
  }

  // true iff every record carries common-feature embedding rows only
  bool only_common_feature_rows() const {
    for (const auto& r : records)
      if (r.payload_kind != kCommonFeaturePayload) return false;
    return true;
  }
};

// A per-client model plus the mapping between global user indices and the
// model's local user rows.
struct ClientModel {
  static constexpr std::uint32_t kNoRow = UINT32_MAX;

  DmfModel model;
  std::vector<std::uint32_t> users;       // local row -> global user index
  std::vector<std::uint32_t> user_local;  // global user index -> local row

  std::uint32_t local_row(std::uint32_t global_user) const {
    if (global_user >= user_local.size() || user_local[global_user] == kNoRow)
      throw std::out_of_range("ClientModel: user " + std::to_string(global_user) +
                              " is not owned by this client");
    return user_local[global_user];
  }

  std::vector<std::uint32_t> local_rows(std::span<const std::uint32_t> global_users) const {
    std::vector<std::uint32_t> rows(global_users.size());
    for (std::size_t i = 0; i < global_users.size(); ++i) rows[i] = local_row(global_users[i]);
    return rows;
  }
};

struct TrainTrace {
  std::vector<double> epoch_loss;  // mean per-step training loss (MSE + L_emb share)
};

namespace fed {

// Seed derivation tags. Every RNG consumed during training is seeded from
// (cfg.seed, scope, round), so any client round is reproducible standalone.
constexpr std::uint64_t kClientTag = 0x636c69656e74ULL;   // per-client stream base
constexpr std::uint64_t kGlobalTag = 0x676c6f62616cULL;   // global/centralized model
constexpr std::uint64_t kInitTag = 0x696e6974ULL;         // parameter init
constexpr std::uint64_t kEpochTag = 0x65706f6368ULL;      // per-round sampling + dropout
constexpr std::uint64_t kMergeTag = 0x6d65726765ULL;      // centralized example merge
constexpr std::uint64_t kRandBaselineTag = 0x72616e64ULL; // random baseline scores
constexpr std::uint64_t kFeatureInitTag = 0x66656174ULL;  // shared feature-side init

inline std::uint64_t client_base_seed(std::uint64_t cfg_seed, int client) {
  return derive_seed(cfg_seed, kClientTag, static_cast<std::uint64_t>(client));
}
inline std::uint64_t global_base_seed(std::uint64_t cfg_seed) {
  return derive_seed(cfg_seed, kGlobalTag);
}
inline std::uint64_t init_seed(std::uint64_t base) { return derive_seed(base, kInitTag); }
inline std::uint64_t feature_init_seed(std::uint64_t cfg_seed) {
  return derive_seed(cfg_seed, kFeatureInitTag, kInitTag);
}
inline std::uint64_t epoch_seed(std::uint64_t base, std::size_t round) {
  return derive_seed(base, kEpochTag, round);
}

// Frozen snapshot of the peer's common-feature rows for one round.
struct EmbAlignment {
  Matrix peer_rows;  // |P| x embed_dim
  std::vector<double> peer_norms;
  const std::vector<std::uint32_t>* common_rows = nullptr;
};

inline EmbAlignment snapshot_alignment(const DmfModel& peer,
                                       const std::vector<std::uint32_t>& common) {
  EmbAlignment a;
  a.peer_rows = gather_rows(peer.feature_embeddings, common);
  a.peer_norms.resize(common.size());
  for (std::size_t i = 0; i < common.size(); ++i)
    a.peer_norms[i] = detail::row_norm(a.peer_rows.row(i), a.peer_rows.cols);
  a.common_rows = &common;
  return a;
}

// Adds the embedding similarity gradient for the model's current common rows
// against the frozen peer snapshot; returns the loss term. Works directly on
// the model's tables (same arithmetic as cosine_margin_loss over gathered
// rows, without the copies). Rows already inside the margin carry exactly
// zero gradient and are not marked touched, so sparse optimizer state is only
// advanced for rows the loss actually moves.
inline double apply_alignment_grads(DmfModel& model, const EmbAlignment& align, double margin,
                                    double beta) {
  const std::vector<std::uint32_t>& common = *align.common_rows;
  const std::size_t d = model.config.embed_dim;
  const double w = beta / static_cast<double>(common.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < common.size(); ++i) {
    const double* a = model.feature_embeddings.row(common[i]);
    const double* b = align.peer_rows.row(i);
    double aa = 0.0, ab = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      aa += a[k] * a[k];
      ab += a[k] * b[k];
    }
    const double na = std::sqrt(aa);
    const double nb = align.peer_norms[i];
    if (na == 0.0)
      throw std::invalid_argument("cosine_margin_loss: zero-norm row " + std::to_string(i) +
                                  " in local embeddings");
    if (nb == 0.0)
      throw std::invalid_argument("cosine_margin_loss: zero-norm row " + std::to_string(i) +
                                  " in peer embeddings");
    const double cos = ab / (na * nb);
    const double dist = 1.0 - cos;
    if (dist > margin) {
      loss += w * dist;
      const double ca = cos / aa;
      const double cb = 1.0 / (na * nb);
      double* g = model.grad_feature_embeddings.row(common[i]);
      for (std::size_t k = 0; k < d; ++k) g[k] += w * (ca * a[k] - cb * b[k]);
      model.mark_feature_row_touched(common[i]);
    } else {
      loss += w * margin;
    }
  }
  return loss;
}

// One local epoch over the given batches. Batch user indices are global;
// `user_local` (when non-null) maps them to the model's rows. `align`, when
// set, adds the embedding similarity loss each step (or once up front with
// cfg.emb_loss_per_epoch). The optimizer carries its state across epochs.
inline double local_epoch(DmfModel& model, const std::vector<std::uint32_t>* user_local,
                          const std::vector<Batch>& batches, const TrainConfig& cfg, Rng& rng,
                          Optimizer& opt, const EmbAlignment* align = nullptr,
                          std::size_t* steps = nullptr) {
  double total_loss = 0.0;
  std::size_t n_steps = 0;
  const bool use_align = align != nullptr && cfg.beta > 0.0;

  if (use_align && cfg.emb_loss_per_epoch) {
    total_loss += apply_alignment_grads(model, *align, cfg.margin, cfg.beta);
    opt.step(model);
    ++n_steps;
  }

  std::vector<std::uint32_t> rows;
  for (const Batch& batch : batches) {
    const std::vector<std::uint32_t>* users = &batch.users;
    if (user_local != nullptr) {
      rows.resize(batch.users.size());
      for (std::size_t i = 0; i < batch.users.size(); ++i) {
        const std::uint32_t u = batch.users[i];
        if (u >= user_local->size() || (*user_local)[u] == ClientModel::kNoRow)
          throw std::out_of_range("local_epoch: user " + std::to_string(u) +
                                  " is not owned by this client");
        rows[i] = (*user_local)[u];
      }
      users = &rows;
    }
    auto [pred, cache] = model.forward(*users, batch.features, true, rng);
    Matrix labels(batch.size(), 1);
    for (std::size_t i = 0; i < batch.size(); ++i) labels.data[i] = batch.labels[i];
    MseResult mse = mse_loss(pred, labels);
    model.backward(cache, mse.grad_pred);
    double step_loss = mse.loss;
    if (use_align && !cfg.emb_loss_per_epoch)
      step_loss += apply_alignment_grads(model, *align, cfg.margin, cfg.beta);
    opt.step(model);
    total_loss += step_loss;
    ++n_steps;
  }
  if (steps != nullptr) *steps = n_steps;
  return n_steps > 0 ? total_loss / static_cast<double>(n_steps) : 0.0;
}

inline std::vector<TrainExample> full_block_examples(const FederatedSplit& split, int client,
                                                     const InteractionDataset& ds, Rng& rng) {
  const PairBlock block = train_block_pairs(split, client, ds);
  std::vector<TrainExample> ex(block.size());
  for (std::size_t i = 0; i < block.size(); ++i)
    ex[i] = {block.users[i], block.features[i], block.labels[i]};
  rng.shuffle(ex);
  return ex;
}

inline std::vector<TrainExample> client_epoch_examples(const FederatedSplit& split, int client,
                                                       const InteractionDataset& ds,
                                                       const TrainConfig& cfg, Rng& rng) {
  if (cfg.full_block_training) return full_block_examples(split, client, ds, rng);
  return epoch_examples(split, client, ds, cfg.negatives_per_positive, rng);
}

inline std::size_t param_count(const DmfModel& m) {
  return m.user_embeddings.size() + m.feature_embeddings.size() + m.user_fc.weight.size() +
         m.user_fc.bias.size() + m.feat_fc.weight.size() + m.feat_fc.bias.size() +
         m.out_fc.weight.size() + m.out_fc.bias.size();
}

inline std::size_t param_rows(const DmfModel& m) {
  return m.user_embeddings.rows + m.feature_embeddings.rows + m.user_fc.weight.rows +
         m.feat_fc.weight.rows + m.out_fc.weight.rows + 3;  // 3 bias vectors
}

}  // namespace fed

// Elementwise arithmetic mean of identically shaped models.
inline DmfModel average_models(std::span<const DmfModel* const> models) {
  if (models.empty()) throw std::invalid_argument("average_models: no models");
  DmfModel avg = *models[0];
  avg.zero_grads();
  const auto dst_groups = param_groups(avg);
  const double inv = 1.0 / static_cast<double>(models.size());
  for (std::size_t m = 1; m < models.size(); ++m) {
    const auto src_groups = param_groups(*models[m]);
    for (std::size_t g = 0; g < dst_groups.size(); ++g) {
      if (src_groups[g]->size() != dst_groups[g]->size())
        throw std::invalid_argument("average_models: parameter shape mismatch");
      for (std::size_t i = 0; i < dst_groups[g]->size(); ++i)
        (*dst_groups[g])[i] += (*src_groups[g])[i];
    }
  }
  for (auto* grp : dst_groups)
    for (double& v : *grp) v *= inv;
  return avg;
}

// Centralized baseline: one model over the global index space, trained on the
// union of the listed clients' train blocks with plain MSE loss.
inline DmfModel train_centralized_on_clients(const InteractionDataset& ds,
                                             const FederatedSplit& split,
                                             std::span<const int> clients, const TrainConfig& cfg,
                                             TrainTrace* trace = nullptr) {
  cfg.validate();
  if (clients.empty()) throw std::invalid_argument("train_centralized: no clients");
  const std::uint64_t base = fed::global_base_seed(cfg.seed);
  Rng init_rng(fed::init_seed(base));
  DmfModel model(ds.num_users(), ds.num_features(), cfg.model_config(), init_rng);
  Optimizer opt = cfg.make_optimizer();

  for (std::size_t round = 0; round < cfg.epochs; ++round) {
    double loss;
    if (clients.size() == 1) {
      const int c = clients[0];
      Rng rng(fed::epoch_seed(fed::client_base_seed(cfg.seed, c), round));
      const std::vector<Batch> batches =
          to_batches(fed::client_epoch_examples(split, c, ds, cfg, rng), cfg.batch_size);
      loss = fed::local_epoch(model, nullptr, batches, cfg, rng, opt);
    } else {
      std::vector<TrainExample> examples;
      for (int c : clients) {
        Rng rng(fed::epoch_seed(fed::client_base_seed(cfg.seed, c), round));
        auto ex = fed::client_epoch_examples(split, c, ds, cfg, rng);
        examples.insert(examples.end(), ex.begin(), ex.end());
      }
      Rng merge_rng(derive_seed(base, fed::kMergeTag, round));
      merge_rng.shuffle(examples);
      loss = fed::local_epoch(model, nullptr, to_batches(examples, cfg.batch_size), cfg,
                              merge_rng, opt);
    }
    if (trace != nullptr) trace->epoch_loss.push_back(loss);
  }
  return model;
}

inline DmfModel train_centralized(const InteractionDataset& ds, const FederatedSplit& split,
                                  const TrainConfig& cfg, TrainTrace* trace = nullptr) {
  const std::array<int, 2> clients = {0, 1};
  return train_centralized_on_clients(ds, split, clients, cfg, trace);
}

// FedAvg: one global model; per round every client trains a copy for one
// local epoch on its own block, then the global parameters become the
// arithmetic mean of the client copies.
inline DmfModel train_fedavg_on_clients(const InteractionDataset& ds, const FederatedSplit& split,
                                        std::span<const int> clients, const TrainConfig& cfg,
                                        ExchangeLog* log = nullptr, TrainTrace* trace = nullptr) {
  cfg.validate();
  if (clients.empty()) throw std::invalid_argument("train_fedavg: no clients");
  const std::uint64_t base = fed::global_base_seed(cfg.seed);
  Rng init_rng(fed::init_seed(base));
  DmfModel global(ds.num_users(), ds.num_features(), cfg.model_config(), init_rng);
  std::vector<Optimizer> opts(clients.size(), cfg.make_optimizer());

  for (std::size_t round = 0; round < cfg.epochs; ++round) {
    std::vector<DmfModel> locals;
    locals.reserve(clients.size());
    double loss_sum = 0.0;
    for (std::size_t ci = 0; ci < clients.size(); ++ci) {
      const int c = clients[ci];
      if (log != nullptr)
        log->add(round, ExchangeLog::kServer, c, ExchangeLog::kFullModelPayload,
                 fed::param_rows(global), fed::param_count(global) * sizeof(double));
      DmfModel local = global;
      Rng rng(fed::epoch_seed(fed::client_base_seed(cfg.seed, c), round));
      const std::vector<Batch> batches =
          to_batches(fed::client_epoch_examples(split, c, ds, cfg, rng), cfg.batch_size);
      loss_sum += fed::local_epoch(local, nullptr, batches, cfg, rng, opts[ci]);
      if (log != nullptr)
        log->add(round, c, ExchangeLog::kServer, ExchangeLog::kFullModelPayload,
                 fed::param_rows(local), fed::param_count(local) * sizeof(double));
      locals.push_back(std::move(local));
    }
    std::vector<const DmfModel*> ptrs;
    for (const auto& m : locals) ptrs.push_back(&m);
    global = average_models(ptrs);
    if (trace != nullptr)
      trace->epoch_loss.push_back(loss_sum / static_cast<double>(clients.size()));
  }
  return global;
}

inline DmfModel train_fedavg(const InteractionDataset& ds, const FederatedSplit& split,
                             const TrainConfig& cfg, ExchangeLog* log = nullptr,
                             TrainTrace* trace = nullptr) {
  const std::array<int, 2> clients = {0, 1};
  return train_fedavg_on_clients(ds, split, clients, cfg, log, trace);
}

namespace fed {

inline ClientModel init_client_model(const InteractionDataset& ds, const FederatedSplit& split,
                                     int client, const TrainConfig& cfg,
                                     std::uint64_t base_seed) {
  Rng rng(init_seed(base_seed));
  std::optional<Rng> feature_rng;
  if (cfg.shared_feature_init) feature_rng.emplace(feature_init_seed(cfg.seed));
  ClientModel cm{
      DmfModel(split.client_users[client].size(), ds.num_features(), cfg.model_config(), rng,
               feature_rng ? &*feature_rng : nullptr),
      split.client_users[client],
      std::vector<std::uint32_t>(ds.num_users(), ClientModel::kNoRow)};
  for (std::size_t i = 0; i < cm.users.size(); ++i)
    cm.user_local[cm.users[i]] = static_cast<std::uint32_t>(i);
  return cm;
}

}  // namespace fed

// FedDMF: each client keeps a fully separate model; once per round the
// clients exchange their current common-feature embedding rows, and each
// local epoch minimizes MSE + the embedding similarity loss against the
// frozen peer snapshot. Nothing else ever crosses the client boundary.
// `client_seeds`, when given, replaces the per-client derived stream bases
// (used by twin-client tests).
inline std::array<ClientModel, 2> train_feddmf(
    const InteractionDataset& ds, const FederatedSplit& split, const TrainConfig& cfg,
    ExchangeLog* log = nullptr, std::array<TrainTrace, 2>* traces = nullptr,
    const std::array<std::uint64_t, 2>* client_seeds = nullptr) {
  cfg.validate();
  const std::vector<std::uint32_t>& common = split.common_features;
  const bool align_active = cfg.beta > 0.0 && !common.empty();
  if (cfg.beta > 0.0 && common.empty())
    std::fprintf(stderr,
                 "train_feddmf: warning: empty common feature set, embedding similarity loss "
                 "disabled\n");

  std::array<std::uint64_t, 2> bases;
  for (int c = 0; c < 2; ++c)
    bases[c] = client_seeds != nullptr ? (*client_seeds)[c] : fed::client_base_seed(cfg.seed, c);

  std::array<ClientModel, 2> clients = {
      fed::init_client_model(ds, split, 0, cfg, bases[0]),
      fed::init_client_model(ds, split, 1, cfg, bases[1]),
  };
  std::array<Optimizer, 2> opts = {cfg.make_optimizer(), cfg.make_optimizer()};

  const std::size_t embed_bytes = cfg.embed_dim * sizeof(double);
  for (std::size_t round = 0; round < cfg.epochs; ++round) {
    std::array<std::optional<fed::EmbAlignment>, 2> peer_of;  // snapshot received by client c
    if (align_active) {
      // both snapshots are taken before either client trains this round
      peer_of[0] = fed::snapshot_alignment(clients[1].model, common);
      peer_of[1] = fed::snapshot_alignment(clients[0].model, common);
      if (log != nullptr) {
        log->add(round, 1, 0, ExchangeLog::kCommonFeaturePayload, common.size(),
                 common.size() * embed_bytes);
        log->add(round, 0, 1, ExchangeLog::kCommonFeaturePayload, common.size(),
                 common.size() * embed_bytes);
      }
    }
    for (int c = 0; c < 2; ++c) {
      Rng rng(fed::epoch_seed(bases[c], round));
      const std::vector<Batch> batches =
          to_batches(fed::client_epoch_examples(split, c, ds, cfg, rng), cfg.batch_size);
      const double loss =
          fed::local_epoch(clients[c].model, &clients[c].user_local, batches, cfg, rng, opts[c],
                           peer_of[c] ? &*peer_of[c] : nullptr);
      if (traces != nullptr) (*traces)[c].epoch_loss.push_back(loss);
    }
  }
  return clients;
}

// One client trained in isolation (MSE only, no exchange). With beta = 0 the
// FedDMF client trajectory is bit-identical to this.
inline ClientModel train_client_independent(const InteractionDataset& ds,
                                            const FederatedSplit& split, int client,
                                            const TrainConfig& cfg, TrainTrace* trace = nullptr) {
  cfg.validate();
  const std::uint64_t base = fed::client_base_seed(cfg.seed, client);
  ClientModel cm = fed::init_client_model(ds, split, client, cfg, base);
  Optimizer opt = cfg.make_optimizer();
  for (std::size_t round = 0; round < cfg.epochs; ++round) {
    Rng rng(fed::epoch_seed(base, round));
    const std::vector<Batch> batches =
        to_batches(fed::client_epoch_examples(split, client, ds, cfg, rng), cfg.batch_size);
    const double loss = fed::local_epoch(cm.model, &cm.user_local, batches, cfg, rng, opt);
    if (trace != nullptr) trace->epoch_loss.push_back(loss);
  }
  return cm;
}

// Scores (user, feature) pairs whose features live in the PEER's table: the
// peer's embedding rows are fed through the LOCAL model.
inline std::vector<double> predict_cross_client(const ClientModel& local, const DmfModel& peer,
                                                const PairBlock& pairs,
                                                std::size_t chunk = 4096) {
  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (std::size_t off = 0; off < pairs.size(); off += chunk) {
    const std::size_t n = std::min(chunk, pairs.size() - off);
    const std::span<const std::uint32_t> feats(pairs.features.data() + off, n);
    for (std::uint32_t f : feats)
      if (f >= peer.num_features())
        throw std::out_of_range("predict_cross_client: feature index " + std::to_string(f) +
                                " out of range in peer table");
    const Matrix foreign = gather_rows(peer.feature_embeddings, feats);
    const std::vector<std::uint32_t> rows =
        local.local_rows({pairs.users.data() + off, n});
    const Matrix pred = local.model.predict_with_foreign_features(rows, foreign);
    for (std::size_t i = 0; i < n; ++i) scores.push_back(pred.data[i]);
  }
  return scores;
}

// Uniform [0,1) score per pair.
inline std::vector<double> random_baseline(const PairBlock& pairs, Rng& rng) {
  std::vector<double> scores(pairs.size());
  for (double& s : scores) s = rng.uniform();
  return scores;
}

}  // namespace feddmf
