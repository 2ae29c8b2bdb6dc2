#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "feddmf/dataset.hpp"
#include "feddmf/federation.hpp"
#include "feddmf/metrics.hpp"

namespace feddmf {

inline const char* fusion_name(Fusion f) {
  switch (f) {
    case Fusion::kConcat: return "concat";
    case Fusion::kProduct: return "product";
    case Fusion::kSum: return "sum";
  }
  throw std::logic_error("fusion_name: unknown fusion");
}

inline Fusion parse_fusion(const std::string& s) {
  if (s == "concat") return Fusion::kConcat;
  if (s == "product") return Fusion::kProduct;
  if (s == "sum") return Fusion::kSum;
  throw std::invalid_argument("unknown fusion '" + s + "' (expected concat|product|sum)");
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

inline bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("config key '" + key + "': expected true/false, got '" + s + "'");
}

inline std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

}  // namespace detail

// Flat key/value experiment configuration. Unknown keys are errors; every
// field is validated before any training starts.
struct ExperimentConfig {
  std::string dataset_path;
  double common_feature_fraction = 0.5;
  double client1_feature_fraction = 0.5;
  double client1_user_fraction = 0.5;
  TrainConfig train;
  std::vector<Strategy> strategies = {Strategy::kCentralized, Strategy::kFedAvg,
                                      Strategy::kFedDmf, Strategy::kRandom};
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::string out_dir = ".";
  bool save_checkpoints = false;

  void validate() const {
    if (dataset_path.empty())
      throw std::invalid_argument("config: 'dataset' must be set");
    SplitSpec s{common_feature_fraction, client1_feature_fraction, client1_user_fraction, 0};
    s.validate();
    train.validate();
    if (strategies.empty()) throw std::invalid_argument("config: empty strategy list");
    if (seeds.empty()) throw std::invalid_argument("config: empty seed list");
  }

  void set(const std::string& key, const std::string& value);
  static ExperimentConfig from_file(const std::string& path);
  std::string echo() const;
};

inline void ExperimentConfig::set(const std::string& key, const std::string& value) {
  auto as_f64 = [&] {
    double v;
    if (!detail::parse_f64(value, v))
      throw std::invalid_argument("config key '" + key + "': bad number '" + value + "'");
    return v;
  };
  auto as_count = [&]() -> std::size_t {
    std::int64_t v;
    if (!detail::parse_i64(value, v) || v < 0)
      throw std::invalid_argument("config key '" + key + "': bad count '" + value + "'");
    return static_cast<std::size_t>(v);
  };
  if (key == "dataset") dataset_path = value;
  else if (key == "common_feature_fraction") common_feature_fraction = as_f64();
  else if (key == "client1_feature_fraction") client1_feature_fraction = as_f64();
  else if (key == "client1_user_fraction") client1_user_fraction = as_f64();
  else if (key == "epochs") train.epochs = as_count();
  else if (key == "batch_size") train.batch_size = as_count();
  else if (key == "learning_rate") train.learning_rate = as_f64();
  else if (key == "margin") train.margin = as_f64();
  else if (key == "beta") train.beta = as_f64();
  else if (key == "negatives_per_positive") train.negatives_per_positive = as_count();
  else if (key == "dropout_rate") train.dropout_rate = as_f64();
  else if (key == "embed_dim") train.embed_dim = as_count();
  else if (key == "hidden_dim") train.hidden_dim = as_count();
  else if (key == "threshold") train.threshold = as_f64();
  else if (key == "optimizer") {
    if (value == "adam") train.optimizer = OptimizerKind::kAdam;
    else if (value == "sgd") train.optimizer = OptimizerKind::kSgd;
    else throw std::invalid_argument("config key 'optimizer': expected adam|sgd, got '" + value + "'");
  }
  else if (key == "momentum") train.momentum = as_f64();
  else if (key == "fusion") train.fusion = parse_fusion(value);
  else if (key == "emb_loss_per_epoch") train.emb_loss_per_epoch = detail::parse_bool(value, key);
  else if (key == "shared_feature_init")
    train.shared_feature_init = detail::parse_bool(value, key);
  else if (key == "full_block_training")
    train.full_block_training = detail::parse_bool(value, key);
  else if (key == "strategies") {
    strategies.clear();
    for (const auto& tok : detail::split_list(value)) strategies.push_back(parse_strategy(tok));
  } else if (key == "seeds") {
    seeds.clear();
    for (const auto& tok : detail::split_list(value)) {
      std::int64_t v;
      if (!detail::parse_i64(tok, v) || v < 0)
        throw std::invalid_argument("config key 'seeds': bad seed '" + tok + "'");
      seeds.push_back(static_cast<std::uint64_t>(v));
    }
  } else if (key == "out_dir") out_dir = value;
  else if (key == "save_checkpoints") save_checkpoints = detail::parse_bool(value, key);
  else
    throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: " + path + ":" + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + t + "'");
    cfg.set(detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

inline std::string ExperimentConfig::echo() const {
  std::ostringstream out;
  out << "dataset = " << dataset_path << '\n';
  out << "common_feature_fraction = " << detail::fmt("%.17g", common_feature_fraction) << '\n';
  out << "client1_feature_fraction = " << detail::fmt("%.17g", client1_feature_fraction) << '\n';
  out << "client1_user_fraction = " << detail::fmt("%.17g", client1_user_fraction) << '\n';
  out << "strategies = ";
  for (std::size_t i = 0; i < strategies.size(); ++i)
    out << (i ? "," : "") << strategy_name(strategies[i]);
  out << '\n';
  out << "seeds = ";
  for (std::size_t i = 0; i < seeds.size(); ++i) out << (i ? "," : "") << seeds[i];
  out << '\n';
  out << "epochs = " << train.epochs << '\n';
  out << "batch_size = " << train.batch_size << '\n';
  out << "learning_rate = " << detail::fmt("%.17g", train.learning_rate) << '\n';
  out << "margin = " << detail::fmt("%.17g", train.margin) << '\n';
  out << "beta = " << detail::fmt("%.17g", train.beta) << '\n';
  out << "negatives_per_positive = " << train.negatives_per_positive << '\n';
  out << "dropout_rate = " << detail::fmt("%.17g", train.dropout_rate) << '\n';
  out << "embed_dim = " << train.embed_dim << '\n';
  out << "hidden_dim = " << train.hidden_dim << '\n';
  out << "threshold = " << detail::fmt("%.17g", train.threshold) << '\n';
  out << "optimizer = " << (train.optimizer == OptimizerKind::kAdam ? "adam" : "sgd") << '\n';
  out << "momentum = " << detail::fmt("%.17g", train.momentum) << '\n';
  out << "fusion = " << fusion_name(train.fusion) << '\n';
  out << "emb_loss_per_epoch = " << (train.emb_loss_per_epoch ? "true" : "false") << '\n';
  out << "shared_feature_init = " << (train.shared_feature_init ? "true" : "false") << '\n';
  out << "full_block_training = " << (train.full_block_training ? "true" : "false") << '\n';
  out << "out_dir = " << out_dir << '\n';
  out << "save_checkpoints = " << (save_checkpoints ? "true" : "false") << '\n';
  return out.str();
}

// One (strategy, seed, split-fractions) execution unit.
struct RunSpec {
  Strategy strategy = Strategy::kCentralized;
  std::uint64_t seed = 1;
  double common_feature_fraction = 0.5;
  double client1_feature_fraction = 0.5;
  double client1_user_fraction = 0.5;
};

struct RunResult {
  std::string strategy;
  std::uint64_t seed = 0;
  double common_feature_fraction = 0, client1_feature_fraction = 0, client1_user_fraction = 0;
  int client = 0;     // 1-based
  std::string phase;  // "train" | "test"
  double precision = 0, recall = 0, f1 = 0;
  double wall_seconds = 0;  // reported in timings.csv, not results.csv
};

struct RunOutput {
  std::vector<RunResult> rows;
  ExchangeLog exchange;  // populated for fedavg / feddmf
  std::vector<std::pair<std::string, DmfModel>> models;  // name -> trained model
};

// Eval-mode scores over a pair block, chunked.
inline std::vector<double> score_block(const DmfModel& model, const PairBlock& block,
                                       std::size_t chunk = 4096) {
  std::vector<double> scores;
  scores.reserve(block.size());
  for (std::size_t off = 0; off < block.size(); off += chunk) {
    const std::size_t n = std::min(chunk, block.size() - off);
    const Matrix pred = model.predict({block.users.data() + off, n},
                                      {block.features.data() + off, n});
    for (std::size_t i = 0; i < n; ++i) scores.push_back(pred.data[i]);
  }
  return scores;
}

// Same, for a client model whose user rows are local.
inline std::vector<double> score_block_local(const ClientModel& cm, const PairBlock& block,
                                             std::size_t chunk = 4096) {
  std::vector<double> scores;
  scores.reserve(block.size());
  for (std::size_t off = 0; off < block.size(); off += chunk) {
    const std::size_t n = std::min(chunk, block.size() - off);
    const std::vector<std::uint32_t> rows = cm.local_rows({block.users.data() + off, n});
    const Matrix pred = cm.model.predict(rows, {block.features.data() + off, n});
    for (std::size_t i = 0; i < n; ++i) scores.push_back(pred.data[i]);
  }
  return scores;
}

inline RunOutput execute_run(const InteractionDataset& ds, const TrainConfig& base_train,
                             const RunSpec& spec, bool keep_models = false) {
  TrainConfig cfg = base_train;
  cfg.seed = spec.seed;
  const SplitSpec sspec{spec.common_feature_fraction, spec.client1_feature_fraction,
                        spec.client1_user_fraction, spec.seed};
  FederatedSplit split;
  try {
    split = make_split(ds, sspec);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("[stage:split] ") + e.what());
  }

  std::array<PairBlock, 2> train_blocks, test_blocks;
  for (int c = 0; c < 2; ++c) {
    train_blocks[c] = train_block_pairs(split, c, ds);
    test_blocks[c] = test_block_pairs(split, c, ds);
  }

  RunOutput out;
  std::array<std::array<std::vector<double>, 2>, 2> scores;  // [client][0=train,1=test]
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (spec.strategy) {
      case Strategy::kCentralized: {
        DmfModel model = train_centralized(ds, split, cfg);
        for (int c = 0; c < 2; ++c) {
          scores[c][0] = score_block(model, train_blocks[c]);
          scores[c][1] = score_block(model, test_blocks[c]);
        }
        if (keep_models) out.models.emplace_back("dmf", std::move(model));
        break;
      }
      case Strategy::kFedAvg: {
        DmfModel model = train_fedavg(ds, split, cfg, &out.exchange);
        for (int c = 0; c < 2; ++c) {
          scores[c][0] = score_block(model, train_blocks[c]);
          scores[c][1] = score_block(model, test_blocks[c]);
        }
        if (keep_models) out.models.emplace_back("fedavg", std::move(model));
        break;
      }
      case Strategy::kFedDmf: {
        std::array<ClientModel, 2> clients = train_feddmf(ds, split, cfg, &out.exchange);
        for (int c = 0; c < 2; ++c) {
          scores[c][0] = score_block_local(clients[c], train_blocks[c]);
          scores[c][1] = predict_cross_client(clients[c], clients[1 - c].model, test_blocks[c]);
        }
        if (keep_models) {
          out.models.emplace_back("feddmf_client1", std::move(clients[0].model));
          out.models.emplace_back("feddmf_client2", std::move(clients[1].model));
        }
        break;
      }
      case Strategy::kRandom: {
        Rng rng(derive_seed(cfg.seed, fed::kRandBaselineTag));
        for (int c = 0; c < 2; ++c) {
          scores[c][0] = random_baseline(train_blocks[c], rng);
          scores[c][1] = random_baseline(test_blocks[c], rng);
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("[stage:train strategy=") +
                             strategy_name(spec.strategy) + " seed=" +
                             std::to_string(spec.seed) + "] " + e.what());
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  try {
    for (int c = 0; c < 2; ++c) {
      for (int phase = 0; phase < 2; ++phase) {
        const PairBlock& block = phase == 0 ? train_blocks[c] : test_blocks[c];
        const MetricsReport rep =
            f1_report(confusion(scores[c][phase], block.labels, cfg.threshold));
        RunResult row;
        row.strategy = strategy_name(spec.strategy);
        row.seed = spec.seed;
        row.common_feature_fraction = spec.common_feature_fraction;
        row.client1_feature_fraction = spec.client1_feature_fraction;
        row.client1_user_fraction = spec.client1_user_fraction;
        row.client = c + 1;
        row.phase = phase == 0 ? "train" : "test";
        row.precision = rep.precision;
        row.recall = rep.recall;
        row.f1 = rep.f1;
        row.wall_seconds = wall;
        out.rows.push_back(std::move(row));
      }
    }
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("[stage:evaluate strategy=") +
                             strategy_name(spec.strategy) + "] " + e.what());
  }
  return out;
}

// Executes run specs (optionally on worker threads); outputs are collected in
// spec order so the result table does not depend on the job count.
inline std::vector<RunOutput> execute_all(const InteractionDataset& ds,
                                          const TrainConfig& base_train,
                                          std::span<const RunSpec> specs, std::size_t jobs,
                                          bool keep_models = false) {
  if (jobs == 0) jobs = 1;
  std::vector<RunOutput> outputs(specs.size());
  if (jobs == 1 || specs.size() <= 1) {
    for (std::size_t i = 0; i < specs.size(); ++i)
      outputs[i] = execute_run(ds, base_train, specs[i], keep_models);
    return outputs;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(specs.size());
  const std::size_t n_workers = std::min(jobs, specs.size());
  for (std::size_t w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= specs.size()) return;
        try {
          outputs[i] = execute_run(ds, base_train, specs[i], keep_models);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return outputs;
}

inline constexpr const char* kResultsCsvHeader =
    "strategy,seed,common_feature_fraction,client1_feature_fraction,client1_user_fraction,"
    "client,phase,precision,recall,f1";

inline void write_results_csv(const std::string& path, std::span<const RunResult> rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_results_csv: cannot open " + path);
  out << kResultsCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.strategy << ',' << r.seed << ',' << detail::fmt("%g", r.common_feature_fraction)
        << ',' << detail::fmt("%g", r.client1_feature_fraction) << ','
        << detail::fmt("%g", r.client1_user_fraction) << ',' << r.client << ',' << r.phase << ','
        << detail::fmt("%.6f", r.precision) << ',' << detail::fmt("%.6f", r.recall) << ','
        << detail::fmt("%.6f", r.f1) << '\n';
  }
}

// Wall-clock time lives in its own file so results.csv stays byte-identical
// across reruns of the same config.
inline void write_timings_csv(const std::string& path, std::span<const RunResult> rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_timings_csv: cannot open " + path);
  out << "strategy,seed,common_feature_fraction,client1_feature_fraction,client1_user_fraction,"
         "wall_seconds\n";
  std::string last_key;
  for (const auto& r : rows) {
    std::string key = r.strategy + "," + std::to_string(r.seed) + "," +
                      detail::fmt("%g", r.common_feature_fraction) + "," +
                      detail::fmt("%g", r.client1_feature_fraction) + "," +
                      detail::fmt("%g", r.client1_user_fraction);
    if (key == last_key) continue;  // one line per run, not per row
    out << key << ',' << detail::fmt("%.3f", r.wall_seconds) << '\n';
    last_key = std::move(key);
  }
}

enum class SweepAxis { kCommonFraction, kC1UserFraction, kC1FeatureFraction };

inline SweepAxis parse_axis(const std::string& s) {
  if (s == "common_fraction") return SweepAxis::kCommonFraction;
  if (s == "c1_user_fraction") return SweepAxis::kC1UserFraction;
  if (s == "c1_feature_fraction") return SweepAxis::kC1FeatureFraction;
  throw std::invalid_argument(
      "unknown sweep axis '" + s +
      "' (expected common_fraction|c1_user_fraction|c1_feature_fraction)");
}

inline const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::kCommonFraction: return "common_fraction";
    case SweepAxis::kC1UserFraction: return "c1_user_fraction";
    case SweepAxis::kC1FeatureFraction: return "c1_feature_fraction";
  }
  throw std::logic_error("axis_name: unknown axis");
}

inline RunSpec base_spec(const ExperimentConfig& cfg, Strategy strategy, std::uint64_t seed) {
  return {strategy, seed, cfg.common_feature_fraction, cfg.client1_feature_fraction,
          cfg.client1_user_fraction};
}

inline std::vector<RunSpec> build_run_specs(const ExperimentConfig& cfg) {
  std::vector<RunSpec> specs;
  for (Strategy s : cfg.strategies)
    for (std::uint64_t seed : cfg.seeds) specs.push_back(base_spec(cfg, s, seed));
  return specs;
}

inline std::vector<RunSpec> build_sweep_specs(const ExperimentConfig& cfg, SweepAxis axis,
                                              std::span<const double> values) {
  for (double v : values)
    if (!(v > 0.0 && v < 1.0))
      throw std::invalid_argument("sweep: axis value " + detail::fmt("%g", v) +
                                  " out of range (0,1)");
  std::vector<RunSpec> specs;
  for (double v : values) {
    for (Strategy s : cfg.strategies) {
      for (std::uint64_t seed : cfg.seeds) {
        RunSpec spec = base_spec(cfg, s, seed);
        switch (axis) {
          case SweepAxis::kCommonFraction: spec.common_feature_fraction = v; break;
          case SweepAxis::kC1UserFraction: spec.client1_user_fraction = v; break;
          case SweepAxis::kC1FeatureFraction: spec.client1_feature_fraction = v; break;
        }
        specs.push_back(spec);
      }
    }
  }
  return specs;
}

inline double axis_value(const RunSpec& spec, SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kCommonFraction: return spec.common_feature_fraction;
    case SweepAxis::kC1UserFraction: return spec.client1_user_fraction;
    case SweepAxis::kC1FeatureFraction: return spec.client1_feature_fraction;
  }
  throw std::logic_error("axis_value: unknown axis");
}

// Per-axis summary: mean/std F1 over seeds for every (value, strategy,
// client, phase) group, in first-appearance order.
inline void write_sweep_summary(const std::string& path, SweepAxis axis,
                                std::span<const RunSpec> specs,
                                std::span<const RunOutput> outputs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_sweep_summary: cannot open " + path);
  out << "axis,value,strategy,client,phase,mean_f1,std_f1,seeds\n";
  struct Key {
    double value;
    std::string strategy, phase;
    int client;
    bool operator<(const Key& o) const {
      return std::tie(value, strategy, client, phase) <
             std::tie(o.value, o.strategy, o.client, o.phase);
    }
  };
  std::map<Key, std::vector<MetricsReport>> groups;
  std::vector<Key> order;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const double v = axis_value(specs[i], axis);
    for (const RunResult& r : outputs[i].rows) {
      Key k{v, r.strategy, r.phase, r.client};
      auto [it, inserted] = groups.emplace(k, std::vector<MetricsReport>{});
      if (inserted) order.push_back(k);
      MetricsReport rep;
      rep.precision = r.precision;
      rep.recall = r.recall;
      rep.f1 = r.f1;
      it->second.push_back(rep);
    }
  }
  for (const Key& k : order) {
    const MetricsSummary s = aggregate(groups.at(k));
    out << axis_name(axis) << ',' << detail::fmt("%g", k.value) << ',' << k.strategy << ','
        << k.client << ',' << k.phase << ',' << detail::fmt("%.6f", s.mean_f1) << ','
        << detail::fmt("%.6f", s.std_f1) << ',' << s.count << '\n';
  }
}

struct PrepareSummary {
  std::size_t ratings = 0, users = 0, movies = 0;
};

// Validates the ratings CSV and writes a small dataset manifest.
inline PrepareSummary cmd_prepare(const std::string& csv_path, const std::string& out_dir) {
  RatingsTable table = load_movielens_csv(csv_path);
  InteractionDataset ds = binarize(table);
  PrepareSummary s{table.records.size(), ds.num_users(), ds.num_features()};
  std::filesystem::create_directories(out_dir);
  const std::string path = (std::filesystem::path(out_dir) / "dataset_manifest.txt").string();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cmd_prepare: cannot open " + path);
  out << "feddmf-dataset-manifest v1\n";
  out << "source " << csv_path << '\n';
  out << "ratings " << s.ratings << '\n';
  out << "users " << s.users << '\n';
  out << "features " << s.movies << '\n';
  return s;
}

namespace detail {

inline std::string run_tag(const RunSpec& spec, const SweepAxis* axis) {
  std::string tag;
  if (axis != nullptr)
    tag += std::string(axis_name(*axis)) + "_" + fmt("%g", axis_value(spec, *axis)) + "_";
  tag += "seed" + std::to_string(spec.seed);
  return tag;
}

inline void write_run_artifacts(const std::string& out_dir, const ExperimentConfig& cfg,
                                std::span<const RunSpec> specs,
                                std::vector<RunOutput>& outputs, const SweepAxis* axis) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<RunResult> rows;
  for (const auto& o : outputs) rows.insert(rows.end(), o.rows.begin(), o.rows.end());
  write_results_csv((fs::path(out_dir) / "results.csv").string(), rows);
  write_timings_csv((fs::path(out_dir) / "timings.csv").string(), rows);
  {
    const std::string path = (fs::path(out_dir) / "config_echo.txt").string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << cfg.echo();
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const std::string tag = run_tag(specs[i], axis);
    if (specs[i].strategy == Strategy::kFedDmf)
      outputs[i].exchange.write(
          (fs::path(out_dir) / ("exchange_feddmf_" + tag + ".log")).string());
    if (cfg.save_checkpoints) {
      for (const auto& [name, model] : outputs[i].models)
        model.save_checkpoint(
            (fs::path(out_dir) / ("model_" + name + "_" + tag + ".ckpt")).string());
    }
  }
  if (axis != nullptr)
    write_sweep_summary((fs::path(out_dir) / "sweep_summary.csv").string(), *axis, specs,
                        outputs);
}

}  // namespace detail

// `run` subcommand: strategies x seeds on the configured split fractions.
inline std::vector<RunResult> cmd_run(const ExperimentConfig& cfg, std::size_t jobs = 1) {
  cfg.validate();
  InteractionDataset ds;
  try {
    ds = binarize(load_movielens_csv(cfg.dataset_path));
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("[stage:dataset] ") + e.what());
  }
  const std::vector<RunSpec> specs = build_run_specs(cfg);
  std::vector<RunOutput> outputs = execute_all(ds, cfg.train, specs, jobs, cfg.save_checkpoints);
  try {
    detail::write_run_artifacts(cfg.out_dir, cfg, specs, outputs, nullptr);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("[stage:write] ") + e.what());
  }
  std::vector<RunResult> rows;
  for (const auto& o : outputs) rows.insert(rows.end(), o.rows.begin(), o.rows.end());
  return rows;
}

// `sweep` subcommand: cross product of axis values x strategies x seeds.
inline std::vector<RunResult> cmd_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                                        std::span<const double> values, std::size_t jobs = 1) {
  cfg.validate();
  if (values.empty()) throw std::invalid_argument("sweep: no axis values");
  const std::vector<RunSpec> specs = build_sweep_specs(cfg, axis, values);
  InteractionDataset ds;
  try {
    ds = binarize(load_movielens_csv(cfg.dataset_path));
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("[stage:dataset] ") + e.what());
  }
  std::vector<RunOutput> outputs = execute_all(ds, cfg.train, specs, jobs, cfg.save_checkpoints);
  try {
    detail::write_run_artifacts(cfg.out_dir, cfg, specs, outputs, &axis);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("[stage:write] ") + e.what());
  }
  std::vector<RunResult> rows;
  for (const auto& o : outputs) rows.insert(rows.end(), o.rows.begin(), o.rows.end());
  return rows;
}

}  // namespace feddmf
