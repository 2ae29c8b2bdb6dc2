#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "feddmf/rng.hpp"

namespace feddmf {

struct Rating {
  std::int64_t user_id = 0;
  std::int64_t movie_id = 0;
  double rating = 0.0;
  std::int64_t timestamp = 0;
};

struct RatingsTable {
  std::vector<Rating> records;
};

namespace detail {

inline bool parse_i64(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoll(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size();
}

inline bool parse_f64(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace detail

// Expects the MovieLens ratings schema: header `userId,movieId,rating,timestamp`
// followed by comma-separated data rows. Duplicate (user, movie) pairs are a
// parse error.
inline RatingsTable load_movielens_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_movielens_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ":1: empty file, expected header");
  {
    auto fields = detail::split_csv_line(line);
    if (fields != std::vector<std::string>{"userId", "movieId", "rating", "timestamp"})
      throw std::runtime_error(path + ":1: expected header userId,movieId,rating,timestamp");
  }
  RatingsTable table;
  std::unordered_set<std::uint64_t> seen;
  std::unordered_map<std::int64_t, std::uint32_t> user_ids, movie_ids;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != 4)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 4 comma-separated fields, got " +
                               std::to_string(fields.size()));
    Rating r;
    if (!detail::parse_i64(fields[0], r.user_id) || !detail::parse_i64(fields[1], r.movie_id) ||
        !detail::parse_f64(fields[2], r.rating) || !detail::parse_i64(fields[3], r.timestamp))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed row '" + line +
                               "'");
    const std::uint32_t ui =
        user_ids.emplace(r.user_id, static_cast<std::uint32_t>(user_ids.size())).first->second;
    const std::uint32_t mi =
        movie_ids.emplace(r.movie_id, static_cast<std::uint32_t>(movie_ids.size())).first->second;
    const std::uint64_t key = (static_cast<std::uint64_t>(ui) << 32) | mi;
    if (!seen.insert(key).second)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": duplicate pair userId=" +
                               std::to_string(r.user_id) + " movieId=" +
                               std::to_string(r.movie_id));
    table.records.push_back(r);
  }
  return table;
}

// Implicit-feedback view of a ratings table: dense indices assigned in
// first-appearance order, every rated pair a positive regardless of value.
struct InteractionDataset {
  std::vector<std::int64_t> user_ids;     // dense index -> external id
  std::vector<std::int64_t> feature_ids;  // dense index -> external id
  std::unordered_map<std::int64_t, std::uint32_t> user_index;     // external -> dense
  std::unordered_map<std::int64_t, std::uint32_t> feature_index;  // external -> dense
  std::vector<std::pair<std::uint32_t, std::uint32_t>> positives;
  std::unordered_set<std::uint64_t> positive_set;  // (user << 32) | feature

  std::size_t num_users() const { return user_ids.size(); }
  std::size_t num_features() const { return feature_ids.size(); }

  bool is_positive(std::uint32_t u, std::uint32_t f) const {
    return positive_set.count((static_cast<std::uint64_t>(u) << 32) | f) != 0;
  }
};

inline InteractionDataset binarize(const RatingsTable& table) {
  if (table.records.empty()) throw std::invalid_argument("binarize: empty ratings table");
  InteractionDataset ds;
  for (const Rating& r : table.records) {
    auto [uit, unew] = ds.user_index.emplace(r.user_id, static_cast<std::uint32_t>(ds.user_ids.size()));
    if (unew) ds.user_ids.push_back(r.user_id);
    auto [fit, fnew] =
        ds.feature_index.emplace(r.movie_id, static_cast<std::uint32_t>(ds.feature_ids.size()));
    if (fnew) ds.feature_ids.push_back(r.movie_id);
    const std::uint32_t u = uit->second, f = fit->second;
    ds.positives.emplace_back(u, f);
    ds.positive_set.insert((static_cast<std::uint64_t>(u) << 32) | f);
  }
  return ds;
}

struct SplitSpec {
  double common_feature_fraction = 0.5;
  double client1_feature_fraction = 0.5;  // fraction of the NON-common features
  double client1_user_fraction = 0.5;
  std::uint64_t seed = 1;

  void validate() const {
    auto check = [](double v, const char* name) {
      if (!(v > 0.0 && v < 1.0))
        throw std::invalid_argument(std::string("SplitSpec: ") + name +
                                    " must be in (0,1), got " + std::to_string(v));
    };
    check(common_feature_fraction, "common_feature_fraction");
    check(client1_feature_fraction, "client1_feature_fraction");
    check(client1_user_fraction, "client1_user_fraction");
  }
};

// Two-client split: disjoint user sets, a common feature set shared by both
// clients, and per-client exclusive features. Client c trains on
// (its users) x (its exclusive features + common features) and is tested on
// (its users) x (the OTHER client's exclusive features).
struct FederatedSplit {
  std::array<std::vector<std::uint32_t>, 2> client_users;
  std::vector<std::uint32_t> common_features;
  std::array<std::vector<std::uint32_t>, 2> exclusive_features;

  // membership bitmasks, bit c = client c
  std::vector<std::uint8_t> user_mask;           // user belongs to client c
  std::vector<std::uint8_t> feature_train_mask;  // feature is in client c's train features

  std::vector<std::uint32_t> train_features(int client) const {
    std::vector<std::uint32_t> f = exclusive_features[client];
    f.insert(f.end(), common_features.begin(), common_features.end());
    return f;
  }

  bool in_train_block(int client, std::uint32_t u, std::uint32_t f) const {
    return ((user_mask[u] >> client) & 1) && ((feature_train_mask[f] >> client) & 1);
  }

  void rebuild_lookup(std::size_t num_users, std::size_t num_features) {
    user_mask.assign(num_users, 0);
    feature_train_mask.assign(num_features, 0);
    for (int c = 0; c < 2; ++c) {
      for (std::uint32_t u : client_users[c]) user_mask[u] |= static_cast<std::uint8_t>(1 << c);
      for (std::uint32_t f : exclusive_features[c])
        feature_train_mask[f] |= static_cast<std::uint8_t>(1 << c);
    }
    for (std::uint32_t f : common_features) feature_train_mask[f] |= 0b11;
  }
};

// Deterministic split construction: features are shuffled by the seeded RNG,
// the first ceil(common_fraction * F) become common, the remainder is divided
// by client1_feature_fraction; users are shuffled and divided by
// client1_user_fraction. Ceiling rounding throughout.
inline FederatedSplit make_split(const InteractionDataset& ds, const SplitSpec& spec) {
  spec.validate();
  const std::size_t num_f = ds.num_features(), num_u = ds.num_users();
  Rng rng(spec.seed);

  std::vector<std::uint32_t> feats(num_f);
  for (std::size_t i = 0; i < num_f; ++i) feats[i] = static_cast<std::uint32_t>(i);
  rng.shuffle(feats);
  const std::size_t n_common = static_cast<std::size_t>(
      std::ceil(spec.common_feature_fraction * static_cast<double>(num_f)));
  const std::size_t n_rest = num_f - std::min(n_common, num_f);
  const std::size_t n_excl1 = static_cast<std::size_t>(
      std::ceil(spec.client1_feature_fraction * static_cast<double>(n_rest)));

  std::vector<std::uint32_t> users(num_u);
  for (std::size_t i = 0; i < num_u; ++i) users[i] = static_cast<std::uint32_t>(i);
  rng.shuffle(users);
  const std::size_t n_u1 = static_cast<std::size_t>(
      std::ceil(spec.client1_user_fraction * static_cast<double>(num_u)));

  FederatedSplit split;
  split.common_features.assign(feats.begin(), feats.begin() + n_common);
  split.exclusive_features[0].assign(feats.begin() + n_common, feats.begin() + n_common + n_excl1);
  split.exclusive_features[1].assign(feats.begin() + n_common + n_excl1, feats.end());
  split.client_users[0].assign(users.begin(), users.begin() + n_u1);
  split.client_users[1].assign(users.begin() + n_u1, users.end());

  auto require_nonempty = [](const std::vector<std::uint32_t>& part, const char* name) {
    if (part.empty())
      throw std::invalid_argument(std::string("make_split: empty part '") + name + "'");
  };
  require_nonempty(split.common_features, "common_features");
  require_nonempty(split.exclusive_features[0], "client1_exclusive_features");
  require_nonempty(split.exclusive_features[1], "client2_exclusive_features");
  require_nonempty(split.client_users[0], "client1_users");
  require_nonempty(split.client_users[1], "client2_users");

  split.rebuild_lookup(num_u, num_f);
  return split;
}

namespace detail {

inline void write_id_list(std::ostream& out, const char* name,
                          const std::vector<std::uint32_t>& dense,
                          const std::vector<std::int64_t>& external) {
  out << name << ' ' << dense.size() << ':';
  for (std::uint32_t i : dense) out << ' ' << external[i];
  out << '\n';
}

inline std::vector<std::uint32_t> read_id_list(
    std::istream& in, const std::string& expect,
    const std::unordered_map<std::int64_t, std::uint32_t>& index, const std::string& path) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_split_manifest: " + path + ": missing section " + expect);
  std::istringstream ss(line);
  std::string name;
  std::size_t count = 0;
  char colon = 0;
  ss >> name >> count >> colon;
  if (name != expect || colon != ':')
    throw std::runtime_error("load_split_manifest: " + path + ": expected section '" + expect +
                             "', got '" + name + "'");
  std::vector<std::uint32_t> out;
  out.reserve(count);
  std::int64_t id;
  while (ss >> id) {
    auto it = index.find(id);
    if (it == index.end())
      throw std::runtime_error("load_split_manifest: " + path + ": unknown id " +
                               std::to_string(id) + " in section " + expect);
    out.push_back(it->second);
  }
  if (out.size() != count)
    throw std::runtime_error("load_split_manifest: " + path + ": section " + expect +
                             " declared " + std::to_string(count) + " ids, found " +
                             std::to_string(out.size()));
  return out;
}

}  // namespace detail

// Structured-text manifest holding the seed, fractions and the per-part
// external-id lists, so a split reloads bit-exactly against the same dataset.
inline void save_split_manifest(const std::string& path, const SplitSpec& spec,
                                const FederatedSplit& split, const InteractionDataset& ds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_split_manifest: cannot open " + path);
  out << "feddmf-split-manifest v1\n";
  out << "seed " << spec.seed << '\n';
  char buf[64];
  auto wfrac = [&](const char* name, double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << name << ' ' << buf << '\n';
  };
  wfrac("common_feature_fraction", spec.common_feature_fraction);
  wfrac("client1_feature_fraction", spec.client1_feature_fraction);
  wfrac("client1_user_fraction", spec.client1_user_fraction);
  detail::write_id_list(out, "client1_users", split.client_users[0], ds.user_ids);
  detail::write_id_list(out, "client2_users", split.client_users[1], ds.user_ids);
  detail::write_id_list(out, "common_features", split.common_features, ds.feature_ids);
  detail::write_id_list(out, "client1_exclusive_features", split.exclusive_features[0],
                        ds.feature_ids);
  detail::write_id_list(out, "client2_exclusive_features", split.exclusive_features[1],
                        ds.feature_ids);
  if (!out) throw std::runtime_error("save_split_manifest: write failed for " + path);
}

inline std::pair<SplitSpec, FederatedSplit> load_split_manifest(const std::string& path,
                                                                const InteractionDataset& ds) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_split_manifest: cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != "feddmf-split-manifest v1")
    throw std::runtime_error("load_split_manifest: " + path + ": bad header '" + line + "'");
  SplitSpec spec;
  auto read_kv = [&](const char* key) -> std::string {
    std::getline(in, line);
    std::istringstream ss(line);
    std::string k, v;
    ss >> k >> v;
    if (k != key)
      throw std::runtime_error("load_split_manifest: " + path + ": expected key '" + key +
                               "', got '" + k + "'");
    return v;
  };
  spec.seed = std::stoull(read_kv("seed"));
  spec.common_feature_fraction = std::stod(read_kv("common_feature_fraction"));
  spec.client1_feature_fraction = std::stod(read_kv("client1_feature_fraction"));
  spec.client1_user_fraction = std::stod(read_kv("client1_user_fraction"));
  FederatedSplit split;
  split.client_users[0] = detail::read_id_list(in, "client1_users", ds.user_index, path);
  split.client_users[1] = detail::read_id_list(in, "client2_users", ds.user_index, path);
  split.common_features = detail::read_id_list(in, "common_features", ds.feature_index, path);
  split.exclusive_features[0] =
      detail::read_id_list(in, "client1_exclusive_features", ds.feature_index, path);
  split.exclusive_features[1] =
      detail::read_id_list(in, "client2_exclusive_features", ds.feature_index, path);
  split.rebuild_lookup(ds.num_users(), ds.num_features());
  return {spec, split};
}

struct TrainExample {
  std::uint32_t user = 0;
  std::uint32_t feature = 0;
  double label = 0.0;
};

struct Batch {
  std::vector<std::uint32_t> users, features;
  std::vector<double> labels;
  std::size_t size() const { return users.size(); }
};

// One epoch of training examples for a client: all its train-block positives
// (shuffled) plus `negatives_per_positive` uniform negatives per positive,
// drawn from the client's train block and never colliding with a positive.
// The combined list is shuffled again so batches interleave labels.
inline std::vector<TrainExample> epoch_examples(const FederatedSplit& split, int client,
                                                const InteractionDataset& ds,
                                                std::size_t negatives_per_positive, Rng& rng) {
  std::vector<TrainExample> positives;
  for (const auto& [u, f] : ds.positives)
    if (split.in_train_block(client, u, f)) positives.push_back({u, f, 1.0});
  if (positives.empty())
    throw std::invalid_argument("sample_batches: client " + std::to_string(client + 1) +
                                " has no positive examples in its train block");
  rng.shuffle(positives);

  std::vector<TrainExample> examples = positives;
  if (negatives_per_positive > 0) {
    const std::vector<std::uint32_t>& users = split.client_users[client];
    const std::vector<std::uint32_t> feats = split.train_features(client);
    const std::size_t block = users.size() * feats.size();
    if (positives.size() >= block)
      throw std::invalid_argument("sample_batches: client " + std::to_string(client + 1) +
                                  " train block has no negative candidates");
    examples.reserve(positives.size() * (1 + negatives_per_positive));
    for (std::size_t p = 0; p < positives.size(); ++p) {
      for (std::size_t k = 0; k < negatives_per_positive; ++k) {
        for (;;) {
          const std::uint32_t u = users[rng.uniform_index(users.size())];
          const std::uint32_t f = feats[rng.uniform_index(feats.size())];
          if (!ds.is_positive(u, f)) {
            examples.push_back({u, f, 0.0});
            break;
          }
        }
      }
    }
  }
  rng.shuffle(examples);
  return examples;
}

inline std::vector<Batch> to_batches(const std::vector<TrainExample>& examples,
                                     std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("to_batches: batch_size must be >= 1");
  std::vector<Batch> batches;
  batches.reserve((examples.size() + batch_size - 1) / batch_size);
  for (std::size_t i = 0; i < examples.size(); i += batch_size) {
    const std::size_t n = std::min(batch_size, examples.size() - i);
    Batch b;
    b.users.reserve(n);
    b.features.reserve(n);
    b.labels.reserve(n);
    for (std::size_t j = i; j < i + n; ++j) {
      b.users.push_back(examples[j].user);
      b.features.push_back(examples[j].feature);
      b.labels.push_back(examples[j].label);
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

inline std::vector<Batch> sample_batches(const FederatedSplit& split, int client,
                                         const InteractionDataset& ds, std::size_t batch_size,
                                         std::size_t negatives_per_positive, Rng& rng) {
  return to_batches(epoch_examples(split, client, ds, negatives_per_positive, rng), batch_size);
}

struct PairBlock {
  std::vector<std::uint32_t> users, features;
  std::vector<double> labels;
  std::size_t size() const { return users.size(); }
};

namespace detail {

inline PairBlock cartesian_block(const std::vector<std::uint32_t>& users,
                                 const std::vector<std::uint32_t>& feats,
                                 const InteractionDataset& ds) {
  PairBlock block;
  const std::size_t n = users.size() * feats.size();
  block.users.reserve(n);
  block.features.reserve(n);
  block.labels.reserve(n);
  for (std::uint32_t u : users) {
    for (std::uint32_t f : feats) {
      block.users.push_back(u);
      block.features.push_back(f);
      block.labels.push_back(ds.is_positive(u, f) ? 1.0 : 0.0);
    }
  }
  return block;
}

}  // namespace detail

// Every (user, feature) pair of the client's test block: its users crossed
// with the OTHER client's exclusive features. No sampling; common features
// never appear.
inline PairBlock test_block_pairs(const FederatedSplit& split, int client,
                                  const InteractionDataset& ds) {
  return detail::cartesian_block(split.client_users[client],
                                 split.exclusive_features[1 - client], ds);
}

// Full train block (users x own exclusive + common features), for train-set
// evaluation.
inline PairBlock train_block_pairs(const FederatedSplit& split, int client,
                                   const InteractionDataset& ds) {
  return detail::cartesian_block(split.client_users[client], split.train_features(client), ds);
}

}  // namespace feddmf
