// Small synthetic datasets and splits for tests.
#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "feddmf/dataset.hpp"
#include "feddmf/rng.hpp"

namespace fixtures {

// A ratings table whose binarized dataset has exactly `num_users` users and
// `num_features` features with dense ids in natural order, plus
// `extra_positives` random extra pairs.
inline feddmf::RatingsTable make_toy_ratings(std::size_t num_users, std::size_t num_features,
                                             std::size_t extra_positives, std::uint64_t seed) {
  feddmf::RatingsTable table;
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  auto push = [&](std::int64_t u, std::int64_t f, double r) {
    if (seen.emplace(u, f).second)
      table.records.push_back({u, f, r, static_cast<std::int64_t>(table.records.size())});
  };
  for (std::size_t u = 0; u < num_users; ++u)
    push(static_cast<std::int64_t>(u), static_cast<std::int64_t>(u % num_features), 4.0);
  for (std::size_t f = 0; f < num_features; ++f)
    push(static_cast<std::int64_t>(f % num_users), static_cast<std::int64_t>(f), 3.5);
  feddmf::Rng rng(seed);
  std::size_t added = 0, attempts = 0;
  while (added < extra_positives && attempts < extra_positives * 50 + 100) {
    ++attempts;
    const std::int64_t u = static_cast<std::int64_t>(rng.uniform_index(num_users));
    const std::int64_t f = static_cast<std::int64_t>(rng.uniform_index(num_features));
    if (seen.emplace(u, f).second) {
      table.records.push_back({u, f, 0.5 + 0.5 * static_cast<double>(added % 9), 0});
      ++added;
    }
  }
  return table;
}

inline feddmf::InteractionDataset make_toy_dataset(std::size_t num_users,
                                                   std::size_t num_features,
                                                   std::size_t extra_positives,
                                                   std::uint64_t seed) {
  return feddmf::binarize(make_toy_ratings(num_users, num_features, extra_positives, seed));
}

// Degenerate split where both clients hold exactly the same users and the
// same exclusive features: client data is identical and cross-client test
// blocks coincide. Used by twin-client identities.
inline feddmf::FederatedSplit make_twin_split(const feddmf::InteractionDataset& ds,
                                              std::size_t num_common) {
  feddmf::FederatedSplit split;
  for (std::size_t u = 0; u < ds.num_users(); ++u) {
    split.client_users[0].push_back(static_cast<std::uint32_t>(u));
    split.client_users[1].push_back(static_cast<std::uint32_t>(u));
  }
  for (std::size_t f = 0; f < ds.num_features(); ++f) {
    if (f < num_common) {
      split.common_features.push_back(static_cast<std::uint32_t>(f));
    } else {
      split.exclusive_features[0].push_back(static_cast<std::uint32_t>(f));
      split.exclusive_features[1].push_back(static_cast<std::uint32_t>(f));
    }
  }
  split.rebuild_lookup(ds.num_users(), ds.num_features());
  return split;
}

inline std::string write_temp_file(const std::string& name, const std::string& content) {
  const std::string path = std::string("feddmf_test_") + name;
  std::ofstream out(path);
  out << content;
  out.close();
  return path;
}

inline std::string write_ratings_csv(const std::string& name, const feddmf::RatingsTable& table) {
  std::string content = "userId,movieId,rating,timestamp\n";
  char buf[128];
  for (const auto& r : table.records) {
    std::snprintf(buf, sizeof(buf), "%lld,%lld,%g,%lld\n",
                  static_cast<long long>(r.user_id), static_cast<long long>(r.movie_id),
                  r.rating, static_cast<long long>(r.timestamp));
    content += buf;
  }
  return write_temp_file(name, content);
}

}  // namespace fixtures
