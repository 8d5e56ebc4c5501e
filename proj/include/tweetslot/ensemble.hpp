#pragma once

#include <algorithm>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "features.hpp"
#include "model.hpp"

namespace tweetslot {

struct PoolRun {
  FeatureStrategy strategy = FeatureStrategy::kLast;
  std::uint64_t seed = 0;
};

struct EnsembleConfig {
  std::vector<PoolRun> pool;
  std::size_t k = 5;

  // Every strategy crossed with every seed.
  static EnsembleConfig grid(std::span<const std::uint64_t> seeds, std::size_t k = 5) {
    EnsembleConfig c;
    c.k = k;
    for (auto s : kAllStrategies) {
      for (auto seed : seeds) c.pool.push_back({s, seed});
    }
    return c;
  }

  static EnsembleConfig defaults() {
    const std::uint64_t seeds[] = {1, 2, 3};
    return grid(seeds);
  }

  void validate() const {
    if (k == 0 || k % 2 == 0) throw ConfigError("ensemble.k must be odd");
    if (pool.size() < k) {
      throw ConfigError("ensemble pool has " + std::to_string(pool.size()) +
                        " runs, fewer than k = " + std::to_string(k));
    }
  }
};

// Indices of the k best scores, best first; ties keep pool order.
inline std::vector<std::size_t> select_top(std::span<const double> scores, std::size_t k) {
  if (scores.size() < k) {
    throw ConfigError("cannot select " + std::to_string(k) + " of " +
                      std::to_string(scores.size()) + " models");
  }
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  idx.resize(k);
  return idx;
}

// 1 iff strictly more than half of an odd number of votes are 1.
inline int majority_vote(std::span<const int> decisions) {
  if (decisions.empty() || decisions.size() % 2 == 0) {
    throw ConfigError("majority vote needs an odd number of members");
  }
  const auto ones = static_cast<std::size_t>(std::count(decisions.begin(), decisions.end(), 1));
  return 2 * ones > decisions.size() ? 1 : 0;
}

// Decision-level majority vote; probability is the member mean (reporting only).
inline std::vector<PredictionRecord> ensemble_predict(std::span<const ModelParams> members,
                                                      std::span<const MaskedInstance> instances,
                                                      double threshold = 0.5) {
  if (members.empty()) throw ConfigError("ensemble has no members");
  const auto keys = members[0].head_keys();
  for (const auto& m : members) {
    if (m.head_keys() != keys) throw DataError("ensemble members disagree on the subtask registry");
  }
  std::vector<std::vector<PredictionRecord>> per_member;
  for (const auto& m : members) per_member.push_back(predict(m, instances, threshold));

  std::vector<PredictionRecord> out;
  out.reserve(instances.size());
  std::vector<int> votes(members.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    double p = 0.0;
    for (std::size_t j = 0; j < members.size(); ++j) {
      votes[j] = per_member[j][i].decision;
      p += per_member[j][i].probability;
    }
    PredictionRecord r = per_member[0][i];
    r.probability = p / static_cast<double>(members.size());
    r.decision = majority_vote(votes);
    out.push_back(std::move(r));
  }
  return out;
}

struct ManifestEntry {
  std::string model_path;
  double val_micro_f1 = 0.0;
};

// "path<TAB>val_micro_f1" per line; '#' comments. Relative paths resolve
// against the manifest's directory.
inline std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ensemble manifest: " + path);
  const auto slash = path.find_last_of('/');
  const std::string base = slash == std::string::npos ? "" : path.substr(0, slash + 1);
  std::vector<ManifestEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected path<TAB>score");
    }
    ManifestEntry e;
    e.model_path = line.substr(0, tab);
    if (!e.model_path.empty() && e.model_path[0] != '/') e.model_path = base + e.model_path;
    try {
      e.val_micro_f1 = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(lineno) + ": field 'score' is not a number");
    }
    out.push_back(std::move(e));
  }
  return out;
}

inline void write_manifest(std::ostream& out, std::span<const std::pair<std::string, double>> rows) {
  out << "# model_path\tval_micro_f1\n";
  char buf[64];
  for (const auto& [p, s] : rows) {
    std::snprintf(buf, sizeof buf, "%.9g", s);
    out << p << '\t' << buf << '\n';
  }
}

}  // namespace tweetslot
