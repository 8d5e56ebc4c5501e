#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "json.hpp"
#include "random.hpp"
#include "utf8.hpp"

namespace tweetslot {

enum class EventType : std::uint8_t {
  kTestedPositive,
  kTestedNegative,
  kCanNotTest,
  kDeath,
  kCureAndPrevention,
};

inline constexpr std::array<EventType, 5> kAllEvents = {
    EventType::kTestedPositive, EventType::kTestedNegative,
    EventType::kCanNotTest, EventType::kDeath, EventType::kCureAndPrevention};

inline std::string_view to_string(EventType e) {
  switch (e) {
    case EventType::kTestedPositive: return "tested_positive";
    case EventType::kTestedNegative: return "tested_negative";
    case EventType::kCanNotTest: return "can_not_test";
    case EventType::kDeath: return "death";
    case EventType::kCureAndPrevention: return "cure_and_prevention";
  }
  return "";
}

// Section title used in rendered tables, e.g. "TESTED POSITIVE".
inline std::string display_name(EventType e) {
  std::string s(to_string(e));
  for (auto& c : s) c = c == '_' ? ' ' : static_cast<char>(std::toupper(c));
  return s;
}

inline std::optional<EventType> parse_event(std::string_view s) {
  for (auto e : kAllEvents) {
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

struct SubtaskId {
  EventType event{};
  std::string name;

  // "event/name", the key used for heads and reports.
  std::string key() const { return std::string(to_string(event)) + "/" + name; }

  friend auto operator<=>(const SubtaskId&, const SubtaskId&) = default;
  friend bool operator==(const SubtaskId&, const SubtaskId&) = default;
};

inline bool valid_subtask_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

// The closed set of slot subtasks per event. The built-in table has 33
// entries (10 + 9 + 5 + 6 + 3); a registry file can replace it for synthetic
// schemas.
class SubtaskRegistry {
 public:
  SubtaskRegistry() = default;

  explicit SubtaskRegistry(std::vector<SubtaskId> subtasks) {
    for (auto& s : subtasks) add(std::move(s));
  }

  static const SubtaskRegistry& builtin() {
    static const SubtaskRegistry reg = [] {
      using E = EventType;
      SubtaskRegistry r;
      for (const char* n : {"age", "close_contact", "employer", "gender_male",
                            "gender_female", "name", "recent_travel",
                            "relation", "when", "where"}) {
        r.add({E::kTestedPositive, n});
      }
      for (const char* n : {"age", "close_contact", "gender_male",
                            "gender_female", "how_long", "name", "relation",
                            "when", "where"}) {
        r.add({E::kTestedNegative, n});
      }
      for (const char* n : {"relation", "symptoms", "name", "when", "where"}) {
        r.add({E::kCanNotTest, n});
      }
      for (const char* n :
           {"age", "name", "relation", "symptoms", "when", "where"}) {
        r.add({E::kDeath, n});
      }
      for (const char* n : {"opinion", "what_cure", "who_cure"}) {
        r.add({E::kCureAndPrevention, n});
      }
      return r;
    }();
    return reg;
  }

  // Lines of "event<whitespace>name"; '#' starts a comment.
  static SubtaskRegistry load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open subtask registry: " + path);
    SubtaskRegistry r;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      std::istringstream ss(line);
      std::string ev, name;
      if (!(ss >> ev)) continue;
      if (!(ss >> name)) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": missing subtask name");
      }
      auto e = parse_event(ev);
      if (!e) throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown event '" + ev + "'");
      r.add({*e, name});
    }
    return r;
  }

  void add(SubtaskId id) {
    if (!valid_subtask_name(id.name)) {
      throw ConfigError("invalid subtask name '" + id.name + "'");
    }
    if (contains(id)) return;
    ordered_.push_back(std::move(id));
  }

  bool contains(const SubtaskId& id) const {
    return std::find(ordered_.begin(), ordered_.end(), id) != ordered_.end();
  }

  // Subtasks of one event, in registry (table) order.
  std::vector<SubtaskId> of(EventType e) const {
    std::vector<SubtaskId> out;
    for (const auto& s : ordered_) {
      if (s.event == e) out.push_back(s);
    }
    return out;
  }

  const std::vector<SubtaskId>& all() const { return ordered_; }
  std::size_t size() const { return ordered_.size(); }

  friend bool operator==(const SubtaskRegistry&, const SubtaskRegistry&) = default;

 private:
  std::vector<SubtaskId> ordered_;
};

// Half-open span [start, end) in Unicode scalar values.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

struct AnnotatedTweet {
  std::string id;
  std::string text;
  EventType event{};
  std::vector<Span> candidates;
  // Subtask name -> candidate indices answering it. Empty set: "Not Specified".
  std::map<std::string, std::set<std::size_t>> gold;

  friend bool operator==(const AnnotatedTweet&, const AnnotatedTweet&) = default;
};

using Corpus = std::vector<AnnotatedTweet>;

inline void validate(const AnnotatedTweet& t, const SubtaskRegistry& reg) {
  const auto fail = [&](const std::string& field, const std::string& what) {
    throw DataError("tweet '" + t.id + "': field '" + field + "': " + what);
  };
  const std::size_t len = utf8::length(t.text);
  for (std::size_t i = 0; i < t.candidates.size(); ++i) {
    const auto& c = t.candidates[i];
    if (!(c.start < c.end && c.end <= len)) {
      fail("candidates", "span " + std::to_string(i) + " [" + std::to_string(c.start) +
                             "," + std::to_string(c.end) + ") out of bounds for length " +
                             std::to_string(len));
    }
  }
  for (const auto& [name, idx] : t.gold) {
    if (!reg.contains({t.event, name})) {
      fail("gold", "subtask '" + name + "' does not belong to event " +
                       std::string(to_string(t.event)));
    }
    for (auto i : idx) {
      if (i >= t.candidates.size()) {
        fail("gold", "index " + std::to_string(i) + " for '" + name + "' but only " +
                         std::to_string(t.candidates.size()) + " candidates");
      }
    }
  }
}

inline nlohmann::ordered_json to_json(const AnnotatedTweet& t) {
  nlohmann::ordered_json j;
  j["id"] = t.id;
  j["text"] = t.text;
  j["event"] = to_string(t.event);
  auto cands = nlohmann::ordered_json::array();
  for (const auto& c : t.candidates) cands.push_back({c.start, c.end});
  j["candidates"] = cands;
  auto gold = nlohmann::ordered_json::object();
  for (const auto& [name, idx] : t.gold) {
    gold[name] = std::vector<std::size_t>(idx.begin(), idx.end());
  }
  j["gold"] = gold;
  return j;
}

inline AnnotatedTweet tweet_from_json(const nlohmann::json& j) {
  AnnotatedTweet t;
  t.id = j.at("id").get<std::string>();
  t.text = j.at("text").get<std::string>();
  const auto ev = j.at("event").get<std::string>();
  auto e = parse_event(ev);
  if (!e) throw DataError("tweet '" + t.id + "': field 'event': unknown event '" + ev + "'");
  t.event = *e;
  for (const auto& c : j.at("candidates")) {
    if (!c.is_array() || c.size() != 2) {
      throw DataError("tweet '" + t.id + "': field 'candidates': expected [start,end]");
    }
    t.candidates.push_back({c[0].get<std::size_t>(), c[1].get<std::size_t>()});
  }
  if (j.contains("gold")) {
    for (const auto& [name, idx] : j.at("gold").items()) {
      auto& s = t.gold[name];
      for (const auto& i : idx) s.insert(i.get<std::size_t>());
    }
  }
  return t;
}

inline Corpus parse_corpus(std::istream& in, const std::string& source,
                           const SubtaskRegistry& reg = SubtaskRegistry::builtin()) {
  Corpus out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    AnnotatedTweet t;
    try {
      t = tweet_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(source + ":" + std::to_string(lineno) + ": malformed record: " + e.what());
    } catch (const DataError& e) {
      throw DataError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
    try {
      validate(t, reg);
    } catch (const DataError& e) {
      throw DataError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(std::move(t));
  }
  return out;
}

inline Corpus load_corpus(const std::string& path,
                          const SubtaskRegistry& reg = SubtaskRegistry::builtin()) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus: " + path);
  return parse_corpus(in, path, reg);
}

inline void write_corpus(std::ostream& out, const Corpus& tweets) {
  for (const auto& t : tweets) out << to_json(t).dump() << '\n';
}

inline void save_corpus(const std::string& path, const Corpus& tweets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus: " + path);
  write_corpus(out, tweets);
}

struct SplitConfig {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct Split {
  Corpus train;
  Corpus validation;
};

// Tweet-level split. The index permutation is seeded_shuffle over 0..N-1 with
// Rng(seed); tweets whose permuted position is < round(fraction * N) go to
// train. Both sides keep input order.
inline Split split(const Corpus& tweets, const SplitConfig& cfg) {
  if (tweets.empty()) throw DataError("cannot split an empty corpus");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0,1)");
  }
  const std::size_t n = tweets.size();
  const auto n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * n));
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Rng rng(cfg.seed);
  seeded_shuffle(std::span<std::size_t>(perm), rng);
  std::vector<bool> in_train(n, false);
  for (std::size_t p = 0; p < n_train; ++p) in_train[perm[p]] = true;
  Split s;
  for (std::size_t i = 0; i < n; ++i) {
    (in_train[i] ? s.train : s.validation).push_back(tweets[i]);
  }
  return s;
}

// One (tweet, subtask, candidate) triple with its binary gold label.
struct Instance {
  std::size_t tweet_index = 0;
  std::string tweet_id;
  SubtaskId subtask;
  std::size_t candidate_index = 0;
  int label = 0;
};

// Rows ordered by tweet, then subtask name, then candidate index.
inline std::vector<Instance> explode_instances(
    const Corpus& tweets, const SubtaskRegistry& reg = SubtaskRegistry::builtin()) {
  std::vector<Instance> out;
  for (std::size_t ti = 0; ti < tweets.size(); ++ti) {
    const auto& t = tweets[ti];
    auto subtasks = reg.of(t.event);
    std::sort(subtasks.begin(), subtasks.end(),
              [](const SubtaskId& a, const SubtaskId& b) { return a.name < b.name; });
    for (const auto& st : subtasks) {
      const auto g = t.gold.find(st.name);
      for (std::size_t ci = 0; ci < t.candidates.size(); ++ci) {
        const int label = g != t.gold.end() && g->second.count(ci) ? 1 : 0;
        out.push_back({ti, t.id, st, ci, label});
      }
    }
  }
  return out;
}

}  // namespace tweetslot
