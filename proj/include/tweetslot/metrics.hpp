#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "hash.hpp"
#include "json.hpp"
#include "model.hpp"
#include "preprocess.hpp"

namespace tweetslot {

inline constexpr std::string_view kNotSpecified = "Not Specified";

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  // F1 = 2TP / (2TP + FP + FN); 0 when the denominator is 0.
  double f1() const {
    const std::size_t d = 2 * tp + fp + fn;
    return d == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(d);
  }
  bool undefined() const { return 2 * tp + fp + fn == 0; }

  friend bool operator==(const Counts&, const Counts&) = default;
};

struct SubtaskScore {
  SubtaskId subtask;
  Counts counts;
};

struct MetricsReport {
  std::string model_id;
  std::string corpus_id;
  bool filtered = false;
  std::vector<SubtaskScore> rows;  // registry order
  Counts micro;

  double micro_f1() const { return micro.f1(); }
};

// Identifies a gold corpus by the ordered list of its tweet ids.
inline std::string corpus_id(const Corpus& gold) {
  std::uint64_t h = kFnvOffset;
  for (const auto& t : gold) {
    h = fnv1a64(t.id, h);
    h = fnv1a64("\n", h);
  }
  return hex64(h);
}

// A positive decision whose slot text reads "not specified" (any case) is a
// nullified prediction and counts as negative.
inline bool effective_decision(const PredictionRecord& r) {
  if (r.decision != 1) return false;
  return ascii_lower(r.chunk_text) != ascii_lower(kNotSpecified);
}

inline Counts& tally(Counts& c, bool predicted, bool gold) {
  if (predicted && gold) ++c.tp;
  if (predicted && !gold) ++c.fp;
  if (!predicted && gold) ++c.fn;
  return c;
}

// Chunk-level scoring of every prediction against the gold corpus. Each
// prediction must name an existing (tweet, subtask, candidate) triple.
inline MetricsReport score(std::span<const PredictionRecord> predictions, const Corpus& gold,
                           const SubtaskRegistry& reg = SubtaskRegistry::builtin(),
                           std::string model_id = "", bool filtered = false) {
  std::unordered_map<std::string, const AnnotatedTweet*> by_id;
  for (const auto& t : gold) by_id.emplace(t.id, &t);

  std::map<std::string, Counts> per_key;
  for (const auto& r : predictions) {
    const auto it = by_id.find(r.tweet_id);
    if (it == by_id.end()) throw DataError("prediction for unknown tweet '" + r.tweet_id + "'");
    const AnnotatedTweet& t = *it->second;
    if (r.subtask.event != t.event || !reg.contains(r.subtask)) {
      throw DataError("prediction for tweet '" + t.id + "' names unknown subtask '" +
                      r.subtask.key() + "'");
    }
    if (r.candidate_index >= t.candidates.size()) {
      throw DataError("prediction for tweet '" + t.id + "' names unknown candidate " +
                      std::to_string(r.candidate_index));
    }
    const auto g = t.gold.find(r.subtask.name);
    const bool positive = g != t.gold.end() && g->second.count(r.candidate_index) > 0;
    tally(per_key[r.subtask.key()], effective_decision(r), positive);
  }

  MetricsReport rep;
  rep.model_id = std::move(model_id);
  rep.corpus_id = corpus_id(gold);
  rep.filtered = filtered;
  for (const auto& s : reg.all()) {
    const auto it = per_key.find(s.key());
    if (it == per_key.end()) continue;
    rep.rows.push_back({s, it->second});
    rep.micro += it->second;
  }
  return rep;
}

// Micro-F1 of records against the labels carried by their instances (same
// order). Used for validation during training.
inline double micro_f1_against_labels(std::span<const PredictionRecord> records,
                                      std::span<const MaskedInstance> instances) {
  Counts c;
  for (std::size_t i = 0; i < records.size(); ++i) {
    tally(c, effective_decision(records[i]), instances[i].label == 1);
  }
  return c.f1();
}

// ---- JSON -------------------------------------------------------------------

inline nlohmann::ordered_json counts_json(const Counts& c) {
  nlohmann::ordered_json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  j["f1"] = c.f1();
  j["undefined"] = c.undefined();
  return j;
}

inline nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["model_id"] = r.model_id;
  j["corpus_id"] = r.corpus_id;
  j["filtered"] = r.filtered;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& s : r.rows) {
    auto row = counts_json(s.counts);
    row["event"] = to_string(s.subtask.event);
    row["subtask"] = s.subtask.name;
    rows.push_back(row);
  }
  j["subtasks"] = rows;
  j["micro"] = counts_json(r.micro);
  return j;
}

inline MetricsReport report_from_json(const nlohmann::json& j) {
  const auto counts = [](const nlohmann::json& c) {
    return Counts{c.at("tp").get<std::size_t>(), c.at("fp").get<std::size_t>(),
                  c.at("fn").get<std::size_t>()};
  };
  MetricsReport r;
  r.model_id = j.at("model_id").get<std::string>();
  r.corpus_id = j.at("corpus_id").get<std::string>();
  r.filtered = j.at("filtered").get<bool>();
  for (const auto& row : j.at("subtasks")) {
    const auto ev = parse_event(row.at("event").get<std::string>());
    if (!ev) throw DataError("report: unknown event");
    r.rows.push_back({{*ev, row.at("subtask").get<std::string>()}, counts(row)});
  }
  r.micro = counts(j.at("micro"));
  return r;
}

// ---- rendering --------------------------------------------------------------

namespace detail {

inline std::string fmt_f1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string fmt_delta(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.3f", v);
  return buf;
}

inline std::string pad_right(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

inline std::string pad_left(std::string s, std::size_t w) {
  if (s.size() < w) s.insert(0, w - s.size(), ' ');
  return s;
}

inline constexpr std::size_t kNameWidth = 22;
inline constexpr std::size_t kNumWidth = 8;

}  // namespace detail

// Events as section headers, one row per scored subtask, micro row last.
inline std::string render_table(const MetricsReport& r) {
  using namespace detail;
  std::ostringstream out;
  out << pad_right("Sub-task", kNameWidth) << pad_left("TP", kNumWidth)
      << pad_left("FP", kNumWidth) << pad_left("FN", kNumWidth) << pad_left("F1", kNumWidth)
      << '\n';
  const auto row = [&](const std::string& name, const Counts& c) {
    out << pad_right(name, kNameWidth) << pad_left(std::to_string(c.tp), kNumWidth)
        << pad_left(std::to_string(c.fp), kNumWidth) << pad_left(std::to_string(c.fn), kNumWidth)
        << pad_left(fmt_f1(c.f1()) + (c.undefined() ? "*" : ""), kNumWidth) << '\n';
  };
  for (auto e : kAllEvents) {
    bool header = false;
    for (const auto& s : r.rows) {
      if (s.subtask.event != e) continue;
      if (!header) {
        out << "== " << display_name(e) << " ==\n";
        header = true;
      }
      row("  " + s.subtask.name, s.counts);
    }
  }
  row("micro avg. F1", r.micro);
  return out.str();
}

struct ComparisonRow {
  SubtaskId subtask;
  double f1_a = 0.0;
  double f1_b = 0.0;
  double delta() const { return f1_b - f1_a; }
};

struct Comparison {
  std::string label_a;
  std::string label_b;
  std::vector<ComparisonRow> rows;
  double micro_a = 0.0;
  double micro_b = 0.0;
  double micro_delta() const { return micro_b - micro_a; }
};

// Side-by-side F1 of two reports over the same corpus; delta = b - a.
inline Comparison compare(const MetricsReport& a, const MetricsReport& b,
                          std::string label_a = "A", std::string label_b = "B") {
  if (a.corpus_id != b.corpus_id) {
    throw DataError("cannot compare reports over different corpora (" + a.corpus_id + " vs " +
                    b.corpus_id + ")");
  }
  Comparison c{std::move(label_a), std::move(label_b), {}, a.micro_f1(), b.micro_f1()};
  std::vector<SubtaskId> keys;
  for (const auto& r : a.rows) keys.push_back(r.subtask);
  for (const auto& r : b.rows) {
    if (std::find(keys.begin(), keys.end(), r.subtask) == keys.end()) keys.push_back(r.subtask);
  }
  const auto f1_of = [](const MetricsReport& rep, const SubtaskId& id) {
    for (const auto& r : rep.rows) {
      if (r.subtask == id) return r.counts.f1();
    }
    return 0.0;
  };
  for (auto e : kAllEvents) {
    for (const auto& k : keys) {
      if (k.event == e) c.rows.push_back({k, f1_of(a, k), f1_of(b, k)});
    }
  }
  return c;
}

inline std::string render_comparison(const Comparison& c) {
  using namespace detail;
  const std::size_t w = std::max<std::size_t>({kNumWidth, c.label_a.size() + 2,
                                               c.label_b.size() + 2});
  std::ostringstream out;
  out << pad_right("Sub-task", kNameWidth) << pad_left(c.label_a, w) << pad_left(c.label_b, w)
      << pad_left("delta", kNumWidth) << '\n';
  const auto row = [&](const std::string& name, double a, double b) {
    out << pad_right(name, kNameWidth) << pad_left(fmt_f1(a), w) << pad_left(fmt_f1(b), w)
        << pad_left(fmt_delta(b - a), kNumWidth) << '\n';
  };
  for (auto e : kAllEvents) {
    bool header = false;
    for (const auto& r : c.rows) {
      if (r.subtask.event != e) continue;
      if (!header) {
        out << "== " << display_name(e) << " ==\n";
        header = true;
      }
      row("  " + r.subtask.name, r.f1_a, r.f1_b);
    }
  }
  row("micro avg. F1", c.micro_a, c.micro_b);
  return out.str();
}

}  // namespace tweetslot
