#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "random.hpp"
#include "utf8.hpp"

namespace tweetslot {

// Planted-cue corpus generator for tests, demos and the acceptance suite.
// A candidate is positive for subtask s exactly when the word right before it
// is the cue word of s; the chunk itself is drawn from the entity pool that
// matches s. Everything else is filler.
struct SynthConfig {
  std::size_t tweets = 500;
  std::uint64_t seed = 0;
  std::size_t min_candidates = 2;
  std::size_t max_candidates = 4;
  double positive_rate = 0.35;
  // Candidates led by a person-slot cue but holding a location phrase,
  // labelled negative everywhere.
  double confuser_rate = 0.0;
  // 0 = unlimited; otherwise no (event, subtask) gets more positives.
  std::size_t max_positives_per_subtask = 0;
  // Cue words shared by subtask name across events, or distinct per event.
  bool shared_cues = true;
  // Mentions, URLs, hashtags and emoji sprinkled into the filler.
  bool noise = true;
  std::string id_prefix = "syn";

  void validate() const {
    if (tweets == 0) throw ConfigError("synth.tweets must be >= 1");
    if (min_candidates == 0 || max_candidates < min_candidates) {
      throw ConfigError("synth candidate range must satisfy 1 <= min <= max");
    }
    if (!(positive_rate >= 0 && confuser_rate >= 0 && positive_rate + confuser_rate <= 1)) {
      throw ConfigError("synth rates must be >= 0 and sum to at most 1");
    }
  }
};

enum class ChunkKind : std::uint8_t {
  kPerson, kLocation, kOrganization, kDate, kDuration, kAge,
  kMale, kFemale, kSymptom, kCure, kOpinion,
};

namespace detail {

inline const std::vector<std::string>& chunk_pool(ChunkKind k) {
  static const std::map<ChunkKind, std::vector<std::string>> pools = {
      {ChunkKind::kPerson,
       {"my mom", "my dad", "my wife's grandmother", "his brother", "her sister", "our neighbor",
        "my best friend", "Tom Hanks", "Rita Wilson", "Idris Elba", "my cousin", "a nurse",
        "my boss", "her husband", "my uncle", "the doctor", "Boris Johnson", "Prince Charles",
        "Kevin Durant", "my roommate"}},
      {ChunkKind::kLocation,
       {"a nursing home", "London", "Italy", "the hospital", "New York City", "a cruise ship",
        "Wuhan", "Spain", "the airport", "Seattle", "Florida", "a care home", "Chicago", "Paris",
        "Germany", "Iran", "the ICU", "Boston", "a hotel", "Texas"}},
      {ChunkKind::kOrganization,
       {"the NBA", "Amazon", "Walmart", "the CDC", "Tesla", "Google", "Costco", "the NHS",
        "Microsoft", "the Navy", "the FDA", "Apple"}},
      {ChunkKind::kDate,
       {"yesterday", "last Friday", "on March 3", "this morning", "two weeks ago", "today",
        "last night", "on Monday", "3/14", "this week"}},
      {ChunkKind::kDuration,
       {"for two weeks", "14 days", "three days", "a few hours", "six weeks", "ten days",
        "several days"}},
      {ChunkKind::kAge,
       {"34 years old", "a 71-year-old", "in her 60s", "aged 45", "82 yo", "in his fifties",
        "a 90 year old"}},
      {ChunkKind::kMale, {"he", "him", "this man", "my father"}},
      {ChunkKind::kFemale, {"she", "her", "this woman", "my mother"}},
      {ChunkKind::kSymptom,
       {"a fever", "a dry cough", "shortness of breath", "no sense of smell", "body aches",
        "a sore throat"}},
      {ChunkKind::kCure,
       {"hydroxychloroquine", "the vaccine", "vitamin C", "remdesivir", "plasma therapy",
        "bleach"}},
      {ChunkKind::kOpinion, {"a total hoax", "a miracle", "so scary", "overblown", "real"}},
  };
  return pools.at(k);
}

struct SlotShape {
  ChunkKind kind;
  const char* cue;
};

inline const std::map<std::string, SlotShape>& slot_shapes() {
  static const std::map<std::string, SlotShape> shapes = {
      {"name", {ChunkKind::kPerson, "named"}},
      {"relation", {ChunkKind::kPerson, "relative"}},
      {"close_contact", {ChunkKind::kPerson, "alongside"}},
      {"who_cure", {ChunkKind::kPerson, "developed"}},
      {"employer", {ChunkKind::kOrganization, "employed"}},
      {"where", {ChunkKind::kLocation, "inside"}},
      {"recent_travel", {ChunkKind::kLocation, "returned"}},
      {"when", {ChunkKind::kDate, "since"}},
      {"how_long", {ChunkKind::kDuration, "lasting"}},
      {"age", {ChunkKind::kAge, "aging"}},
      {"gender_male", {ChunkKind::kMale, "male"}},
      {"gender_female", {ChunkKind::kFemale, "female"}},
      {"symptoms", {ChunkKind::kSymptom, "suffering"}},
      {"what_cure", {ChunkKind::kCure, "treated"}},
      {"opinion", {ChunkKind::kOpinion, "honestly"}},
  };
  return shapes;
}

inline const std::vector<std::string>& lead_words() {
  static const std::vector<std::string> w = {"and", "with", "about", "from", "saw", "heard",
                                             "then", "near", "by", "for", "like", "also"};
  return w;
}

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> w = {
      "just",  "learned", "that",    "tested", "positive", "news",   "is",     "so",
      "sad",   "please",  "stay",    "safe",   "everyone", "wow",    "the",    "virus",
      "cases", "are",     "rising",  "again",  "hope",     "we",     "recover", "soon",
      "update", "pandemic", "lockdown", "masks", "work",    "thoughts", "prayers", "crazy"};
  return w;
}

inline const std::vector<std::string>& noise_words() {
  static const std::vector<std::string> w = {"@newsdesk", "#covid19", "#COVID", "https://t.co/x1",
                                             "\xF0\x9F\x98\xB7", "\xE2\x80\x9Creal\xE2\x80\x9D",
                                             "#stayhome", "www.example.org"};
  return w;
}

inline const std::string& pick(const std::vector<std::string>& v, Rng& rng) {
  return v[static_cast<std::size_t>(rng() % v.size())];
}

}  // namespace detail

// Cue word planted before positives of (event, name).
inline std::string cue_word(EventType e, const std::string& name, bool shared) {
  const auto& shapes = detail::slot_shapes();
  const auto it = shapes.find(name);
  if (it == shapes.end()) throw ConfigError("synthetic generator has no shape for subtask '" + name + "'");
  std::string cue = it->second.cue;
  if (!shared) cue += "_" + std::string(to_string(e));
  return cue;
}

inline Corpus generate_synthetic(const SynthConfig& cfg,
                                 const SubtaskRegistry& reg = SubtaskRegistry::builtin()) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::map<std::string, std::size_t> positives;  // SubtaskId::key() -> count
  Corpus out;
  out.reserve(cfg.tweets);

  for (std::size_t i = 0; i < cfg.tweets; ++i) {
    AnnotatedTweet t;
    char id[32];
    std::snprintf(id, sizeof id, "-%05zu", i);
    t.id = cfg.id_prefix + id;
    t.event = kAllEvents[i % kAllEvents.size()];
    const auto subtasks = reg.of(t.event);
    std::vector<SubtaskId> person_slots;
    for (const auto& s : subtasks) {
      if (detail::slot_shapes().at(s.name).kind == ChunkKind::kPerson) person_slots.push_back(s);
    }

    std::string text;
    std::size_t cp = 0;  // code points emitted so far
    const auto emit = [&](const std::string& word) {
      if (!text.empty()) {
        text.push_back(' ');
        ++cp;
      }
      text += word;
      cp += utf8::length(word);
    };
    const auto filler = [&](std::size_t lo, std::size_t hi) {
      const std::size_t n = lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
      for (std::size_t k = 0; k < n; ++k) {
        if (cfg.noise && rng() % 6 == 0) {
          emit(detail::pick(detail::noise_words(), rng));
        } else {
          emit(detail::pick(detail::filler_words(), rng));
        }
      }
    };

    filler(1, 4);
    const std::size_t n_cand =
        cfg.min_candidates + static_cast<std::size_t>(rng() % (cfg.max_candidates - cfg.min_candidates + 1));
    for (std::size_t c = 0; c < n_cand; ++c) {
      const double u = uniform01(rng);
      std::vector<SubtaskId> open;
      for (const auto& s : subtasks) {
        if (cfg.max_positives_per_subtask == 0 || positives[s.key()] < cfg.max_positives_per_subtask) {
          open.push_back(s);
        }
      }
      std::string lead;
      std::string chunk;
      if (u < cfg.positive_rate && !open.empty()) {
        const auto& s = open[static_cast<std::size_t>(rng() % open.size())];
        lead = cue_word(t.event, s.name, cfg.shared_cues);
        chunk = detail::pick(detail::chunk_pool(detail::slot_shapes().at(s.name).kind), rng);
        t.gold[s.name].insert(c);
        ++positives[s.key()];
      } else if (u < cfg.positive_rate + cfg.confuser_rate && !person_slots.empty()) {
        const auto& s = person_slots[static_cast<std::size_t>(rng() % person_slots.size())];
        lead = cue_word(t.event, s.name, cfg.shared_cues);
        chunk = detail::pick(detail::chunk_pool(ChunkKind::kLocation), rng);
      } else {
        lead = detail::pick(detail::lead_words(), rng);
        const auto kind = static_cast<ChunkKind>(rng() % (static_cast<int>(ChunkKind::kOpinion) + 1));
        chunk = detail::pick(detail::chunk_pool(kind), rng);
      }
      emit(lead);
      emit(chunk);
      const std::size_t len = utf8::length(chunk);
      t.candidates.push_back({cp - len, cp});
      filler(1, 3);
    }
    t.text = std::move(text);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace tweetslot
