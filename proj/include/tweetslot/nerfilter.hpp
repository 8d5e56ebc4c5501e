#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "log.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "preprocess.hpp"

namespace tweetslot {

// Declaration order is the tie-break order.
enum class EntityType : std::uint8_t {
  kPerson,
  kLocation,
  kOrganization,
  kDate,
  kDuration,
  kAge,
  kOther,
};

inline constexpr std::array<EntityType, 6> kTaggedTypes = {
    EntityType::kPerson, EntityType::kLocation, EntityType::kOrganization,
    EntityType::kDate,   EntityType::kDuration, EntityType::kAge};

inline std::string_view to_string(EntityType t) {
  switch (t) {
    case EntityType::kPerson: return "PERSON";
    case EntityType::kLocation: return "LOCATION";
    case EntityType::kOrganization: return "ORGANIZATION";
    case EntityType::kDate: return "DATE";
    case EntityType::kDuration: return "DURATION";
    case EntityType::kAge: return "AGE";
    case EntityType::kOther: return "OTHER";
  }
  return "";
}

inline std::optional<EntityType> parse_entity_type(std::string_view s) {
  for (auto t : kTaggedTypes) {
    if (to_string(t) == s) return t;
  }
  if (s == "OTHER") return EntityType::kOther;
  return std::nullopt;
}

// Lowercase; anything but ASCII alphanumerics, apostrophes and non-ASCII
// becomes a space; whitespace collapsed and trimmed.
inline std::string normalize_phrase(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    const auto uc = static_cast<unsigned char>(c);
    const bool keep = uc >= 0x80 || std::isalnum(uc) || c == '\'';
    if (!keep) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

struct Gazetteer {
  struct Rule {
    EntityType type = EntityType::kOther;
    std::string pattern;
    std::regex re;
  };

  std::array<std::set<std::string>, kTaggedTypes.size()> phrases;
  std::vector<Rule> rules;

  void add_phrase(EntityType t, std::string_view phrase) {
    auto p = normalize_phrase(phrase);
    if (!p.empty()) phrases[static_cast<std::size_t>(t)].insert(std::move(p));
  }

  void add_rule(EntityType t, const std::string& pattern) {
    rules.push_back({t, pattern,
                     std::regex(pattern, std::regex::ECMAScript | std::regex::icase)});
  }

  std::size_t phrase_count() const {
    std::size_t n = 0;
    for (const auto& s : phrases) n += s.size();
    return n;
  }
};

namespace detail {

inline std::string phrase_file(EntityType t) {
  return ascii_lower(to_string(t)) + ".txt";
}

inline void read_phrases(const std::filesystem::path& file, EntityType t, Gazetteer& g) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open gazetteer file: " + file.string());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    g.add_phrase(t, line);
  }
}

// Pronouns, kinship and other person nouns used when nothing else matches.
inline const std::set<std::string>& person_words() {
  static const std::set<std::string> words = {
      "i", "me", "myself", "he", "him", "himself", "she", "her", "herself", "they", "them",
      "themselves", "we", "us", "you", "someone",
      "somebody", "anyone", "everyone", "people", "person", "persons", "man", "men", "woman",
      "women", "guy", "guys", "girl", "boy", "lady", "gentleman", "mother", "father", "mom",
      "mum", "dad", "parent", "parents", "wife", "husband", "spouse", "partner", "son",
      "daughter", "brother", "sister", "sibling", "grandmother", "grandfather", "grandma",
      "grandpa", "granny", "grandson", "granddaughter", "aunt", "uncle", "cousin", "niece",
      "nephew", "friend", "friends", "boyfriend", "girlfriend", "fiance", "fiancee", "family",
      "kid", "kids", "child", "children", "baby", "neighbor", "neighbour", "roommate",
      "coworker", "colleague", "boss", "doctor", "nurse", "patient", "teacher", "student",
      "officer", "player", "actor", "singer", "president", "governor", "mayor", "senator",
      "minister", "mr", "mrs", "ms", "dr"};
  return words;
}

}  // namespace detail

// Directory layout: person.txt, location.txt, organization.txt (required),
// date.txt, duration.txt, age.txt (optional), rules.txt ("TYPE<TAB>regex").
inline Gazetteer load_gazetteer(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw ConfigError("gazetteer directory not found: " + dir);
  Gazetteer g;
  for (auto t : kTaggedTypes) {
    const auto file = root / detail::phrase_file(t);
    const bool required = t == EntityType::kPerson || t == EntityType::kLocation ||
                          t == EntityType::kOrganization;
    if (!fs::exists(file)) {
      if (required) throw ConfigError("missing gazetteer file: " + file.string());
      continue;
    }
    detail::read_phrases(file, t, g);
  }
  const auto rules_file = root / "rules.txt";
  std::ifstream in(rules_file);
  if (!in) throw ConfigError("missing gazetteer file: " + rules_file.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto where = rules_file.string() + ":" + std::to_string(lineno);
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ConfigError(where + ": expected TYPE<TAB>regex");
    const auto type = parse_entity_type(line.substr(0, tab));
    if (!type || *type == EntityType::kOther) {
      throw ConfigError(where + ": unknown entity type '" + line.substr(0, tab) + "'");
    }
    try {
      g.add_rule(*type, line.substr(tab + 1));
    } catch (const std::regex_error& e) {
      throw ConfigError(where + ": invalid regex: " + e.what());
    }
  }
  std::ostringstream msg;
  msg << "gazetteer " << dir << ":";
  for (auto t : kTaggedTypes) {
    msg << ' ' << to_string(t) << '=' << g.phrases[static_cast<std::size_t>(t)].size();
  }
  msg << " rules=" << g.rules.size();
  log::info(msg.str());
  return g;
}

// Canonical form: sorted, deduplicated phrase files and rules in load order.
inline void save_gazetteer(const Gazetteer& g, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (auto t : kTaggedTypes) {
    const auto& set = g.phrases[static_cast<std::size_t>(t)];
    const bool required = t == EntityType::kPerson || t == EntityType::kLocation ||
                          t == EntityType::kOrganization;
    if (set.empty() && !required) continue;
    std::ofstream out(fs::path(dir) / detail::phrase_file(t), std::ios::binary);
    for (const auto& p : set) out << p << '\n';
  }
  std::ofstream out(fs::path(dir) / "rules.txt", std::ios::binary);
  for (const auto& r : g.rules) out << to_string(r.type) << '\t' << r.pattern << '\n';
}

// Priority chain: the longest gazetteer phrase contained in the chunk (on
// word boundaries), else the longest regex match, else person pronouns and
// kinship words, else OTHER. Ties go to the earlier EntityType.
inline EntityType tag(std::string_view chunk_text, const Gazetteer& g) {
  const std::string norm = normalize_phrase(chunk_text);
  const std::string padded = " " + norm + " ";

  std::size_t best_len = 0;
  EntityType best = EntityType::kOther;
  for (auto t : kTaggedTypes) {
    for (const auto& p : g.phrases[static_cast<std::size_t>(t)]) {
      if (p.size() > best_len && padded.find(" " + p + " ") != std::string::npos) {
        best_len = p.size();
        best = t;
      }
    }
  }
  if (best_len > 0) return best;

  const std::string lowered = ascii_lower(chunk_text);
  for (auto t : kTaggedTypes) {
    for (const auto& r : g.rules) {
      if (r.type != t) continue;
      std::smatch m;
      if (std::regex_search(lowered, m, r.re) &&
          static_cast<std::size_t>(m.length(0)) > best_len) {
        best_len = static_cast<std::size_t>(m.length(0));
        best = t;
      }
    }
  }
  if (best_len > 0) return best;

  std::istringstream words(norm);
  std::string w;
  while (words >> w) {
    if (w.size() > 2 && w.ends_with("'s")) w.resize(w.size() - 2);
    if (!w.empty() && w.back() == '\'') w.pop_back();
    if (detail::person_words().count(w)) return EntityType::kPerson;
  }
  return EntityType::kOther;
}

// Allowed entity types per subtask name. Names not in the map are exempt.
struct TypeMap {
  std::map<std::string, std::set<EntityType>> allowed;

  static TypeMap defaults() {
    using T = EntityType;
    TypeMap m;
    for (const char* n : {"name", "relation", "close_contact", "who_cure"}) {
      m.allowed[n] = {T::kPerson};
    }
    m.allowed["where"] = {T::kLocation};
    m.allowed["recent_travel"] = {T::kLocation};
    m.allowed["employer"] = {T::kOrganization, T::kPerson};
    m.allowed["when"] = {T::kDate};
    m.allowed["how_long"] = {T::kDuration};
    m.allowed["age"] = {T::kAge};
    return m;
  }

  // Lines "subtask = TYPE[,TYPE...]" or "subtask = exempt"; '#' comments.
  static TypeMap load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open type map: " + path);
    TypeMap m;
    std::string line;
    int lineno = 0;
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    while (std::getline(in, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
      line = trim(line);
      if (line.empty()) continue;
      const auto where = path + ":" + std::to_string(lineno);
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError(where + ": expected 'subtask = TYPES'");
      const auto name = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (!valid_subtask_name(name)) throw ConfigError(where + ": bad subtask name '" + name + "'");
      if (value == "exempt") {
        m.allowed.erase(name);
        continue;
      }
      std::set<EntityType> types;
      std::istringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        const auto t = parse_entity_type(item);
        if (!t) throw ConfigError(where + ": unknown entity type '" + item + "'");
        types.insert(*t);
      }
      if (types.empty()) throw ConfigError(where + ": empty type list");
      m.allowed[name] = std::move(types);
    }
    return m;
  }
};

// Nullifies positive predictions whose chunk's entity type is not allowed for
// the subtask. Negative decisions and exempt subtasks pass through untouched.
inline std::vector<PredictionRecord> filter(std::span<const PredictionRecord> predictions,
                                            const TypeMap& type_map, const Gazetteer& g) {
  std::vector<PredictionRecord> out(predictions.begin(), predictions.end());
  for (auto& r : out) {
    if (r.decision != 1) continue;
    const auto it = type_map.allowed.find(r.subtask.name);
    if (it == type_map.allowed.end()) continue;
    if (it->second.count(tag(r.chunk_text, g))) continue;
    r.decision = 0;
    r.filtered = true;
    r.chunk_text = std::string(kNotSpecified);
  }
  return out;
}

}  // namespace tweetslot
