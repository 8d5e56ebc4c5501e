#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpus.hpp"
#include "emoji_table.hpp"
#include "error.hpp"
#include "hash.hpp"
#include "utf8.hpp"

namespace tweetslot {

inline constexpr std::string_view kUserToken = "<USER>";
inline constexpr std::string_view kUrlToken = "<URL>";
inline constexpr std::string_view kCovidTagToken = "<COVID_TAG>";

struct CleanConfig {
  bool enabled = true;
  // Emoji code point sequences -> alias. Longest sequence wins.
  std::vector<std::pair<std::u32string, std::string>> emoji_map;
  // Lowercase hashtags including the leading '#'.
  std::set<std::string> covid_tags;

  static CleanConfig defaults() {
    CleanConfig c;
    c.emoji_map = builtin_emoji_table();
    c.covid_tags = {"#covid19",      "#covid",       "#coronavirus", "#covid_19",
                    "#covid2019",    "#sarscov2",    "#ncov",        "#2019ncov",
                    "#coronavirusoutbreak", "#covid19pandemic", "#corona",
                    "#wuhanvirus"};
    return c;
  }
};

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// TSV: "codepoint-sequence<TAB>alias". The sequence is either literal UTF-8
// or space-separated "U+XXXX" tokens. '#' lines are comments.
inline std::vector<std::pair<std::u32string, std::string>> load_emoji_map(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open emoji map: " + path);
  std::vector<std::pair<std::u32string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab + 1 >= line.size()) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected sequence<TAB>alias");
    }
    const std::string seq = line.substr(0, tab);
    std::u32string cps;
    if (seq.rfind("U+", 0) == 0) {
      std::istringstream ss(seq);
      std::string tok;
      while (ss >> tok) {
        if (tok.rfind("U+", 0) != 0) {
          throw ConfigError(path + ":" + std::to_string(lineno) + ": bad code point '" + tok + "'");
        }
        try {
          cps.push_back(static_cast<char32_t>(std::stoul(tok.substr(2), nullptr, 16)));
        } catch (const std::exception&) {
          throw ConfigError(path + ":" + std::to_string(lineno) + ": bad code point '" + tok + "'");
        }
      }
    } else {
      try {
        cps = utf8::decode(seq);
      } catch (const DataError& e) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    if (cps.empty() || cps[0] < 0x80) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": sequence must start with a non-ASCII code point");
    }
    out.emplace_back(std::move(cps), line.substr(tab + 1));
  }
  return out;
}

// One hashtag per line; stored lowercase. Every entry must start with '#'.
inline std::set<std::string> load_covid_tags(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open covid tag list: " + path);
  std::set<std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    if (line[0] != '#') {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": tag must begin with '#'");
    }
    out.insert(ascii_lower(line));
  }
  return out;
}

namespace detail {

inline bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' ||
         c == 0x00A0 || (c >= 0x2000 && c <= 0x200A) || c == 0x202F || c == 0x205F ||
         c == 0x3000 || c == 0x2028 || c == 0x2029;
}

inline bool is_ascii_word(char32_t c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_';
}

// Curly quotes, dashes and ellipsis to ASCII; exotic spaces to ' '.
inline void standardize_char(char32_t c, std::u32string& out) {
  switch (c) {
    case 0x2018: case 0x2019: case 0x201A: case 0x201B: case 0x2032:
      out.push_back(U'\'');
      return;
    case 0x201C: case 0x201D: case 0x201E: case 0x201F: case 0x2033:
    case 0x00AB: case 0x00BB:
      out.push_back(U'"');
      return;
    case 0x2010: case 0x2011: case 0x2012: case 0x2013: case 0x2014:
    case 0x2015: case 0x2212:
      out.push_back(U'-');
      return;
    case 0x2026:
      out.append(U"...");
      return;
    // Variation selector, zero-width joiner/space: invisible leftovers.
    case 0xFE0F: case 0x200D: case 0x200B:
      return;
    default:
      break;
  }
  out.push_back(is_space(c) ? U' ' : c);
}

inline bool starts_with_icase(std::u32string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char32_t c = s[i];
    if (c >= 'A' && c <= 'Z') c = c - 'A' + 'a';
    if (c != static_cast<char32_t>(prefix[i])) return false;
  }
  return true;
}

// Mentions and COVID hashtags inside one whitespace-free token.
inline void rewrite_token(std::u32string_view tok, const CleanConfig& cfg, std::string& out) {
  if (starts_with_icase(tok, "http://") || starts_with_icase(tok, "https://") ||
      starts_with_icase(tok, "www.")) {
    out += kUrlToken;
    return;
  }
  std::size_t i = 0;
  while (i < tok.size()) {
    const char32_t c = tok[i];
    // '>' closes a replacement token, so "<USER>@x" is left alone on a second pass.
    const bool after_word = i > 0 && (is_ascii_word(tok[i - 1]) || tok[i - 1] == U'>');
    if ((c == U'@' || c == U'#') && !after_word && i + 1 < tok.size() &&
        is_ascii_word(tok[i + 1])) {
      std::size_t j = i + 1;
      while (j < tok.size() && is_ascii_word(tok[j])) ++j;
      if (c == U'@') {
        out += kUserToken;
        i = j;
        continue;
      }
      const std::string tag = ascii_lower(utf8::encode(tok.substr(i, j - i)));
      if (cfg.covid_tags.count(tag)) {
        out += kCovidTagToken;
        i = j;
        continue;
      }
    }
    utf8::append(out, c);
    ++i;
  }
}

}  // namespace detail

// Tweet normalization. With cfg.enabled == false this is the identity.
// Steps: emoji -> " alias ", punctuation standardization, URL / @-mention /
// COVID-hashtag replacement per whitespace token, whitespace collapse + trim.
inline std::string clean(std::string_view text, const CleanConfig& cfg) {
  if (!cfg.enabled) return std::string(text);
  const std::u32string cps = utf8::decode(text);

  std::u32string expanded;
  expanded.reserve(cps.size());
  for (std::size_t i = 0; i < cps.size();) {
    std::size_t best_len = 0;
    const std::string* alias = nullptr;
    if (cps[i] >= 0x80) {
      for (const auto& [seq, a] : cfg.emoji_map) {
        if (seq.size() > best_len && std::u32string_view(cps).substr(i, seq.size()) == seq) {
          best_len = seq.size();
          alias = &a;
        }
      }
    }
    if (alias != nullptr) {
      expanded.push_back(U' ');
      expanded.append(utf8::decode(*alias));
      expanded.push_back(U' ');
      i += best_len;
    } else {
      detail::standardize_char(cps[i], expanded);
      ++i;
    }
  }

  std::string out;
  std::size_t i = 0;
  while (i < expanded.size()) {
    while (i < expanded.size() && expanded[i] == U' ') ++i;
    if (i >= expanded.size()) break;
    std::size_t j = i;
    while (j < expanded.size() && expanded[j] != U' ') ++j;
    if (!out.empty()) out.push_back(' ');
    detail::rewrite_token(std::u32string_view(expanded).substr(i, j - i), cfg, out);
    i = j;
  }
  return out;
}

using TokenId = std::int32_t;

// Fixed-size hashed vocabulary. Ids below kNumReserved are special tokens;
// every other token t maps to kNumReserved + fnv1a64(t) mod (size - kNumReserved).
struct Vocab {
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kEntityOpen = 2;
  static constexpr TokenId kEntityClose = 3;
  static constexpr TokenId kUser = 4;
  static constexpr TokenId kUrl = 5;
  static constexpr TokenId kCovidTag = 6;
  static constexpr TokenId kNumReserved = 7;

  std::size_t size = 4096;

  explicit Vocab(std::size_t n = 4096) : size(n) {
    if (n <= static_cast<std::size_t>(kNumReserved)) {
      throw ConfigError("vocab size must exceed the " + std::to_string(kNumReserved) +
                        " reserved ids");
    }
  }

  TokenId hashed_id(std::string_view lowered) const {
    const auto span = static_cast<std::uint64_t>(size) - kNumReserved;
    return static_cast<TokenId>(kNumReserved + fnv1a64(lowered) % span);
  }
};

// Lowercases ASCII and splits on whitespace and ASCII punctuation; every
// punctuation character is its own token. <USER>, <URL> and <COVID_TAG> map
// to reserved ids. Entity markers are never produced from text.
inline std::vector<TokenId> tokenize(std::string_view text, const Vocab& vocab) {
  std::vector<TokenId> ids;
  std::string word;
  const auto flush = [&] {
    if (!word.empty()) {
      ids.push_back(vocab.hashed_id(word));
      word.clear();
    }
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '<') {
      bool matched = false;
      for (auto [tok, id] : {std::pair{kUserToken, Vocab::kUser},
                             std::pair{kUrlToken, Vocab::kUrl},
                             std::pair{kCovidTagToken, Vocab::kCovidTag}}) {
        if (text.substr(i, tok.size()) == tok) {
          flush();
          ids.push_back(id);
          i += tok.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    const auto uc = static_cast<unsigned char>(c);
    if (uc >= 0x80 || std::isalnum(uc) || c == '_') {
      word.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    } else if (std::isspace(uc)) {
      flush();
    } else {
      flush();
      ids.push_back(vocab.hashed_id(std::string_view(&text[i], 1)));
    }
    ++i;
  }
  flush();
  return ids;
}

struct MaskedInstance {
  std::string tweet_id;
  std::size_t candidate_index = 0;
  SubtaskId subtask;
  int label = 0;
  // Padded with Vocab::kPad to max_len.
  std::vector<TokenId> token_ids;
  std::size_t length = 0;  // non-pad tokens
  std::size_t marker_pos = 0;
  std::size_t close_pos = 0;
  std::string chunk_text;
  // Set when the chunk alone did not fit in max_len - 2 tokens.
  bool chunk_truncated = false;
};

inline constexpr std::size_t kDefaultMaxLen = 96;

// prefix ++ <E> ++ chunk ++ </E> ++ suffix, each piece cleaned and tokenized
// separately. Overlong sequences keep a window centred on the marked region;
// leftover budget on one side is handed to the other.
inline MaskedInstance mask_candidate(const AnnotatedTweet& tweet, std::size_t candidate_index,
                                     const SubtaskId& subtask, int label, const Vocab& vocab,
                                     const CleanConfig& cfg,
                                     std::size_t max_len = kDefaultMaxLen) {
  if (max_len < 2) throw ConfigError("max_len must be at least 2");
  if (candidate_index >= tweet.candidates.size()) {
    throw DataError("tweet '" + tweet.id + "': candidate index " +
                    std::to_string(candidate_index) + " out of range");
  }
  const auto cps = utf8::decode(tweet.text);
  const Span span = tweet.candidates[candidate_index];
  if (!(span.start < span.end && span.end <= cps.size())) {
    throw DataError("tweet '" + tweet.id + "': candidate span out of bounds");
  }
  const std::u32string_view all(cps);
  const auto piece = [&](std::size_t b, std::size_t e) {
    return tokenize(clean(utf8::encode(all.substr(b, e - b)), cfg), vocab);
  };
  const auto prefix = piece(0, span.start);
  auto chunk = piece(span.start, span.end);
  const auto suffix = piece(span.end, cps.size());

  MaskedInstance m;
  m.tweet_id = tweet.id;
  m.candidate_index = candidate_index;
  m.subtask = subtask;
  m.label = label;
  m.chunk_text = utf8::encode(all.substr(span.start, span.end - span.start));

  if (chunk.size() + 2 > max_len) {
    chunk.resize(max_len - 2);
    m.chunk_truncated = true;
  }
  const std::size_t budget = max_len - chunk.size() - 2;
  std::size_t left = std::min(prefix.size(), budget / 2);
  const std::size_t right = std::min(suffix.size(), budget - left);
  left = std::min(prefix.size(), budget - right);

  m.token_ids.reserve(max_len);
  m.token_ids.insert(m.token_ids.end(), prefix.end() - static_cast<std::ptrdiff_t>(left),
                     prefix.end());
  m.marker_pos = m.token_ids.size();
  m.token_ids.push_back(Vocab::kEntityOpen);
  m.token_ids.insert(m.token_ids.end(), chunk.begin(), chunk.end());
  m.close_pos = m.token_ids.size();
  m.token_ids.push_back(Vocab::kEntityClose);
  m.token_ids.insert(m.token_ids.end(), suffix.begin(),
                     suffix.begin() + static_cast<std::ptrdiff_t>(right));
  m.length = m.token_ids.size();
  m.token_ids.resize(max_len, Vocab::kPad);
  return m;
}

// Masks every exploded instance of a corpus, in explode order.
inline std::vector<MaskedInstance> mask_corpus(const Corpus& tweets, const Vocab& vocab,
                                               const CleanConfig& cfg, std::size_t max_len,
                                               const SubtaskRegistry& reg =
                                                   SubtaskRegistry::builtin()) {
  std::vector<MaskedInstance> out;
  std::vector<MaskedInstance> per_candidate;
  std::size_t cached_tweet = tweets.size();
  for (const auto& inst : explode_instances(tweets, reg)) {
    const auto& t = tweets[inst.tweet_index];
    if (inst.tweet_index != cached_tweet) {
      per_candidate.clear();
      for (std::size_t ci = 0; ci < t.candidates.size(); ++ci) {
        per_candidate.push_back(mask_candidate(t, ci, inst.subtask, 0, vocab, cfg, max_len));
      }
      cached_tweet = inst.tweet_index;
    }
    MaskedInstance m = per_candidate[inst.candidate_index];
    m.subtask = inst.subtask;
    m.label = inst.label;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace tweetslot
