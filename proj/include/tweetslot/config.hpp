#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "encoder.hpp"
#include "ensemble.hpp"
#include "error.hpp"
#include "features.hpp"
#include "hash.hpp"
#include "model.hpp"
#include "preprocess.hpp"

namespace tweetslot {

// Flat "key = value" file. Keys are dotted ("train.epochs"); a "[train]"
// header prefixes the keys that follow it. '#' starts a comment.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in, const std::string& source) {
    KeyValueFile f;
    f.source_ = source;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
      line = trim(line);
      if (line.empty()) continue;
      const auto where = source + ":" + std::to_string(lineno);
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
      std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw ConfigError(where + ": empty key");
      if (!section.empty()) key = section + "." + key;
      if (f.entries_.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
      f.entries_[key] = {trim(line.substr(eq + 1)), lineno};
    }
    return f;
  }

  static KeyValueFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    return parse(in, path);
  }

  // Removes and returns the value; consumed keys are not reported as unknown.
  std::optional<std::string> take(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    std::string v = it->second.value;
    entries_.erase(it);
    return v;
  }

  void reject_unknown() const {
    if (entries_.empty()) return;
    const auto& [key, e] = *entries_.begin();
    throw ConfigError(source_ + ":" + std::to_string(e.line) + ": unknown key '" + key + "'");
  }

  const std::string& source() const { return source_; }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string source_;
  std::map<std::string, Entry> entries_;
};

struct PipelineConfig {
  std::uint64_t seed = 1;
  std::string corpus_path;
  std::string eval_path;      // empty: evaluate on the validation split
  std::string registry_path;  // empty: built-in registry
  double train_fraction = 0.8;
  bool clean_enabled = true;
  std::string emoji_map_path;   // empty: built-in table
  std::string covid_tags_path;  // empty: built-in list
  std::size_t vocab_size = 4096;
  EncoderConfig encoder;
  TrainConfig train;
  std::vector<FeatureStrategy> strategies{kAllStrategies.begin(), kAllStrategies.end()};
  std::vector<std::uint64_t> member_seeds{1, 2, 3};
  std::size_t k = 5;
  std::string gazetteer_dir;
  std::string type_map_path;  // empty: built-in map
  std::string output_dir = "out";
  bool verbose = false;

  SubtaskRegistry registry() const {
    return registry_path.empty() ? SubtaskRegistry::builtin() : SubtaskRegistry::load(registry_path);
  }

  CleanConfig clean() const {
    CleanConfig c = CleanConfig::defaults();
    c.enabled = clean_enabled;
    if (!emoji_map_path.empty()) c.emoji_map = load_emoji_map(emoji_map_path);
    if (!covid_tags_path.empty()) c.covid_tags = load_covid_tags(covid_tags_path);
    return c;
  }

  EnsembleConfig ensemble() const {
    EnsembleConfig e;
    e.k = k;
    for (auto s : strategies) {
      for (auto m : member_seeds) e.pool.push_back({s, m});
    }
    return e;
  }

  // Encoder init and shuffle seed of one pool member.
  std::uint64_t member_seed(std::uint64_t pool_seed) const { return seed * 1000 + pool_seed; }

  // Checks ranges and that every input path exists. The gazetteer is only
  // needed by post-processing and is checked there.
  void validate() const {
    namespace fs = std::filesystem;
    if (corpus_path.empty()) throw ConfigError("corpus.path is required");
    const auto must_exist = [](const std::string& key, const std::string& p) {
      if (!p.empty() && !fs::exists(p)) throw ConfigError(key + ": path not found: " + p);
    };
    must_exist("corpus.path", corpus_path);
    must_exist("corpus.eval", eval_path);
    must_exist("corpus.registry", registry_path);
    must_exist("clean.emoji_map", emoji_map_path);
    must_exist("clean.covid_tags", covid_tags_path);
    must_exist("postprocess.type_map", type_map_path);
    if (!(train_fraction > 0 && train_fraction < 1)) {
      throw ConfigError("split.train_fraction must lie in (0,1)");
    }
    if (vocab_size != encoder.vocab_size) throw ConfigError("vocab.size and encoder vocab disagree");
    if (vocab_size <= Vocab::kNumReserved) throw ConfigError("vocab.size must exceed the reserved ids");
    encoder.validate();
    train.validate();
    if (strategies.empty()) throw ConfigError("ensemble.strategies is empty");
    if (member_seeds.empty()) throw ConfigError("ensemble.seeds is empty");
    ensemble().validate();
    if (output_dir.empty()) throw ConfigError("output.dir is empty");
  }

  // Canonical "key = value" listing; the output directory and verbosity do
  // not affect artifacts and are left out.
  std::string canonical() const {
    std::ostringstream out;
    const auto num = [](double v) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    std::string strat, seeds;
    for (auto s : strategies) strat += (strat.empty() ? "" : ",") + std::string(to_string(s));
    for (auto s : member_seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
    out << "clean.covid_tags = " << covid_tags_path << '\n'
        << "clean.emoji_map = " << emoji_map_path << '\n'
        << "clean.enabled = " << (clean_enabled ? "true" : "false") << '\n'
        << "corpus.eval = " << eval_path << '\n'
        << "corpus.path = " << corpus_path << '\n'
        << "corpus.registry = " << registry_path << '\n'
        << "encoder.hidden_size = " << encoder.hidden_size << '\n'
        << "encoder.kernel_radius = " << encoder.kernel_radius << '\n'
        << "encoder.max_len = " << encoder.max_len << '\n'
        << "encoder.num_layers = " << encoder.num_layers << '\n'
        << "ensemble.k = " << k << '\n'
        << "ensemble.seeds = " << seeds << '\n'
        << "ensemble.strategies = " << strat << '\n'
        << "postprocess.gazetteer = " << gazetteer_dir << '\n'
        << "postprocess.type_map = " << type_map_path << '\n'
        << "run.seed = " << seed << '\n'
        << "split.train_fraction = " << num(train_fraction) << '\n'
        << "train.batch_size = " << train.batch_size << '\n'
        << "train.beta1 = " << num(train.beta1) << '\n'
        << "train.beta2 = " << num(train.beta2) << '\n'
        << "train.clip_norm = " << num(train.clip_norm) << '\n'
        << "train.epochs = " << train.epochs << '\n'
        << "train.epsilon = " << num(train.epsilon) << '\n'
        << "train.learning_rate = " << num(train.learning_rate) << '\n'
        << "train.neg_weight = " << num(train.neg_weight) << '\n'
        << "train.pos_weight = " << num(train.pos_weight) << '\n'
        << "train.threshold = " << num(train.threshold) << '\n'
        << "train.weight_decay = " << num(train.weight_decay) << '\n'
        << "vocab.size = " << vocab_size << '\n';
    return out.str();
  }

  std::string hash() const { return hex64(fnv1a64(canonical())); }
};

namespace detail {

template <typename T>
T parse_number(const std::string& key, const std::string& v, const std::string& source) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(source + ": key '" + key + "': '" + v + "' is not a valid number");
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v, const std::string& source) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(source + ": key '" + key + "': expected true or false, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = KeyValueFile::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

// Relative paths in the file resolve against the file's directory.
inline PipelineConfig parse_config(KeyValueFile kv, const std::filesystem::path& base_dir) {
  PipelineConfig c;
  const std::string& src = kv.source();
  const auto path = [&](const std::string& key, std::string& field) {
    if (auto v = kv.take(key)) {
      if (v->empty()) {
        field.clear();
        return;
      }
      std::filesystem::path p(*v);
      field = (p.is_absolute() ? p : base_dir / p).lexically_normal().string();
    }
  };
  const auto size = [&](const std::string& key, std::size_t& field) {
    if (auto v = kv.take(key)) field = detail::parse_number<std::size_t>(key, *v, src);
  };
  const auto real = [&](const std::string& key, double& field) {
    if (auto v = kv.take(key)) field = detail::parse_number<double>(key, *v, src);
  };

  if (auto v = kv.take("run.seed")) c.seed = detail::parse_number<std::uint64_t>("run.seed", *v, src);
  path("corpus.path", c.corpus_path);
  path("corpus.eval", c.eval_path);
  path("corpus.registry", c.registry_path);
  real("split.train_fraction", c.train_fraction);
  if (auto v = kv.take("clean.enabled")) c.clean_enabled = detail::parse_bool("clean.enabled", *v, src);
  path("clean.emoji_map", c.emoji_map_path);
  path("clean.covid_tags", c.covid_tags_path);
  size("vocab.size", c.vocab_size);
  c.encoder.vocab_size = c.vocab_size;
  size("encoder.max_len", c.encoder.max_len);
  size("encoder.hidden_size", c.encoder.hidden_size);
  size("encoder.num_layers", c.encoder.num_layers);
  size("encoder.kernel_radius", c.encoder.kernel_radius);
  size("train.batch_size", c.train.batch_size);
  real("train.learning_rate", c.train.learning_rate);
  real("train.weight_decay", c.train.weight_decay);
  real("train.beta1", c.train.beta1);
  real("train.beta2", c.train.beta2);
  real("train.epsilon", c.train.epsilon);
  real("train.pos_weight", c.train.pos_weight);
  real("train.neg_weight", c.train.neg_weight);
  size("train.epochs", c.train.epochs);
  real("train.threshold", c.train.threshold);
  real("train.clip_norm", c.train.clip_norm);
  if (auto v = kv.take("ensemble.strategies")) {
    c.strategies.clear();
    for (const auto& s : detail::split_list(*v)) {
      const auto st = parse_strategy(s);
      if (!st) throw ConfigError(src + ": key 'ensemble.strategies': unknown strategy '" + s + "'");
      c.strategies.push_back(*st);
    }
  }
  if (auto v = kv.take("ensemble.seeds")) {
    c.member_seeds.clear();
    for (const auto& s : detail::split_list(*v)) {
      c.member_seeds.push_back(detail::parse_number<std::uint64_t>("ensemble.seeds", s, src));
    }
  }
  size("ensemble.k", c.k);
  path("postprocess.gazetteer", c.gazetteer_dir);
  path("postprocess.type_map", c.type_map_path);
  path("output.dir", c.output_dir);
  if (auto v = kv.take("log.verbose")) c.verbose = detail::parse_bool("log.verbose", *v, src);
  kv.reject_unknown();
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  auto kv = KeyValueFile::load(path);
  return parse_config(std::move(kv), std::filesystem::absolute(path).parent_path());
}

}  // namespace tweetslot
