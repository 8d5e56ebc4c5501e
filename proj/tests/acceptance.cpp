// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Criterion 1 is a statement about published numbers and has
// no executable check.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "model_fixtures.hpp"
#include "tweetslot/tweetslot.hpp"

using namespace tweetslot;
namespace fs = std::filesystem;

namespace {

const std::string kData = TWEETSLOT_DATA_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- 2: gradients -----------------------------------------------------------

Outcome gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  EncoderConfig ec;
  ec.hidden_size = 8;
  ec.num_layers = 4;
  ec.vocab_size = 64;
  ec.max_len = 16;
  ec.seed = 3;
  const auto& reg = SubtaskRegistry::builtin();
  const std::vector<SubtaskId> subs(reg.all().begin(), reg.all().end());
  double worst = 0.0;
  std::string worst_at;
  bool groups_ok = true;
  for (auto s : kAllStrategies) {
    std::mt19937_64 rng(17 + static_cast<int>(s));
    auto m = init_model(ec, s);
    // Nonzero biases and proj4 offsets so no group sits at a trivial point.
    for (auto& l : m.encoder.layers) {
      for (auto& v : as_span(l.bias)) v = 0.2 * (uniform01(rng) - 0.5);
    }
    for (auto& b : m.proj.bias) {
      for (auto& v : as_span(b)) v = 0.2 * (uniform01(rng) - 0.5);
    }
    const auto batch = testing::random_instances(rng, 4, ec, subs);
    auto r = testing::check_model_gradient(m, batch, TrainConfig{});
    if (r.max_rel_error > worst) {
      worst = r.max_rel_error;
      worst_at = std::string(to_string(s)) + ":" + r.worst_tensor;
    }
    for (const char* g : {"embeddings", "layers", "heads"}) groups_ok &= r.checked_per_group[g] > 0;
    if (s == FeatureStrategy::kProj4) groups_ok &= r.checked_per_group["proj4"] > 0;
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && groups_ok && secs < 30.0,
          "max rel error " + fmt("%.2e", worst) + " at " + worst_at + ", all groups " +
              (groups_ok ? "covered" : "NOT covered") + ", " + fmt("%.1f s", secs)};
}

// ---- 3: oracles -------------------------------------------------------------

bool micro_f1_oracle(std::mt19937_64& rng) {
  SynthConfig sc;
  sc.tweets = 40;
  sc.seed = rng();
  const auto gold = generate_synthetic(sc);
  const auto& reg = SubtaskRegistry::builtin();
  // Gold triples and predicted triples as plain sets.
  std::set<std::tuple<std::string, std::string, std::size_t>> g_set, p_set, seen;
  std::vector<PredictionRecord> preds;
  for (const auto& t : gold) {
    for (const auto& s : reg.of(t.event)) {
      for (std::size_t c = 0; c < t.candidates.size(); ++c) {
        const auto key = std::make_tuple(t.id, s.key(), c);
        if (t.gold.count(s.name) && t.gold.at(s.name).count(c)) g_set.insert(key);
        if (rng() % 3 == 0) continue;  // unscored triple
        seen.insert(key);
        PredictionRecord r;
        r.tweet_id = t.id;
        r.subtask = s;
        r.candidate_index = c;
        r.chunk_text = "x";
        r.decision = static_cast<int>(rng() % 2);
        if (r.decision) p_set.insert(key);
        preds.push_back(r);
      }
    }
  }
  double tp = 0, fp = 0, fn = 0;
  for (const auto& k : seen) {
    const bool p = p_set.count(k) > 0, g = g_set.count(k) > 0;
    tp += p && g;
    fp += p && !g;
    fn += !p && g;
  }
  const double oracle = tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
  return score(preds, gold).micro_f1() == oracle;
}

bool vote_oracle() {
  for (unsigned mask = 0; mask < 32; ++mask) {
    std::vector<int> d(5);
    int ones = 0;
    for (int i = 0; i < 5; ++i) ones += d[i] = (mask >> i) & 1;
    if (majority_vote(d) != (ones >= 3 ? 1 : 0)) return false;
  }
  return true;
}

bool top_k_oracle(std::mt19937_64& rng) {
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng() % 20;
    const std::size_t k = 1 + rng() % n;
    std::vector<double> scores(n);
    for (auto& s : scores) s = static_cast<double>(rng() % 8) / 8.0;  // many ties
    // Repeated argmax, first index wins ties.
    std::vector<std::size_t> expect;
    std::vector<bool> used(n, false);
    for (std::size_t j = 0; j < k; ++j) {
      std::size_t best = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!used[i] && (best == n || scores[i] > scores[best])) best = i;
      }
      used[best] = true;
      expect.push_back(best);
    }
    if (select_top(scores, k) != expect) return false;
  }
  return true;
}

bool extractor_oracle(std::mt19937_64& rng) {
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t h = 4 * (1 + rng() % 4), layers = 4 + rng() % 3, n = 2 + rng() % 5;
    const std::size_t pos = rng() % n;
    EncoderOutput enc;
    for (std::size_t l = 0; l < layers; ++l) {
      Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(h));
      for (auto& v : as_span(m)) v = static_cast<double>(static_cast<int>(rng() % 17) - 8) / 4.0;
      enc.hidden.push_back(m);
    }
    Projection p = Projection::zeros(h);
    for (auto& w : p.weight) for (auto& v : as_span(w)) v = static_cast<double>(static_cast<int>(rng() % 9) - 4) / 2.0;
    for (auto& b : p.bias) for (auto& v : as_span(b)) v = static_cast<double>(static_cast<int>(rng() % 5) - 2);
    const auto at = [&](std::size_t l, std::size_t i) {
      return enc.hidden[l](static_cast<Eigen::Index>(pos), static_cast<Eigen::Index>(i));
    };
    std::vector<double> last, sum(h, 0.0), cat, proj;
    for (std::size_t i = 0; i < h; ++i) last.push_back(at(layers - 1, i));
    for (std::size_t l = layers - 4; l < layers; ++l) {
      for (std::size_t i = 0; i < h; ++i) {
        sum[i] += at(l, i);
        cat.push_back(at(l, i));
      }
    }
    for (std::size_t k = 0; k < 4; ++k) {
      for (std::size_t o = 0; o < h / 4; ++o) {
        double acc = p.bias[k](static_cast<Eigen::Index>(o));
        for (std::size_t i = 0; i < h; ++i) {
          acc += p.weight[k](static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)) * at(layers - 4 + k, i);
        }
        proj.push_back(acc);
      }
    }
    const auto same = [](const Vector& got, const std::vector<double>& want) {
      if (static_cast<std::size_t>(got.size()) != want.size()) return false;
      for (std::size_t i = 0; i < want.size(); ++i) {
        if (got(static_cast<Eigen::Index>(i)) != want[i]) return false;
      }
      return true;
    };
    if (!same(extract(FeatureStrategy::kLast, enc, pos), last)) return false;
    if (!same(extract(FeatureStrategy::kSum4, enc, pos), sum)) return false;
    if (!same(extract(FeatureStrategy::kConcat4, enc, pos), cat)) return false;
    if (!same(extract(FeatureStrategy::kProj4, enc, pos, &p), proj)) return false;
  }
  return true;
}

Outcome oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(3);
  bool f1 = true;
  for (int i = 0; i < 50; ++i) f1 &= micro_f1_oracle(rng);
  const bool vote = vote_oracle();
  const bool top = top_k_oracle(rng);
  const bool feat = extractor_oracle(rng);
  const double secs = seconds_since(t0);
  const auto yn = [](bool b) { return b ? "ok" : "MISMATCH"; };
  return {f1 && vote && top && feat && secs < 10.0,
          std::string("micro-F1 ") + yn(f1) + ", vote 2^5 " + yn(vote) + ", top-k x100 " + yn(top) +
              ", extractors " + yn(feat) + ", " + fmt("%.2f s", secs)};
}

// ---- 4: masking -------------------------------------------------------------

Outcome masking() {
  std::mt19937_64 rng(4);
  const Vocab vocab(4096);
  const auto cfg = CleanConfig::defaults();
  const std::vector<std::string> words = {
      "my", "Mom", "tested", "positive", "@nurse_joe", "#COVID19", "#stayhome", "https://t.co/ab",
      "www.x.org", "\xF0\x9F\x98\xB7", "caf\xC3\xA9", "\xE2\x80\x9Cwow\xE2\x80\x9D", "...", "-", "34",
      "years", "old", "in", "New", "York", "\xE2\x80\xA6", "it's", "a,b", "ICU"};
  std::size_t ok = 0, context_cut = 0, chunk_cut = 0;
  const std::size_t total = 1000;
  for (std::size_t i = 0; i < total; ++i) {
    AnnotatedTweet t;
    t.id = "m" + std::to_string(i);
    t.event = EventType::kDeath;
    const std::size_t n = 3 + rng() % 60;
    for (std::size_t w = 0; w < n; ++w) {
      if (w) t.text += rng() % 5 == 0 ? "  " : " ";
      t.text += words[rng() % words.size()];
    }
    const auto len = utf8::length(t.text);
    const std::size_t a = rng() % len, b = rng() % len;
    t.candidates.push_back({std::min(a, b), std::max(a, b) + 1});
    // One in four instances gets a max_len far below the text length.
    const std::size_t max_len = rng() % 4 == 0 ? 6 + rng() % 10 : 96;
    const auto m = mask_candidate(t, 0, {EventType::kDeath, "name"}, 0, vocab, cfg, max_len);
    auto want = tokenize(clean(m.chunk_text, cfg), vocab);
    if (want.size() + 2 > max_len) {
      // The chunk alone exceeds the budget: it is cut to fit and flagged.
      want.resize(max_len - 2);
      ++chunk_cut;
      if (!m.chunk_truncated) continue;
    } else if (m.chunk_truncated) {
      continue;
    }
    if (m.length == max_len) ++context_cut;
    const std::vector<TokenId> got(m.token_ids.begin() + static_cast<std::ptrdiff_t>(m.marker_pos) + 1,
                                   m.token_ids.begin() + static_cast<std::ptrdiff_t>(m.close_pos));
    if (m.token_ids.size() == max_len && m.token_ids[m.marker_pos] == Vocab::kEntityOpen &&
        m.token_ids[m.close_pos] == Vocab::kEntityClose && got == want) {
      ++ok;
    }
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " exact (" +
                           std::to_string(context_cut) + " at full length, " +
                           std::to_string(chunk_cut) + " oversized chunks cut and flagged)"};
}

// ---- shared training helpers ------------------------------------------------

struct Masked {
  Split split;
  std::vector<MaskedInstance> train, val;
};

Masked prepare(const Corpus& corpus, const PipelineConfig& cfg) {
  Masked m;
  m.split = split(corpus, {cfg.train_fraction, cfg.seed});
  const Vocab vocab(cfg.vocab_size);
  m.train = mask_corpus(m.split.train, vocab, cfg.clean(), cfg.encoder.max_len);
  m.val = mask_corpus(m.split.validation, vocab, cfg.clean(), cfg.encoder.max_len);
  return m;
}

PipelineConfig shipped_defaults() { return load_config(kData + "/../configs/default.conf"); }

TrainResult train_one(const std::vector<MaskedInstance>& tr, const std::vector<MaskedInstance>& va,
                      const PipelineConfig& cfg, FeatureStrategy s) {
  auto tc = cfg.train;
  tc.seed = cfg.member_seed(1);
  auto ec = cfg.encoder;
  ec.seed = cfg.member_seed(1);
  return train(tr, va, init_model(ec, s), tc);
}

// ---- 5: learning ------------------------------------------------------------

Outcome learning() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = shipped_defaults();
  SynthConfig sc;
  sc.tweets = 500;
  sc.seed = 7;
  const auto corpus = generate_synthetic(sc);
  std::set<EventType> events;
  for (const auto& t : corpus) events.insert(t.event);
  const auto data = prepare(corpus, cfg);
  const auto r = train_one(data.train, data.val, cfg, FeatureStrategy::kConcat4);
  std::size_t first = 0;
  for (const auto& e : r.log) {
    if (e.val_micro_f1 >= 0.90) {
      first = e.epoch;
      break;
    }
  }
  const double secs = seconds_since(t0);
  return {events.size() == 5 && first != 0 && cfg.train.epochs <= 100 && secs < 300.0,
          "best val micro-F1 " + fmt("%.3f", r.best_val_micro_f1) + ", >= 0.90 first at epoch " +
              std::to_string(first) + " of " + std::to_string(cfg.train.epochs) + ", " +
              fmt("%.1f s", secs)};
}

// ---- 6: joint vs separate ----------------------------------------------------

Outcome joint_vs_separate() {
  const auto cfg = shipped_defaults();
  SynthConfig sc;
  sc.tweets = 300;
  sc.seed = 1;
  sc.max_positives_per_subtask = 30;
  const auto corpus = generate_synthetic(sc);
  const auto data = prepare(corpus, cfg);
  const auto s = FeatureStrategy::kConcat4;

  const auto joint = train_one(data.train, data.val, cfg, s);
  const double joint_f1 = score(predict(joint.best, data.val), data.split.validation).micro_f1();

  std::vector<PredictionRecord> separate;
  for (auto e : kAllEvents) {
    std::vector<MaskedInstance> tr, va;
    for (const auto& i : data.train) if (i.subtask.event == e) tr.push_back(i);
    for (const auto& i : data.val) if (i.subtask.event == e) va.push_back(i);
    const auto r = train_one(tr, va, cfg, s);
    const auto p = predict(r.best, va);
    separate.insert(separate.end(), p.begin(), p.end());
  }
  const double sep_f1 = score(separate, data.split.validation).micro_f1();
  return {joint_f1 >= sep_f1 - 0.01,
          "joint " + fmt("%.3f", joint_f1) + " vs separate " + fmt("%.3f", sep_f1)};
}

// ---- 7: ablation direction ---------------------------------------------------

Outcome ablation() {
  const auto cfg = shipped_defaults();
  SynthConfig train_sc;
  train_sc.tweets = 500;
  train_sc.seed = 7;
  // Training data never pairs a person cue with a place; the held-out corpus
  // does, so the model's type-mismatched positives are the planted ones.
  train_sc.confuser_rate = 0.0;
  SynthConfig test_sc = train_sc;
  test_sc.tweets = 200;
  test_sc.seed = 99;
  test_sc.confuser_rate = 0.15;
  test_sc.id_prefix = "test";
  const auto data = prepare(generate_synthetic(train_sc), cfg);
  const auto test = generate_synthetic(test_sc);
  const auto test_inst = mask_corpus(test, Vocab(cfg.vocab_size), cfg.clean(), cfg.encoder.max_len);

  const auto r = train_one(data.train, data.val, cfg, FeatureStrategy::kConcat4);
  const auto preds = predict(r.best, test_inst, cfg.train.threshold);
  const auto filtered = filter(preds, TypeMap::load(cfg.type_map_path), load_gazetteer(cfg.gazetteer_dir));
  const auto a = score(preds, test), b = score(filtered, test);
  return {b.micro_f1() > a.micro_f1(),
          "filtered " + fmt("%.3f", b.micro_f1()) + " vs unfiltered " + fmt("%.3f", a.micro_f1()) +
              " (FP " + std::to_string(a.micro.fp) + " -> " + std::to_string(b.micro.fp) + ")"};
}

// ---- 8: filter safety --------------------------------------------------------

Outcome filter_safety() {
  std::mt19937_64 rng(8);
  const auto gaz = load_gazetteer(kData + "/gazetteer");
  const auto tm = TypeMap::load(kData + "/type_map.txt");
  const auto& reg = SubtaskRegistry::builtin();
  std::vector<std::string> texts = {"my mom", "34 years old", "yesterday", "for two weeks", "a fever",
                                    "the CDC", "London", "he", "Not Specified", "", "a nursing home"};
  for (const auto& set : gaz.phrases) texts.insert(texts.end(), set.begin(), set.end());
  std::size_t fp_increase = 0, flips = 0, removed = 0;
  for (int set = 0; set < 10000; ++set) {
    const std::size_t n = 1 + rng() % 20;
    std::vector<PredictionRecord> preds(n);
    std::vector<int> gold(n);
    for (auto& r : preds) {
      r.tweet_id = "t" + std::to_string(rng() % 5);
      r.subtask = reg.all()[rng() % reg.all().size()];
      r.candidate_index = rng() % 4;
      r.chunk_text = texts[rng() % texts.size()];
      r.probability = uniform01(rng);
      r.decision = r.probability >= 0.5;
    }
    for (auto& g : gold) g = static_cast<int>(rng() % 2);
    const auto out = filter(preds, tm, gaz);
    std::size_t fp_before = 0, fp_after = 0;
    for (std::size_t i = 0; i < n; ++i) {
      fp_before += effective_decision(preds[i]) && !gold[i];
      fp_after += effective_decision(out[i]) && !gold[i];
      flips += preds[i].decision == 0 && out[i].decision == 1;
      removed += out[i].filtered;
    }
    fp_increase += fp_after > fp_before;
  }
  return {fp_increase == 0 && flips == 0,
          "10000 sets: FP increases " + std::to_string(fp_increase) + ", 0->1 flips " +
              std::to_string(flips) + ", positives removed " + std::to_string(removed)};
}

// ---- 9: determinism ----------------------------------------------------------

Outcome determinism() {
  const auto root = fs::temp_directory_path() / "tweetslot_acceptance_det";
  fs::remove_all(root);
  auto cfg = shipped_defaults();
  cfg.train.epochs = 2;
  cfg.member_seeds = {1};
  cfg.k = 3;
  std::vector<fs::path> dirs = {root / "a", root / "b"};
  for (const auto& d : dirs) {
    cfg.output_dir = d.string();
    run_pipeline(cfg);
  }
  std::size_t compared = 0, differ = 0;
  for (const auto& sub : {"models", "reports"}) {
    for (const auto& e : fs::directory_iterator(dirs[0] / sub)) {
      ++compared;
      const auto other = dirs[1] / sub / e.path().filename();
      if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differ;
    }
  }
  fs::remove_all(root);
  return {compared > 0 && differ == 0,
          std::to_string(compared) + " model/report files compared, " + std::to_string(differ) +
              " differ"};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {2, gradients}, {3, oracles},         {4, masking},       {5, learning},
      {6, joint_vs_separate}, {7, ablation}, {8, filter_safety}, {9, determinism}};
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
