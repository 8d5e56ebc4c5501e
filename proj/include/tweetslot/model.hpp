#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "encoder.hpp"
#include "error.hpp"
#include "features.hpp"
#include "preprocess.hpp"
#include "serialize.hpp"
#include "tensor.hpp"

namespace tweetslot {

// Binary output layer for one subtask.
struct Head {
  Vector weight;
  double bias = 0.0;
};

// Shared encoder and extractor with one head per registered subtask.
struct ModelParams {
  EncoderParams encoder;
  FeatureStrategy strategy = FeatureStrategy::kLast;
  Projection proj;  // only meaningful for kProj4
  std::map<std::string, Head> heads;  // keyed by SubtaskId::key()

  std::size_t feature_size() const {
    return feature_dim(strategy, encoder.cfg.hidden_size);
  }

  bool has_projection() const { return strategy == FeatureStrategy::kProj4; }

  // Same shapes, all zeros; used as a gradient buffer.
  ModelParams zeros_like() const {
    ModelParams z;
    z.encoder = EncoderParams::zeros(encoder.cfg);
    z.strategy = strategy;
    z.proj = Projection::zeros(encoder.cfg.hidden_size);
    for (const auto& [key, h] : heads) {
      z.heads[key] = Head{Vector::Zero(h.weight.size()), 0.0};
    }
    return z;
  }

  std::vector<std::string> head_keys() const {
    std::vector<std::string> keys;
    for (const auto& [k, h] : heads) keys.push_back(k);
    return keys;
  }

  // Every tensor in serialization order: encoder, projections (proj4 only),
  // then heads sorted by key.
  template <typename F>
  void visit(F&& f) {
    visit_impl(*this, f);
  }
  template <typename F>
  void visit(F&& f) const {
    visit_impl(*this, f);
  }

 private:
  template <typename Self, typename F>
  static void visit_impl(Self& self, F& f) {
    self.encoder.visit(f);
    if (self.has_projection()) self.proj.visit(f);
    for (auto& [key, h] : self.heads) {
      f("head." + key + ".weight", as_span(h.weight));
      f("head." + key + ".bias", as_span(h.bias));
    }
  }
};

inline ModelParams init_model(const EncoderConfig& cfg, FeatureStrategy strategy,
                              const SubtaskRegistry& reg = SubtaskRegistry::builtin()) {
  ModelParams m;
  m.encoder = init_params(cfg);
  m.strategy = strategy;
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  m.proj = strategy == FeatureStrategy::kProj4 ? Projection::random(cfg.hidden_size, rng)
                                               : Projection::zeros(cfg.hidden_size);
  const std::size_t d = m.feature_size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<std::string> keys;
  for (const auto& s : reg.all()) keys.push_back(s.key());
  std::sort(keys.begin(), keys.end());
  for (const auto& key : keys) {
    Head h{Vector(static_cast<Eigen::Index>(d)), 0.0};
    for (auto& v : as_span(h.weight)) v = uniform_symmetric(rng, scale);
    m.heads.emplace(key, std::move(h));
  }
  return m;
}

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct TrainConfig {
  std::size_t batch_size = 32;
  // Reference value for a large pretrained encoder is 2e-5; 1e-3 suits the
  // small encoder trained from scratch.
  double learning_rate = 1e-3;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double pos_weight = 10.0;
  double neg_weight = 1.0;
  std::size_t epochs = 20;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  double clip_norm = 5.0;

  void validate() const {
    if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
    if (!(pos_weight > 0 && neg_weight > 0)) throw ConfigError("class weights must be > 0");
    if (!(threshold > 0 && threshold < 1)) throw ConfigError("train.threshold must lie in (0,1)");
    if (!(learning_rate > 0)) throw ConfigError("train.learning_rate must be > 0");
    if (weight_decay < 0) throw ConfigError("train.weight_decay must be >= 0");
    if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  }
};

inline constexpr double kProbClamp = 1e-12;

// Encoder pass for one instance, cropped to the receptive field around <E>;
// the marker states are identical to those of the full sequence.
struct InstancePass {
  std::size_t crop_start = 0;
  std::vector<TokenId> ids;
  EncoderTrace trace;
  std::array<Vector, 4> rows;
  Vector feature;
  double logit = 0.0;
};

inline const Head& head_for(const ModelParams& m, const SubtaskId& s) {
  const auto it = m.heads.find(s.key());
  if (it == m.heads.end()) throw DataError("no output head for subtask '" + s.key() + "'");
  return it->second;
}

inline InstancePass run_instance(const ModelParams& m, const MaskedInstance& inst) {
  const Head& head = head_for(m, inst.subtask);
  const std::size_t n = std::min(inst.length, inst.token_ids.size());
  if (inst.marker_pos >= n) throw DataError("marker position outside the sequence");
  const std::size_t radius = m.encoder.cfg.receptive_radius();
  InstancePass pass;
  pass.crop_start = inst.marker_pos > radius ? inst.marker_pos - radius : 0;
  const std::size_t end = std::min(n, inst.marker_pos + radius + 1);
  pass.ids.assign(inst.token_ids.begin() + static_cast<std::ptrdiff_t>(pass.crop_start),
                  inst.token_ids.begin() + static_cast<std::ptrdiff_t>(end));
  pass.trace = trace_forward(m.encoder, pass.ids, pass.crop_start);
  EncoderOutput out{pass.trace.hidden};
  pass.rows = marker_rows(out, inst.marker_pos - pass.crop_start);
  pass.feature = extract_from_rows(m.strategy, pass.rows, &m.proj);
  pass.logit = head.weight.dot(pass.feature) + head.bias;
  return pass;
}

inline double predict_logit(const ModelParams& m, const MaskedInstance& inst) {
  return run_instance(m, inst).logit;
}

inline double predict_probability(const ModelParams& m, const MaskedInstance& inst) {
  return sigmoid(predict_logit(m, inst));
}

inline double class_weight(int label, const TrainConfig& cfg) {
  return label == 1 ? cfg.pos_weight : cfg.neg_weight;
}

// w(y) * BCE(clamp(p), y) for one example.
inline double weighted_bce(double p, int label, const TrainConfig& cfg) {
  const double pc = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  const double bce = label == 1 ? -std::log(pc) : -std::log(1.0 - pc);
  return class_weight(label, cfg) * bce;
}

// Mean class-weighted BCE over the batch.
inline double loss(const ModelParams& m, std::span<const MaskedInstance> batch,
                   const TrainConfig& cfg) {
  if (batch.empty()) throw DataError("loss of an empty batch");
  double total = 0.0;
  for (const auto& inst : batch) {
    total += weighted_bce(predict_probability(m, inst), inst.label, cfg);
  }
  return total / static_cast<double>(batch.size());
}

// Loss plus its gradient accumulated into grad (shaped like m). Keys of heads
// that received a gradient are added to touched_heads.
inline double loss_and_grad(const ModelParams& m, std::span<const MaskedInstance> batch,
                            const TrainConfig& cfg, ModelParams& grad,
                            std::set<std::string>* touched_heads = nullptr) {
  if (batch.empty()) throw DataError("loss of an empty batch");
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  const std::size_t L = m.encoder.cfg.num_layers;
  const auto h = static_cast<Eigen::Index>(m.encoder.cfg.hidden_size);
  double total = 0.0;
  for (const auto& inst : batch) {
    InstancePass pass = run_instance(m, inst);
    const double p = sigmoid(pass.logit);
    total += weighted_bce(p, inst.label, cfg);
    // The clamp has zero slope where it is active.
    const bool clamped = p < kProbClamp || p > 1.0 - kProbClamp;
    const double dlogit =
        clamped ? 0.0 : class_weight(inst.label, cfg) * (p - inst.label) * inv_n;

    const std::string key = inst.subtask.key();
    const Head& head = m.heads.at(key);
    Head& ghead = grad.heads.at(key);
    ghead.weight += dlogit * pass.feature;
    ghead.bias += dlogit;
    if (touched_heads != nullptr) touched_heads->insert(key);
    if (dlogit == 0.0) continue;

    const Vector gfeat = dlogit * head.weight;
    const auto grows = extract_backward_rows(m.strategy, pass.rows, gfeat, &m.proj, &grad.proj);
    const auto n = static_cast<Eigen::Index>(pass.ids.size());
    const auto local = static_cast<Eigen::Index>(inst.marker_pos - pass.crop_start);
    std::vector<Matrix> upstream(L, Matrix::Zero(n, h));
    for (std::size_t k = 0; k < 4; ++k) upstream[L - 4 + k].row(local) = grows[k].transpose();
    backward(m.encoder, pass.ids, pass.trace, upstream, grad.encoder);
  }
  return total * inv_n;
}

struct PredictionRecord {
  std::string tweet_id;
  SubtaskId subtask;
  std::size_t candidate_index = 0;
  std::string chunk_text;
  double probability = 0.0;
  int decision = 0;
  bool filtered = false;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

// decision = [probability >= threshold]
inline std::vector<PredictionRecord> predict(const ModelParams& m,
                                             std::span<const MaskedInstance> instances,
                                             double threshold = 0.5) {
  std::vector<PredictionRecord> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    const double p = predict_probability(m, inst);
    out.push_back({inst.tweet_id, inst.subtask, inst.candidate_index, inst.chunk_text, p,
                   p >= threshold ? 1 : 0, false});
  }
  return out;
}

// ---- serialization ---------------------------------------------------------

namespace detail {

inline void write_header(BinaryWriter& w, std::uint32_t kind, const EncoderConfig& c) {
  w.bytes(kModelMagic, sizeof kModelMagic);
  w.u32(kModelFormatVersion);
  w.u32(kind);
  w.u64(c.vocab_size);
  w.u64(c.max_len);
  w.u64(c.hidden_size);
  w.u64(c.num_layers);
  w.u64(c.kernel_radius);
  w.u64(c.seed);
}

inline EncoderConfig read_header(BinaryReader& r, std::uint32_t expected_kind) {
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kModelMagic, sizeof magic) != 0) r.fail("bad magic");
  const auto version = r.u32();
  if (version != kModelFormatVersion) r.fail("unsupported format version " + std::to_string(version));
  const auto kind = r.u32();
  if (kind != expected_kind) r.fail("unexpected container kind " + std::to_string(kind));
  EncoderConfig c;
  c.vocab_size = r.u64();
  c.max_len = r.u64();
  c.hidden_size = r.u64();
  c.num_layers = r.u64();
  c.kernel_radius = r.u64();
  c.seed = r.u64();
  if (c.vocab_size > (1u << 26) || c.max_len > (1u << 16) || c.hidden_size > (1u << 14) ||
      c.num_layers > 256 || c.kernel_radius > 64) {
    r.fail("implausible encoder config");
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
  return c;
}

template <typename P>
std::uint32_t count_tensors(const P& p) {
  std::uint32_t n = 0;
  p.visit([&](const std::string&, std::span<const double>) { ++n; });
  return n;
}

}  // namespace detail

inline constexpr std::uint32_t kKindEncoder = 0;
inline constexpr std::uint32_t kKindModel = 1;

inline void write_encoder(std::ostream& out, const EncoderParams& p) {
  BinaryWriter w(out);
  detail::write_header(w, kKindEncoder, p.cfg);
  w.u32(detail::count_tensors(p));
  p.visit([&](const std::string& name, std::span<const double> v) { w.tensor(name, v); });
}

inline EncoderParams read_encoder(std::istream& in, const std::string& source = "<stream>") {
  BinaryReader r(in, source);
  EncoderParams p = EncoderParams::zeros(detail::read_header(r, kKindEncoder));
  if (r.u32() != detail::count_tensors(p)) r.fail("tensor count mismatch");
  p.visit([&](const std::string& name, std::span<double> v) { r.tensor(name, v); });
  return p;
}

// Model container: header, u32 strategy, u32 head count, head keys, tensors.
inline void write_model(std::ostream& out, const ModelParams& m) {
  BinaryWriter w(out);
  detail::write_header(w, kKindModel, m.encoder.cfg);
  w.u32(static_cast<std::uint32_t>(m.strategy));
  w.u32(static_cast<std::uint32_t>(m.heads.size()));
  for (const auto& [key, h] : m.heads) w.str(key);
  w.u32(detail::count_tensors(m));
  m.visit([&](const std::string& name, std::span<const double> v) { w.tensor(name, v); });
}

inline ModelParams read_model(std::istream& in, const std::string& source = "<stream>") {
  BinaryReader r(in, source);
  ModelParams m;
  m.encoder = EncoderParams::zeros(detail::read_header(r, kKindModel));
  const auto strategy = r.u32();
  if (strategy > static_cast<std::uint32_t>(FeatureStrategy::kProj4)) r.fail("unknown strategy");
  m.strategy = static_cast<FeatureStrategy>(strategy);
  m.proj = Projection::zeros(m.encoder.cfg.hidden_size);
  const auto n_heads = r.u32();
  if (n_heads > 100000) r.fail("implausible head count");
  const auto d = static_cast<Eigen::Index>(m.feature_size());
  for (std::uint32_t i = 0; i < n_heads; ++i) {
    m.heads[r.str()] = Head{Vector::Zero(d), 0.0};
  }
  if (r.u32() != detail::count_tensors(m)) r.fail("tensor count mismatch");
  m.visit([&](const std::string& name, std::span<double> v) { r.tensor(name, v); });
  bool finite = true;
  m.visit([&](const std::string&, std::span<const double> v) {
    for (double x : v) finite = finite && std::isfinite(x);
  });
  if (!finite) r.fail("non-finite parameter values");
  return m;
}

inline void save_model(const std::string& path, const ModelParams& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model: " + path);
  write_model(out, m);
}

inline ModelParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model: " + path);
  return read_model(in, path);
}

}  // namespace tweetslot
