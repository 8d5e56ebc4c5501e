#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "preprocess.hpp"
#include "random.hpp"
#include "tensor.hpp"

namespace tweetslot {

struct EncoderConfig {
  std::size_t num_layers = 4;
  std::size_t hidden_size = 32;
  std::size_t vocab_size = 4096;
  std::size_t max_len = kDefaultMaxLen;
  // Each layer mixes positions t-r .. t+r.
  std::size_t kernel_radius = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (num_layers < 4) throw ConfigError("encoder.num_layers must be >= 4");
    if (hidden_size == 0 || hidden_size % 4 != 0) {
      throw ConfigError("encoder.hidden_size must be a positive multiple of 4");
    }
    if (vocab_size <= static_cast<std::size_t>(Vocab::kNumReserved)) {
      throw ConfigError("encoder.vocab_size too small");
    }
    if (max_len < 2) throw ConfigError("encoder.max_len must be >= 2");
  }

  // How far (in positions) information can travel into one top-layer state.
  std::size_t receptive_radius() const { return num_layers * kernel_radius; }

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

// Token + position embeddings feed a stack of residual layers
//   h'[t] = h[t] + tanh(b + sum_{o=-r..r} W_o h[t+o])
// evaluated only at non-pad positions; pad rows are zero and contribute
// nothing to their neighbours.
struct EncoderParams {
  struct Layer {
    std::vector<Matrix> taps;  // 2r+1 matrices H x H, tap o stored at o + r
    Vector bias;
  };

  EncoderConfig cfg;
  Matrix token_embedding;     // V x H
  Matrix position_embedding;  // max_len x H
  std::vector<Layer> layers;

  static EncoderParams zeros(const EncoderConfig& cfg) {
    cfg.validate();
    const auto h = static_cast<Eigen::Index>(cfg.hidden_size);
    EncoderParams p;
    p.cfg = cfg;
    p.token_embedding = Matrix::Zero(static_cast<Eigen::Index>(cfg.vocab_size), h);
    p.position_embedding = Matrix::Zero(static_cast<Eigen::Index>(cfg.max_len), h);
    p.layers.resize(cfg.num_layers);
    for (auto& l : p.layers) {
      l.taps.assign(2 * cfg.kernel_radius + 1, Matrix::Zero(h, h));
      l.bias = Vector::Zero(h);
    }
    return p;
  }

  // Visits every tensor in serialization order with (name, span of values).
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
    f(std::string("encoder.token_embedding"), as_span(self.token_embedding));
    f(std::string("encoder.position_embedding"), as_span(self.position_embedding));
    for (std::size_t l = 0; l < self.layers.size(); ++l) {
      const std::string prefix = "encoder.layer" + std::to_string(l);
      for (std::size_t k = 0; k < self.layers[l].taps.size(); ++k) {
        f(prefix + ".tap" + std::to_string(k), as_span(self.layers[l].taps[k]));
      }
      f(prefix + ".bias", as_span(self.layers[l].bias));
    }
  }
};

// Weights uniform in [-1/sqrt(H), 1/sqrt(H)), drawn in visit order from
// Rng(cfg.seed); biases zero.
inline EncoderParams init_params(const EncoderConfig& cfg) {
  EncoderParams p = EncoderParams::zeros(cfg);
  Rng rng(cfg.seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_size));
  p.visit([&](const std::string& name, std::span<double> values) {
    if (name.ends_with(".bias")) return;
    for (auto& v : values) v = uniform_symmetric(rng, scale);
  });
  return p;
}

struct EncoderOutput {
  // hidden[l] is the output of layer l+1 (embedding layer excluded), len x H.
  std::vector<Matrix> hidden;
};

// Forward pass plus what backward needs.
struct EncoderTrace {
  Matrix input;                 // embedding sum, len x H
  std::vector<Matrix> hidden;   // per layer output
  std::vector<Matrix> act;      // per layer tanh(pre-activation)
  std::vector<bool> mask;
  std::size_t offset = 0;
};

namespace detail {

inline void check_ids(const EncoderParams& p, std::span<const TokenId> ids, std::size_t offset) {
  if (offset + ids.size() > p.cfg.max_len) {
    throw DataError("sequence of length " + std::to_string(ids.size()) + " at offset " +
                    std::to_string(offset) + " exceeds max_len " + std::to_string(p.cfg.max_len));
  }
  for (auto id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= p.cfg.vocab_size) {
      throw DataError("token id " + std::to_string(id) + " out of range");
    }
  }
}

}  // namespace detail

// Runs the encoder over ids placed at positions offset .. offset+len-1.
inline EncoderTrace trace_forward(const EncoderParams& p, std::span<const TokenId> ids,
                                  std::size_t offset = 0) {
  detail::check_ids(p, ids, offset);
  const auto n = static_cast<Eigen::Index>(ids.size());
  const auto h = static_cast<Eigen::Index>(p.cfg.hidden_size);
  const auto r = static_cast<Eigen::Index>(p.cfg.kernel_radius);

  EncoderTrace tr;
  tr.offset = offset;
  tr.mask.resize(ids.size());
  tr.input = Matrix::Zero(n, h);
  for (Eigen::Index t = 0; t < n; ++t) {
    tr.mask[t] = ids[t] != Vocab::kPad;
    if (tr.mask[t]) {
      tr.input.row(t) = p.token_embedding.row(ids[t]) +
                        p.position_embedding.row(static_cast<Eigen::Index>(offset) + t);
    }
  }

  const Matrix* prev = &tr.input;
  for (const auto& layer : p.layers) {
    Matrix pre = Matrix::Zero(n, h);
    for (Eigen::Index o = -r; o <= r; ++o) {
      // rows t with 0 <= t+o < n
      const Eigen::Index lo = std::max<Eigen::Index>(0, -o);
      const Eigen::Index hi = std::min<Eigen::Index>(n, n - o);
      if (hi <= lo) continue;
      pre.middleRows(lo, hi - lo).noalias() +=
          prev->middleRows(lo + o, hi - lo) * layer.taps[o + r].transpose();
    }
    pre.rowwise() += layer.bias.transpose();
    Matrix act = pre.array().tanh().matrix();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!tr.mask[t]) act.row(t).setZero();
    }
    tr.hidden.push_back(*prev + act);
    tr.act.push_back(std::move(act));
    prev = &tr.hidden.back();
  }
  return tr;
}

inline EncoderOutput forward(const EncoderParams& p, std::span<const TokenId> ids,
                             std::size_t offset = 0) {
  return {trace_forward(p, ids, offset).hidden};
}

// Accumulates into grad the exact gradient given dLoss/d(hidden[l]) for every
// layer (upstream.size() == num_layers, each len x H).
inline void backward(const EncoderParams& p, std::span<const TokenId> ids, const EncoderTrace& tr,
                     const std::vector<Matrix>& upstream, EncoderParams& grad) {
  const auto n = static_cast<Eigen::Index>(ids.size());
  const auto h = static_cast<Eigen::Index>(p.cfg.hidden_size);
  const auto r = static_cast<Eigen::Index>(p.cfg.kernel_radius);
  const std::size_t L = p.layers.size();
  if (upstream.size() != L) {
    throw DataError("upstream gradient has " + std::to_string(upstream.size()) +
                    " layers, expected " + std::to_string(L));
  }
  for (const auto& g : upstream) {
    if (g.rows() != n || g.cols() != h) throw DataError("upstream gradient shape mismatch");
  }

  Matrix g = upstream[L - 1];
  for (std::size_t li = L; li-- > 0;) {
    const auto& layer = p.layers[li];
    const Matrix& prev = li == 0 ? tr.input : tr.hidden[li - 1];
    auto& glayer = grad.layers[li];

    Matrix ga = g.array() * (1.0 - tr.act[li].array().square());
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!tr.mask[t]) ga.row(t).setZero();
    }
    glayer.bias += ga.colwise().sum().transpose();

    Matrix gprev = g;
    for (Eigen::Index o = -r; o <= r; ++o) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, -o);
      const Eigen::Index hi = std::min<Eigen::Index>(n, n - o);
      if (hi <= lo) continue;
      glayer.taps[o + r].noalias() +=
          ga.middleRows(lo, hi - lo).transpose() * prev.middleRows(lo + o, hi - lo);
      gprev.middleRows(lo + o, hi - lo).noalias() +=
          ga.middleRows(lo, hi - lo) * layer.taps[o + r];
    }
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!tr.mask[t]) gprev.row(t).setZero();
    }
    if (li > 0) gprev += upstream[li - 1];
    g = std::move(gprev);
  }

  for (Eigen::Index t = 0; t < n; ++t) {
    if (!tr.mask[t]) continue;
    grad.token_embedding.row(ids[t]) += g.row(t);
    grad.position_embedding.row(static_cast<Eigen::Index>(tr.offset) + t) += g.row(t);
  }
}

// Convenience form that recomputes the forward pass.
inline EncoderParams backward(const EncoderParams& p, std::span<const TokenId> ids,
                              const std::vector<Matrix>& upstream, std::size_t offset = 0) {
  EncoderParams grad = EncoderParams::zeros(p.cfg);
  backward(p, ids, trace_forward(p, ids, offset), upstream, grad);
  return grad;
}

}  // namespace tweetslot
