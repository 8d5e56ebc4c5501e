#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "encoder.hpp"
#include "error.hpp"
#include "random.hpp"
#include "tensor.hpp"

namespace tweetslot {

// How the classifier input is read off the <E> position.
enum class FeatureStrategy : std::uint8_t {
  kLast = 0,     // last layer
  kSum4 = 1,     // elementwise sum of the last four layers
  kConcat4 = 2,  // last four layers concatenated, oldest first
  kProj4 = 3,    // each of the last four projected to H/4, concatenated
};

inline constexpr std::array<FeatureStrategy, 4> kAllStrategies = {
    FeatureStrategy::kLast, FeatureStrategy::kSum4, FeatureStrategy::kConcat4,
    FeatureStrategy::kProj4};

inline std::string_view to_string(FeatureStrategy s) {
  switch (s) {
    case FeatureStrategy::kLast: return "last";
    case FeatureStrategy::kSum4: return "sum4";
    case FeatureStrategy::kConcat4: return "concat4";
    case FeatureStrategy::kProj4: return "proj4";
  }
  return "";
}

inline std::optional<FeatureStrategy> parse_strategy(std::string_view s) {
  for (auto f : kAllStrategies) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

inline std::size_t feature_dim(FeatureStrategy s, std::size_t hidden) {
  return s == FeatureStrategy::kConcat4 ? 4 * hidden : hidden;
}

// Per-layer affine maps H -> H/4 used by kProj4. Index 0 is layer L-3.
struct Projection {
  std::array<Matrix, 4> weight;
  std::array<Vector, 4> bias;

  static Projection zeros(std::size_t hidden) {
    Projection p;
    const auto q = static_cast<Eigen::Index>(hidden / 4);
    for (int k = 0; k < 4; ++k) {
      p.weight[k] = Matrix::Zero(q, static_cast<Eigen::Index>(hidden));
      p.bias[k] = Vector::Zero(q);
    }
    return p;
  }

  static Projection random(std::size_t hidden, Rng& rng) {
    Projection p = zeros(hidden);
    const double scale = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (auto& w : p.weight) {
      for (auto& v : as_span(w)) v = uniform_symmetric(rng, scale);
    }
    return p;
  }

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
    for (int k = 0; k < 4; ++k) {
      f("proj" + std::to_string(k) + ".weight", as_span(self.weight[k]));
      f("proj" + std::to_string(k) + ".bias", as_span(self.bias[k]));
    }
  }
};

namespace detail {

inline void check_extract(const EncoderOutput& enc, std::size_t marker_pos) {
  if (enc.hidden.size() < 4) {
    throw DataError("feature extraction needs at least 4 layers, got " +
                    std::to_string(enc.hidden.size()));
  }
  if (marker_pos >= static_cast<std::size_t>(enc.hidden.back().rows())) {
    throw DataError("marker position " + std::to_string(marker_pos) + " out of range");
  }
}

}  // namespace detail

// The four marker rows, oldest (layer L-3) first.
inline std::array<Vector, 4> marker_rows(const EncoderOutput& enc, std::size_t marker_pos) {
  detail::check_extract(enc, marker_pos);
  const std::size_t L = enc.hidden.size();
  std::array<Vector, 4> rows;
  for (std::size_t k = 0; k < 4; ++k) {
    rows[k] = enc.hidden[L - 4 + k].row(static_cast<Eigen::Index>(marker_pos)).transpose();
  }
  return rows;
}

inline Vector extract_from_rows(FeatureStrategy s, const std::array<Vector, 4>& rows,
                                const Projection* proj) {
  const auto h = rows[0].size();
  switch (s) {
    case FeatureStrategy::kLast:
      return rows[3];
    case FeatureStrategy::kSum4:
      return rows[0] + rows[1] + rows[2] + rows[3];
    case FeatureStrategy::kConcat4: {
      Vector out(4 * h);
      for (int k = 0; k < 4; ++k) out.segment(k * h, h) = rows[k];
      return out;
    }
    case FeatureStrategy::kProj4: {
      if (proj == nullptr) throw ConfigError("proj4 strategy needs projection parameters");
      const auto q = h / 4;
      Vector out(h);
      for (int k = 0; k < 4; ++k) {
        out.segment(k * q, q) = proj->weight[k] * rows[k] + proj->bias[k];
      }
      return out;
    }
  }
  return {};
}

inline Vector extract(FeatureStrategy s, const EncoderOutput& enc, std::size_t marker_pos,
                      const Projection* proj = nullptr) {
  return extract_from_rows(s, marker_rows(enc, marker_pos), proj);
}

// Adjoint of extract: returns d/d(marker rows), oldest first, and accumulates
// projection gradients into proj_grad for kProj4.
inline std::array<Vector, 4> extract_backward_rows(FeatureStrategy s,
                                                   const std::array<Vector, 4>& rows,
                                                   const Vector& upstream,
                                                   const Projection* proj,
                                                   Projection* proj_grad) {
  const auto h = rows[0].size();
  if (static_cast<std::size_t>(upstream.size()) != feature_dim(s, static_cast<std::size_t>(h))) {
    throw DataError("upstream gradient has dimension " + std::to_string(upstream.size()) +
                    ", expected " + std::to_string(feature_dim(s, static_cast<std::size_t>(h))));
  }
  std::array<Vector, 4> g;
  for (auto& v : g) v = Vector::Zero(h);
  switch (s) {
    case FeatureStrategy::kLast:
      g[3] = upstream;
      break;
    case FeatureStrategy::kSum4:
      for (auto& v : g) v = upstream;
      break;
    case FeatureStrategy::kConcat4:
      for (int k = 0; k < 4; ++k) g[k] = upstream.segment(k * h, h);
      break;
    case FeatureStrategy::kProj4: {
      if (proj == nullptr) throw ConfigError("proj4 strategy needs projection parameters");
      const auto q = h / 4;
      for (int k = 0; k < 4; ++k) {
        const Vector gk = upstream.segment(k * q, q);
        g[k] = proj->weight[k].transpose() * gk;
        if (proj_grad != nullptr) {
          proj_grad->weight[k].noalias() += gk * rows[k].transpose();
          proj_grad->bias[k] += gk;
        }
      }
      break;
    }
  }
  return g;
}

inline std::array<Vector, 4> extract_backward(FeatureStrategy s, const EncoderOutput& enc,
                                              std::size_t marker_pos, const Vector& upstream,
                                              const Projection* proj = nullptr,
                                              Projection* proj_grad = nullptr) {
  return extract_backward_rows(s, marker_rows(enc, marker_pos), upstream, proj, proj_grad);
}

}  // namespace tweetslot
