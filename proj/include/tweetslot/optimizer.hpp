#pragma once

#include <cmath>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "model.hpp"

namespace tweetslot {

// AdamW with decoupled weight decay and global-norm gradient clipping.
// Tensors without a gradient in a step (heads of subtasks absent from the
// batch) are skipped entirely: no moment update, no decay, no step count.
class AdamW {
 public:
  AdamW(const ModelParams& like, const TrainConfig& cfg)
      : cfg_(cfg), m_(like.zeros_like()), v_(like.zeros_like()) {
    std::size_t n = 0;
    like.visit([&](const std::string&, std::span<const double>) { ++n; });
    steps_.assign(n, 0);
  }

  // Returns the pre-clipping global gradient norm.
  double step(ModelParams& params, ModelParams& grad, const std::set<std::string>& touched_heads) {
    std::vector<std::span<double>> p, g, m, v;
    std::vector<bool> active;
    params.visit([&](const std::string& name, std::span<double> s) {
      p.push_back(s);
      active.push_back(is_active(name, touched_heads));
    });
    grad.visit([&](const std::string&, std::span<double> s) { g.push_back(s); });
    m_.visit([&](const std::string&, std::span<double> s) { m.push_back(s); });
    v_.visit([&](const std::string&, std::span<double> s) { v.push_back(s); });

    double sq = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!active[i]) continue;
      for (double x : g[i]) sq += x * x;
    }
    const double norm = std::sqrt(sq);
    const double scale = cfg_.clip_norm > 0 && norm > cfg_.clip_norm ? cfg_.clip_norm / norm : 1.0;

    const double lr = cfg_.learning_rate;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!active[i]) continue;
      const auto t = static_cast<double>(++steps_[i]);
      const double bc1 = 1.0 - std::pow(cfg_.beta1, t);
      const double bc2 = 1.0 - std::pow(cfg_.beta2, t);
      for (std::size_t j = 0; j < p[i].size(); ++j) {
        const double gj = g[i][j] * scale;
        p[i][j] -= lr * cfg_.weight_decay * p[i][j];
        m[i][j] = cfg_.beta1 * m[i][j] + (1.0 - cfg_.beta1) * gj;
        v[i][j] = cfg_.beta2 * v[i][j] + (1.0 - cfg_.beta2) * gj * gj;
        p[i][j] -= lr * (m[i][j] / bc1) / (std::sqrt(v[i][j] / bc2) + cfg_.epsilon);
      }
    }
    return norm;
  }

 private:
  static bool is_active(const std::string& name, const std::set<std::string>& touched_heads) {
    if (!name.starts_with("head.")) return true;
    // "head.<key>.weight" / "head.<key>.bias"
    const auto last_dot = name.rfind('.');
    return touched_heads.count(name.substr(5, last_dot - 5)) > 0;
  }

  TrainConfig cfg_;
  ModelParams m_;
  ModelParams v_;
  std::vector<std::uint64_t> steps_;
};

}  // namespace tweetslot
