#pragma once

#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "tweetslot/model.hpp"

namespace tweetslot::testing {

inline MaskedInstance make_instance(std::vector<TokenId> ids, std::size_t marker, SubtaskId subtask,
                                    int label, std::size_t max_len) {
  MaskedInstance m;
  m.tweet_id = "t";
  m.subtask = std::move(subtask);
  m.label = label;
  m.length = ids.size();
  m.marker_pos = marker;
  m.close_pos = marker + 1;
  m.token_ids = std::move(ids);
  m.token_ids.resize(max_len, Vocab::kPad);
  return m;
}

// Random sequences with <E> somewhere; tokens drawn from [kNumReserved, vocab).
inline std::vector<MaskedInstance> random_instances(std::mt19937_64& rng, std::size_t count,
                                                    const EncoderConfig& cfg,
                                                    std::span<const SubtaskId> subtasks) {
  std::vector<MaskedInstance> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = 3 + rng() % (cfg.max_len - 3 + 1);
    std::vector<TokenId> ids(n);
    for (auto& id : ids) {
      id = static_cast<TokenId>(Vocab::kNumReserved +
                                rng() % (cfg.vocab_size - Vocab::kNumReserved));
    }
    const std::size_t marker = rng() % (n - 1);
    ids[marker] = Vocab::kEntityOpen;
    ids[marker + 1 + rng() % (n - marker - 1)] = Vocab::kEntityClose;
    out.push_back(make_instance(ids, marker, subtasks[rng() % subtasks.size()],
                                static_cast<int>(rng() % 2), cfg.max_len));
  }
  return out;
}

struct ModelGradCheck {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::map<std::string, std::size_t> checked_per_group;  // group -> entries with nonzero grad
};

inline std::string tensor_group(const std::string& name) {
  if (name.starts_with("encoder.token_embedding") || name.starts_with("encoder.position_embedding")) {
    return "embeddings";
  }
  if (name.starts_with("encoder.layer")) return "layers";
  if (name.starts_with("proj")) return "proj4";
  return "heads";
}

// Compares loss_and_grad against central differences (eps = 1e-4) for every
// parameter entry of the model.
inline ModelGradCheck check_model_gradient(ModelParams& m, std::span<const MaskedInstance> batch,
                                           const TrainConfig& cfg) {
  ModelParams grad = m.zeros_like();
  loss_and_grad(m, batch, cfg, grad);
  std::vector<std::span<double>> params;
  std::vector<std::span<const double>> grads;
  std::vector<std::string> names;
  m.visit([&](const std::string& n, std::span<double> s) {
    params.push_back(s);
    names.push_back(n);
  });
  grad.visit([&](const std::string&, std::span<const double> s) { grads.push_back(s); });

  ModelGradCheck r;
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t i = 0; i < params[t].size(); ++i) {
      const double num = central_difference(params[t][i], 1e-4, [&] { return loss(m, batch, cfg); });
      const double err = relative_error(grads[t][i], num);
      if (err > r.max_rel_error) {
        r.max_rel_error = err;
        r.worst_tensor = names[t] + "[" + std::to_string(i) + "]";
      }
      if (grads[t][i] != 0.0) ++r.checked_per_group[tensor_group(names[t])];
    }
  }
  return r;
}

}  // namespace tweetslot::testing
