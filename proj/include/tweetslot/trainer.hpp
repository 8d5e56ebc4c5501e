#pragma once

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "log.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "optimizer.hpp"
#include "random.hpp"

namespace tweetslot {

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_micro_f1 = 0.0;
};

struct TrainResult {
  ModelParams best;
  std::size_t best_epoch = 0;
  double best_val_micro_f1 = 0.0;
  std::vector<EpochLog> log;
};

// CSV: epoch,train_loss,val_micro_f1
inline void write_train_log(std::ostream& out, const std::vector<EpochLog>& log) {
  out << "epoch,train_loss,val_micro_f1\n";
  char buf[96];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g\n", e.epoch, e.train_loss, e.val_micro_f1);
    out << buf;
  }
}

// Joint training over instances of every event and subtask at once. Each
// epoch reshuffles the whole training set with one Rng(cfg.seed) stream; the
// returned parameters come from the epoch with the best validation micro-F1
// (earliest on ties).
inline TrainResult train(std::span<const MaskedInstance> train_set,
                         std::span<const MaskedInstance> val_set, ModelParams init,
                         const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.empty()) throw DataError("training set is empty");
  if (val_set.empty()) throw DataError("validation set is empty");
  for (const auto* set : {&train_set, &val_set}) {
    for (const auto& inst : *set) head_for(init, inst.subtask);
  }

  ModelParams params = std::move(init);
  ModelParams grad = params.zeros_like();
  AdamW opt(params, cfg);
  Rng rng(cfg.seed);

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<MaskedInstance> batch;
  batch.reserve(cfg.batch_size);

  TrainResult result;
  result.best_val_micro_f1 = -1.0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    seeded_shuffle(std::span<std::size_t>(order), rng);
    double loss_sum = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      ++batch_no;
      batch.clear();
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_set[order[i]]);

      grad.visit([](const std::string&, std::span<double> s) {
        std::fill(s.begin(), s.end(), 0.0);
      });
      std::set<std::string> touched;
      const double l = loss_and_grad(params, batch, cfg, grad, &touched);
      if (!std::isfinite(l)) {
        throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(batch_no));
      }
      opt.step(params, grad, touched);
      loss_sum += l * static_cast<double>(batch.size());
    }

    const auto preds = predict(params, val_set, cfg.threshold);
    const double f1 = micro_f1_against_labels(preds, val_set);
    const double train_loss = loss_sum / static_cast<double>(train_set.size());
    result.log.push_back({epoch, train_loss, f1});
    log::info("epoch " + std::to_string(epoch) + " loss " + std::to_string(train_loss) +
              " val micro-F1 " + std::to_string(f1));
    if (f1 > result.best_val_micro_f1) {
      result.best_val_micro_f1 = f1;
      result.best_epoch = epoch;
      result.best = params;
    }
  }
  return result;
}

}  // namespace tweetslot
