#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "model_fixtures.hpp"
#include "tweetslot/features.hpp"
#include "tweetslot/model.hpp"
#include "tweetslot/optimizer.hpp"
#include "tweetslot/trainer.hpp"

namespace tweetslot {
namespace {

using testing::make_instance;
using testing::random_instances;

const SubtaskId kAge{EventType::kTestedPositive, "age"};
const SubtaskId kWhere{EventType::kTestedPositive, "where"};
const SubtaskId kDeathName{EventType::kDeath, "name"};

EncoderConfig tiny(std::uint64_t seed = 5) {
  EncoderConfig c;
  c.hidden_size = 8;
  c.vocab_size = 48;
  c.max_len = 12;
  c.seed = seed;
  return c;
}

std::vector<double> flatten(const ModelParams& m) {
  std::vector<double> v;
  m.visit([&](const std::string&, std::span<const double> s) { v.insert(v.end(), s.begin(), s.end()); });
  return v;
}

bool bitwise_equal(const ModelParams& a, const ModelParams& b) {
  const auto va = flatten(a), vb = flatten(b);
  return va.size() == vb.size() && std::memcmp(va.data(), vb.data(), va.size() * sizeof(double)) == 0;
}

TEST(ModelParams, OneHeadPerRegisteredSubtask) {
  const auto m = init_model(tiny(), FeatureStrategy::kConcat4);
  EXPECT_EQ(m.heads.size(), 33u);
  for (const auto& [k, h] : m.heads) EXPECT_EQ(h.weight.size(), 32);
}

TEST(PredictLogit, ZeroHeadsGiveHalf) {
  auto m = init_model(tiny(), FeatureStrategy::kSum4);
  for (auto& [k, h] : m.heads) {
    h.weight.setZero();
    h.bias = 0;
  }
  std::mt19937_64 rng(1);
  const SubtaskId subs[] = {kAge, kWhere};
  for (const auto& inst : random_instances(rng, 20, tiny(), subs)) {
    EXPECT_EQ(predict_probability(m, inst), 0.5);
  }
}

TEST(PredictLogit, HeadsDifferOnSharedFeature) {
  std::mt19937_64 rng(2);
  const SubtaskId subs[] = {kAge};
  for (auto strategy : kAllStrategies) {
    const auto m = init_model(tiny(), strategy);
    for (auto inst : random_instances(rng, 10, tiny(), subs)) {
      // Feature recomputed from the full, uncropped sequence.
      const auto enc = forward(m.encoder, inst.token_ids);
      const Vector f = extract(strategy, enc, inst.marker_pos, &m.proj);
      const double la = predict_logit(m, inst);
      inst.subtask = kWhere;
      const double lw = predict_logit(m, inst);
      const auto& ha = m.heads.at(kAge.key());
      const auto& hw = m.heads.at(kWhere.key());
      EXPECT_NEAR(la - lw, (ha.weight - hw.weight).dot(f) + ha.bias - hw.bias, 1e-12);
      EXPECT_NEAR(la, ha.weight.dot(f) + ha.bias, 1e-12);
    }
  }
}

TEST(PredictLogit, ProbabilityStrictlyInsideUnitInterval) {
  std::mt19937_64 rng(3);
  const SubtaskId subs[] = {kAge, kWhere, kDeathName};
  const auto m = init_model(tiny(), FeatureStrategy::kConcat4);
  for (const auto& inst : random_instances(rng, 10000, tiny(), subs)) {
    const double p = predict_probability(m, inst);
    ASSERT_GT(p, 0.0);
    ASSERT_LT(p, 1.0);
  }
}

TEST(PredictLogit, UnknownSubtask) {
  const auto m = init_model(tiny(), FeatureStrategy::kLast);
  auto inst = make_instance({Vocab::kEntityOpen, 9, Vocab::kEntityClose}, 0,
                            {EventType::kDeath, "opinion"}, 0, 12);
  EXPECT_THROW(predict_logit(m, inst), DataError);
}

ModelParams constant_model(double bias) {
  auto m = init_model(tiny(), FeatureStrategy::kLast);
  for (auto& [k, h] : m.heads) {
    h.weight.setZero();
    h.bias = bias;
  }
  return m;
}

TEST(Loss, HalfProbabilityPositive) {
  const auto m = constant_model(0.0);
  const std::vector<MaskedInstance> batch = {
      make_instance({Vocab::kEntityOpen, 9, Vocab::kEntityClose}, 0, kAge, 1, 12)};
  TrainConfig cfg;
  EXPECT_NEAR(loss(m, batch, cfg), 10.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(loss(m, batch, cfg), 6.9315, 5e-5);
}

TEST(Loss, PerfectPredictionIsNearZero) {
  TrainConfig cfg;
  EXPECT_LE(weighted_bce(1.0 - 1e-12, 1, cfg), 1e-11 * cfg.pos_weight);
  // Saturated logits are clamped rather than producing inf.
  const auto m = constant_model(-80.0);
  const std::vector<MaskedInstance> batch = {
      make_instance({Vocab::kEntityOpen, 9, Vocab::kEntityClose}, 0, kAge, 1, 12)};
  EXPECT_NEAR(loss(m, batch, cfg), cfg.pos_weight * -std::log(1e-12), 1e-9);
}

TEST(Loss, EqualWeightsGivePlainBce) {
  TrainConfig cfg;
  cfg.pos_weight = cfg.neg_weight = 1.0;
  for (double p : {0.1, 0.5, 0.93}) {
    EXPECT_DOUBLE_EQ(weighted_bce(p, 1, cfg), -std::log(p));
    EXPECT_DOUBLE_EQ(weighted_bce(p, 0, cfg), -std::log(1 - p));
  }
}

TEST(Loss, DecomposesOverBatch) {
  std::mt19937_64 rng(4);
  const SubtaskId subs[] = {kAge, kWhere};
  const auto m = init_model(tiny(), FeatureStrategy::kProj4);
  const auto batch = random_instances(rng, 7, tiny(), subs);
  TrainConfig cfg;
  double sum = 0;
  for (const auto& inst : batch) {
    sum += class_weight(inst.label, cfg) * (inst.label ? -std::log(predict_probability(m, inst))
                                                       : -std::log(1 - predict_probability(m, inst)));
  }
  EXPECT_NEAR(loss(m, batch, cfg), sum / 7, 1e-12);
}

TEST(Loss, IncreasingPositiveWeightIncreasesLoss) {
  std::mt19937_64 rng(5);
  const SubtaskId subs[] = {kAge};
  const auto m = init_model(tiny(), FeatureStrategy::kSum4);
  for (int trial = 0; trial < 20; ++trial) {
    auto batch = random_instances(rng, 4, tiny(), subs);
    batch[0].label = 1;
    TrainConfig lo, hi;
    lo.pos_weight = 2.0 + trial;
    hi.pos_weight = lo.pos_weight + 0.5;
    EXPECT_LT(loss(m, batch, lo), loss(m, batch, hi));
  }
}

TEST(Loss, EmptyBatch) {
  const auto m = constant_model(0);
  EXPECT_THROW(loss(m, std::span<const MaskedInstance>{}, TrainConfig{}), DataError);
}

class GradientCheck : public ::testing::TestWithParam<FeatureStrategy> {};

TEST_P(GradientCheck, EveryParameterGroupMatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  auto m = init_model(tiny(7), GetParam());
  for (auto& l : m.encoder.layers) {
    for (auto& v : as_span(l.bias)) v = 0.2 * (uniform01(rng) - 0.5);
  }
  const SubtaskId subs[] = {kAge, kWhere, kDeathName};
  const auto batch = random_instances(rng, 4, tiny(), subs);
  TrainConfig cfg;
  auto r = testing::check_model_gradient(m, batch, cfg);
  EXPECT_LE(r.max_rel_error, 1e-4) << "worst: " << r.worst_tensor;
  EXPECT_GT(r.checked_per_group["embeddings"], 0u);
  EXPECT_GT(r.checked_per_group["layers"], 0u);
  EXPECT_GT(r.checked_per_group["heads"], 0u);
  if (GetParam() == FeatureStrategy::kProj4) EXPECT_GT(r.checked_per_group["proj4"], 0u);
}

INSTANTIATE_TEST_SUITE_P(AllStrategies, GradientCheck, ::testing::ValuesIn(kAllStrategies),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(JointSharing, EncoderSharedHeadsIsolated) {
  std::mt19937_64 rng(8);
  const auto m = init_model(tiny(), FeatureStrategy::kConcat4);
  const SubtaskId pos_subs[] = {kAge, kWhere};
  const SubtaskId death_subs[] = {kDeathName};
  auto batch = random_instances(rng, 3, tiny(), pos_subs);
  const auto death = random_instances(rng, 1, tiny(), death_subs);
  batch.push_back(death[0]);
  TrainConfig cfg;

  auto grad_of = [&](const std::vector<MaskedInstance>& b) {
    ModelParams g = m.zeros_like();
    loss_and_grad(m, b, cfg, g);
    return g;
  };
  const auto g0 = grad_of(batch);
  auto perturbed = batch;
  for (auto& inst : perturbed) {
    if (inst.subtask.event == EventType::kTestedPositive) inst.label = 1 - inst.label;
  }
  const auto g1 = grad_of(perturbed);
  EXPECT_NE(g0.encoder.token_embedding, g1.encoder.token_embedding);
  // The DEATH head sees only its own instance, unchanged by the perturbation.
  EXPECT_EQ(g0.heads.at(kDeathName.key()).weight, g1.heads.at(kDeathName.key()).weight);

  std::vector<MaskedInstance> only_positive(batch.begin(), batch.begin() + 3);
  const auto g2 = grad_of(only_positive);
  EXPECT_GT(g2.encoder.token_embedding.norm(), 0.0);
  EXPECT_EQ(g2.heads.at(kDeathName.key()).weight.norm(), 0.0);
  EXPECT_EQ(g2.heads.at(kDeathName.key()).bias, 0.0);
}

// label = 1 iff the token right after <E> is the cue token.
std::vector<MaskedInstance> cue_task(std::mt19937_64& rng, std::size_t n, const EncoderConfig& cfg,
                                     std::span<const SubtaskId> subs) {
  auto out = random_instances(rng, n, cfg, subs);
  const TokenId cue = 20;
  for (auto& inst : out) {
    for (auto& id : inst.token_ids) {
      if (id == cue) id = 21;
    }
    inst.label = static_cast<int>(rng() % 3 == 0);
    inst.token_ids[inst.marker_pos + 1] = inst.label ? cue : 22;
  }
  return out;
}

TEST(Train, SeparableTaskDrivesLossDown) {
  std::mt19937_64 rng(9);
  const auto cfg = tiny(11);
  const SubtaskId subs[] = {kAge, kWhere, kDeathName};
  const auto train_set = cue_task(rng, 200, cfg, subs);
  const auto val_set = cue_task(rng, 60, cfg, subs);
  TrainConfig tc;
  tc.epochs = 50;
  tc.learning_rate = 1e-2;
  tc.seed = 3;
  const auto init = init_model(cfg, FeatureStrategy::kSum4);
  const double initial = loss(init, train_set, tc);
  const auto r = train(train_set, val_set, init, tc);
  ASSERT_EQ(r.log.size(), 50u);
  const double best_loss = std::min_element(r.log.begin(), r.log.end(), [](auto& a, auto& b) {
                             return a.train_loss < b.train_loss;
                           })->train_loss;
  EXPECT_LT(best_loss, 0.1 * initial);
  EXPECT_GT(r.best_val_micro_f1, 0.9);
}

TEST(Train, DeterministicAndUnseenHeadsUntouched) {
  std::mt19937_64 rng(10);
  const auto cfg = tiny(12);
  const SubtaskId subs[] = {kAge, kWhere};
  const auto train_set = cue_task(rng, 64, cfg, subs);
  const auto val_set = cue_task(rng, 16, cfg, subs);
  TrainConfig tc;
  tc.epochs = 3;
  tc.seed = 4;
  const auto init = init_model(cfg, FeatureStrategy::kProj4);
  const auto a = train(train_set, val_set, init, tc);
  const auto b = train(train_set, val_set, init, tc);
  EXPECT_TRUE(bitwise_equal(a.best, b.best));
  for (const auto& [key, h] : init.heads) {
    if (key == kAge.key() || key == kWhere.key()) {
      EXPECT_NE(a.best.heads.at(key).weight, h.weight) << key;
    } else {
      EXPECT_EQ(a.best.heads.at(key).weight, h.weight) << key;
      EXPECT_EQ(a.best.heads.at(key).bias, h.bias) << key;
    }
  }
}

TEST(Train, BestEpochSelectionEarliestOnTies) {
  std::mt19937_64 rng(13);
  const auto cfg = tiny(12);
  const SubtaskId subs[] = {kAge};
  const auto train_set = cue_task(rng, 32, cfg, subs);
  const auto val_set = cue_task(rng, 16, cfg, subs);
  TrainConfig tc;
  tc.epochs = 4;
  const auto r = train(train_set, val_set, init_model(cfg, FeatureStrategy::kLast), tc);
  double best = -1;
  std::size_t best_epoch = 0;
  for (const auto& e : r.log) {
    if (e.val_micro_f1 > best) {
      best = e.val_micro_f1;
      best_epoch = e.epoch;
    }
  }
  EXPECT_EQ(r.best_epoch, best_epoch);
  EXPECT_EQ(r.best_val_micro_f1, best);
}

TEST(Train, NonFiniteLossAborts) {
  std::mt19937_64 rng(14);
  const auto cfg = tiny();
  const SubtaskId subs[] = {kAge};
  const auto set = cue_task(rng, 8, cfg, subs);
  auto init = init_model(cfg, FeatureStrategy::kLast);
  init.encoder.layers[0].bias(0) = std::numeric_limits<double>::quiet_NaN();
  TrainConfig tc;
  tc.epochs = 1;
  try {
    train(set, set, init, tc);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch 1, batch 1"), std::string::npos) << e.what();
  }
}

TEST(Train, RejectsUnregisteredSubtaskAndEmptySets) {
  const auto cfg = tiny();
  const auto init = init_model(cfg, FeatureStrategy::kLast);
  std::vector<MaskedInstance> set = {
      make_instance({Vocab::kEntityOpen, 9, Vocab::kEntityClose}, 0, {EventType::kDeath, "opinion"}, 0, 12)};
  EXPECT_THROW(train(set, set, init, TrainConfig{}), DataError);
  EXPECT_THROW(train({}, set, init, TrainConfig{}), DataError);
}

TEST(Optimizer, AdamWFirstStepMovesByLearningRate) {
  auto m = constant_model(0.0);
  ModelParams g = m.zeros_like();
  g.heads.at(kAge.key()).bias = 0.3;
  TrainConfig tc;
  tc.weight_decay = 0.0;
  AdamW opt(m, tc);
  opt.step(m, g, {kAge.key()});
  // First Adam step is lr * sign(g) (up to epsilon).
  EXPECT_NEAR(m.heads.at(kAge.key()).bias, -tc.learning_rate, 1e-10);
  EXPECT_EQ(m.heads.at(kWhere.key()).bias, 0.0);
}

TEST(Optimizer, ClipsGlobalNorm) {
  auto m = constant_model(0.0);
  ModelParams g = m.zeros_like();
  g.heads.at(kAge.key()).bias = 100.0;
  TrainConfig tc;
  AdamW opt(m, tc);
  EXPECT_DOUBLE_EQ(opt.step(m, g, {kAge.key()}), 100.0);
}

TEST(Predict, EmptyAndThresholdBoundary) {
  const auto m = constant_model(0.0);
  EXPECT_TRUE(predict(m, std::span<const MaskedInstance>{}).empty());
  const std::vector<MaskedInstance> one = {
      make_instance({Vocab::kEntityOpen, 9, Vocab::kEntityClose}, 0, kAge, 0, 12)};
  const auto r = predict(m, one, 0.5);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].probability, 0.5);
  EXPECT_EQ(r[0].decision, 1);
  EXPECT_FALSE(r[0].filtered);
}

TEST(Predict, DecisionsMatchRecomputedProbabilities) {
  std::mt19937_64 rng(15);
  const SubtaskId subs[] = {kAge, kWhere};
  const auto m = init_model(tiny(), FeatureStrategy::kConcat4);
  const auto insts = random_instances(rng, 300, tiny(), subs);
  const auto recs = predict(m, insts, 0.5);
  for (std::size_t i = 0; i < insts.size(); ++i) {
    const auto enc = forward(m.encoder, insts[i].token_ids);
    const Vector f = extract(m.strategy, enc, insts[i].marker_pos, &m.proj);
    const auto& h = m.heads.at(insts[i].subtask.key());
    const double p = 1.0 / (1.0 + std::exp(-(h.weight.dot(f) + h.bias)));
    EXPECT_NEAR(recs[i].probability, p, 1e-12);
    EXPECT_EQ(recs[i].decision, p >= 0.5 ? 1 : 0);
  }
}

TEST(ModelFile, RoundTripIsBitwise) {
  for (auto s : kAllStrategies) {
    const auto m = init_model(tiny(3), s);
    std::stringstream buf;
    write_model(buf, m);
    const auto bytes = buf.str();
    const auto back = read_model(buf);
    EXPECT_EQ(back.strategy, s);
    EXPECT_EQ(back.head_keys(), m.head_keys());
    EXPECT_TRUE(bitwise_equal(back, m));
    std::stringstream again;
    write_model(again, back);
    EXPECT_EQ(again.str(), bytes);
  }
}

TEST(ModelFile, EncoderContainerIsNotAModel) {
  std::stringstream buf;
  write_encoder(buf, init_params(tiny()));
  EXPECT_THROW(read_model(buf), DataError);
}

}  // namespace
}  // namespace tweetslot
