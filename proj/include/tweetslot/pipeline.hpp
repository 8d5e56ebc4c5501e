#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "corpus.hpp"
#include "ensemble.hpp"
#include "error.hpp"
#include "json.hpp"
#include "log.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "nerfilter.hpp"
#include "predictions_io.hpp"
#include "preprocess.hpp"
#include "trainer.hpp"

namespace tweetslot {

enum class Stage { kPreprocess, kTrain, kEnsemble, kPostprocess, kEvaluate, kAblate };

inline constexpr std::array<Stage, 6> kAllStages = {Stage::kPreprocess, Stage::kTrain,
                                                    Stage::kEnsemble,   Stage::kPostprocess,
                                                    Stage::kEvaluate,   Stage::kAblate};

inline std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::kPreprocess: return "preprocess";
    case Stage::kTrain: return "train";
    case Stage::kEnsemble: return "ensemble";
    case Stage::kPostprocess: return "postprocess";
    case Stage::kEvaluate: return "evaluate";
    case Stage::kAblate: return "ablate";
  }
  return "";
}

// Artifact locations under the output directory.
struct RunLayout {
  std::filesystem::path root;

  std::filesystem::path split_dir() const { return root / "split"; }
  std::filesystem::path train_split() const { return split_dir() / "train.jsonl"; }
  std::filesystem::path validation_split() const { return split_dir() / "validation.jsonl"; }
  std::filesystem::path split_manifest() const { return split_dir() / "manifest.json"; }
  std::filesystem::path models_dir() const { return root / "models"; }
  std::filesystem::path model_manifest() const { return models_dir() / "manifest.tsv"; }
  std::filesystem::path predictions_dir() const { return root / "predictions"; }
  std::filesystem::path ensemble_predictions() const { return predictions_dir() / "ensemble.jsonl"; }
  std::filesystem::path ensemble_members() const { return predictions_dir() / "ensemble_members.tsv"; }
  std::filesystem::path filtered_predictions() const { return predictions_dir() / "filtered.jsonl"; }
  std::filesystem::path reports_dir() const { return root / "reports"; }
  std::filesystem::path report(const std::string& name, const std::string& ext) const {
    return reports_dir() / (name + ext);
  }
  std::filesystem::path ablation() const { return reports_dir() / "ablation.txt"; }
  std::filesystem::path run_manifest() const { return root / "run_manifest.json"; }
  std::filesystem::path lock() const { return root / ".lock"; }
};

inline std::string member_name(FeatureStrategy s, std::uint64_t pool_seed) {
  return std::string(to_string(s)) + "-s" + std::to_string(pool_seed);
}

// Exclusive ownership of an output directory for the lifetime of the object.
class OutputLock {
 public:
  explicit OutputLock(const RunLayout& layout) : path_(layout.lock()) {
    std::filesystem::create_directories(layout.root);
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (f == nullptr) {
      throw ConfigError("output directory is locked (remove " + path_.string() +
                        " if no other run is active)");
    }
    std::fclose(f);
  }
  ~OutputLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path path_;
};

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << text;
}

inline Corpus eval_corpus(const PipelineConfig& cfg, const RunLayout& layout,
                          const SubtaskRegistry& reg) {
  if (!cfg.eval_path.empty()) return load_corpus(cfg.eval_path, reg);
  return load_corpus(layout.validation_split().string(), reg);
}

inline void require(const std::filesystem::path& p, std::string_view stage) {
  if (!std::filesystem::exists(p)) {
    throw DataError("missing input " + p.string() + " (run the " + std::string(stage) +
                    " stage first)");
  }
}

inline std::string report_text(const MetricsReport& r) { return render_table(r); }

}  // namespace detail

// ---- stages ----------------------------------------------------------------

inline void stage_preprocess(const PipelineConfig& cfg, const RunLayout& layout) {
  const auto reg = cfg.registry();
  const Corpus corpus = load_corpus(cfg.corpus_path, reg);
  const auto parts = split(corpus, {cfg.train_fraction, cfg.seed});
  std::filesystem::create_directories(layout.split_dir());
  save_corpus(layout.train_split().string(), parts.train);
  save_corpus(layout.validation_split().string(), parts.validation);
  nlohmann::ordered_json m;
  m["seed"] = cfg.seed;
  m["train_fraction"] = cfg.train_fraction;
  m["source_corpus_id"] = corpus_id(corpus);
  m["train"] = {{"tweets", parts.train.size()}, {"corpus_id", corpus_id(parts.train)}};
  m["validation"] = {{"tweets", parts.validation.size()},
                     {"corpus_id", corpus_id(parts.validation)}};
  detail::write_text(layout.split_manifest(), m.dump(2) + "\n");
  log::info("preprocess: " + std::to_string(parts.train.size()) + " train / " +
            std::to_string(parts.validation.size()) + " validation tweets");
}

inline void stage_train(const PipelineConfig& cfg, const RunLayout& layout) {
  detail::require(layout.train_split(), "preprocess");
  detail::require(layout.validation_split(), "preprocess");
  const auto reg = cfg.registry();
  const auto clean = cfg.clean();
  const Vocab vocab(cfg.vocab_size);
  const auto train_set = mask_corpus(load_corpus(layout.train_split().string(), reg), vocab, clean,
                                     cfg.encoder.max_len, reg);
  const auto val_set = mask_corpus(load_corpus(layout.validation_split().string(), reg), vocab,
                                   clean, cfg.encoder.max_len, reg);
  std::filesystem::create_directories(layout.models_dir());

  std::vector<std::pair<std::string, double>> rows;
  for (const auto& run : cfg.ensemble().pool) {
    const std::string name = member_name(run.strategy, run.seed);
    EncoderConfig ec = cfg.encoder;
    ec.seed = cfg.member_seed(run.seed);
    TrainConfig tc = cfg.train;
    tc.seed = ec.seed;
    log::info("train: member " + name);
    const auto result = train(train_set, val_set, init_model(ec, run.strategy, reg), tc);
    save_model((layout.models_dir() / (name + ".bin")).string(), result.best);
    std::ofstream csv(layout.models_dir() / (name + ".log.csv"), std::ios::binary);
    write_train_log(csv, result.log);
    rows.emplace_back(name + ".bin", result.best_val_micro_f1);
  }
  std::ofstream manifest(layout.model_manifest(), std::ios::binary);
  write_manifest(manifest, rows);
}

inline void stage_ensemble(const PipelineConfig& cfg, const RunLayout& layout) {
  detail::require(layout.model_manifest(), "train");
  const auto reg = cfg.registry();
  const auto entries = load_manifest(layout.model_manifest().string());
  std::vector<double> scores;
  for (const auto& e : entries) scores.push_back(e.val_micro_f1);
  const auto top = select_top(scores, cfg.k);
  std::vector<ModelParams> members;
  std::ostringstream chosen;
  chosen << "# model_path\tval_micro_f1\n";
  for (auto i : top) {
    members.push_back(load_model(entries[i].model_path));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", entries[i].val_micro_f1);
    chosen << std::filesystem::path(entries[i].model_path).filename().string() << '\t' << buf
           << '\n';
  }
  const auto gold = detail::eval_corpus(cfg, layout, reg);
  const auto instances = mask_corpus(gold, Vocab(cfg.vocab_size), cfg.clean(), cfg.encoder.max_len, reg);
  const auto preds = ensemble_predict(members, instances, cfg.train.threshold);
  std::filesystem::create_directories(layout.predictions_dir());
  save_predictions(layout.ensemble_predictions().string(), preds, false);
  detail::write_text(layout.ensemble_members(), chosen.str());
}

inline void stage_postprocess(const PipelineConfig& cfg, const RunLayout& layout) {
  detail::require(layout.ensemble_predictions(), "ensemble");
  if (cfg.gazetteer_dir.empty()) throw ConfigError("postprocess.gazetteer is not set");
  const auto gaz = load_gazetteer(cfg.gazetteer_dir);
  const auto type_map =
      cfg.type_map_path.empty() ? TypeMap::defaults() : TypeMap::load(cfg.type_map_path);
  const auto preds = load_predictions(layout.ensemble_predictions().string());
  save_predictions(layout.filtered_predictions().string(), filter(preds, type_map, gaz), true);
}

// Scores a predictions file; model id is the file stem.
inline MetricsReport evaluate_file(const std::string& predictions, const Corpus& gold,
                                   const SubtaskRegistry& reg, bool filtered) {
  const auto preds = load_predictions(predictions);
  return score(preds, gold, reg, std::filesystem::path(predictions).stem().string(), filtered);
}

inline void write_report(const MetricsReport& r, const std::filesystem::path& json_path,
                         const std::filesystem::path& text_path) {
  detail::write_text(json_path, to_json(r).dump(2) + "\n");
  detail::write_text(text_path, render_table(r));
}

inline void stage_evaluate(const PipelineConfig& cfg, const RunLayout& layout) {
  detail::require(layout.ensemble_predictions(), "ensemble");
  detail::require(layout.filtered_predictions(), "postprocess");
  const auto reg = cfg.registry();
  const auto gold = detail::eval_corpus(cfg, layout, reg);
  std::filesystem::create_directories(layout.reports_dir());
  const auto plain = evaluate_file(layout.ensemble_predictions().string(), gold, reg, false);
  const auto filtered = evaluate_file(layout.filtered_predictions().string(), gold, reg, true);
  write_report(plain, layout.report("unfiltered", ".json"), layout.report("unfiltered", ".txt"));
  write_report(filtered, layout.report("filtered", ".json"), layout.report("filtered", ".txt"));
  log::info("evaluate: micro-F1 " + std::to_string(plain.micro_f1()) + " unfiltered, " +
            std::to_string(filtered.micro_f1()) + " filtered");
}

inline MetricsReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open report: " + path);
  try {
    return report_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline constexpr std::string_view kAblationLabelA = "no-filter";
inline constexpr std::string_view kAblationLabelB = "filter";

inline void stage_ablate(const PipelineConfig&, const RunLayout& layout) {
  detail::require(layout.report("unfiltered", ".json"), "evaluate");
  detail::require(layout.report("filtered", ".json"), "evaluate");
  const auto a = load_report(layout.report("unfiltered", ".json").string());
  const auto b = load_report(layout.report("filtered", ".json").string());
  const auto c = compare(a, b, std::string(kAblationLabelA), std::string(kAblationLabelB));
  detail::write_text(layout.ablation(), render_comparison(c));
}

// ---- run manifest ------------------------------------------------------------

inline nlohmann::ordered_json read_run_manifest(const RunLayout& layout) {
  std::ifstream in(layout.run_manifest());
  if (!in) return nlohmann::ordered_json();
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception&) {
    return nlohmann::ordered_json();
  }
}

// Records a stage outcome. The manifest carries the config hash and every
// seed; a different config hash starts a fresh stage list.
inline void record_stage(const PipelineConfig& cfg, const RunLayout& layout, Stage stage,
                         const std::string& status, const std::string& error = "") {
  auto old = read_run_manifest(layout);
  const std::string hash = cfg.hash();
  nlohmann::ordered_json m;
  m["config_hash"] = hash;
  nlohmann::ordered_json seeds;
  seeds["run"] = cfg.seed;
  seeds["split"] = cfg.seed;
  auto members = nlohmann::ordered_json::array();
  for (const auto& run : cfg.ensemble().pool) {
    members.push_back({{"model", member_name(run.strategy, run.seed) + ".bin"},
                       {"strategy", to_string(run.strategy)},
                       {"seed", cfg.member_seed(run.seed)}});
  }
  seeds["members"] = members;
  m["seeds"] = seeds;
  nlohmann::ordered_json stages;
  const bool same = old.is_object() && old.value("config_hash", "") == hash &&
                    old.contains("stages") && old["stages"].is_object();
  for (auto s : kAllStages) {
    const std::string key(to_string(s));
    stages[key] = same && old["stages"].contains(key) ? old["stages"][key] : "pending";
  }
  stages[std::string(to_string(stage))] = status;
  bool complete = true;
  for (auto s : kAllStages) complete = complete && stages[std::string(to_string(s))] == "done";
  m["stages"] = stages;
  m["partial"] = !complete;
  if (!error.empty()) m["error"] = error;
  std::filesystem::create_directories(layout.root);
  detail::write_text(layout.run_manifest(), m.dump(2) + "\n");
}

// Runs one stage under the lock, recording the outcome. Errors keep their
// type and gain the stage name.
inline void run_stage(const PipelineConfig& cfg, const RunLayout& layout, Stage stage) {
  const std::string name(to_string(stage));
  const auto fail = [&](const std::string& what) {
    const std::string msg = "stage " + name + ": " + what;
    record_stage(cfg, layout, stage, "failed", msg);
    return msg;
  };
  log::info("stage " + name);
  try {
    switch (stage) {
      case Stage::kPreprocess: stage_preprocess(cfg, layout); break;
      case Stage::kTrain: stage_train(cfg, layout); break;
      case Stage::kEnsemble: stage_ensemble(cfg, layout); break;
      case Stage::kPostprocess: stage_postprocess(cfg, layout); break;
      case Stage::kEvaluate: stage_evaluate(cfg, layout); break;
      case Stage::kAblate: stage_ablate(cfg, layout); break;
    }
  } catch (const ConfigError& e) {
    throw ConfigError(fail(e.what()));
  } catch (const DivergenceError& e) {
    throw DivergenceError(fail(e.what()));
  } catch (const DataError& e) {
    throw DataError(fail(e.what()));
  } catch (const std::filesystem::filesystem_error& e) {
    throw DataError(fail(e.what()));
  }
  record_stage(cfg, layout, stage, "done");
}

inline void run_stages(const PipelineConfig& cfg, std::span<const Stage> stages) {
  cfg.validate();
  const RunLayout layout{cfg.output_dir};
  OutputLock lock(layout);
  for (auto s : stages) run_stage(cfg, layout, s);
}

inline void run_pipeline(const PipelineConfig& cfg) { run_stages(cfg, kAllStages); }

}  // namespace tweetslot
