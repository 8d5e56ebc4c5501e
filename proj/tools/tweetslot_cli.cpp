// Command-line front end: one subcommand per pipeline stage, plus `run` for
// the whole sequence, `predict` for a single model and `synth` for planted-cue
// corpora.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tweetslot/tweetslot.hpp"

namespace fs = std::filesystem;
using namespace tweetslot;

namespace {

struct CommonOptions {
  std::string config;
  std::string output;
  std::optional<std::uint64_t> seed;
  bool no_clean = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool config_required) {
  auto* c = cmd->add_option("--config", o.config, "pipeline config file");
  if (config_required) c->required();
  cmd->add_option("--output", o.output, "output directory (overrides output.dir)");
  cmd->add_option("--seed", o.seed, "run seed (overrides run.seed)");
  cmd->add_flag("--no-clean", o.no_clean, "disable tweet cleaning");
}

PipelineConfig resolve(const CommonOptions& o) {
  PipelineConfig cfg;
  if (!o.config.empty()) cfg = load_config(o.config);
  if (!o.output.empty()) cfg.output_dir = fs::absolute(o.output).lexically_normal().string();
  if (o.seed) cfg.seed = *o.seed;
  if (o.no_clean) cfg.clean_enabled = false;
  if (cfg.verbose) log::enabled() = true;
  return cfg;
}

void print_or_write(const std::string& text, const std::string& out) {
  std::cout << text;
  if (!out.empty()) {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw DataError("cannot write " + out);
    f << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slot filling for event tweets: preprocess, train, ensemble, filter, evaluate"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "log progress to stderr");

  CommonOptions common;

  auto* run = app.add_subcommand("run", "run every stage in order");
  add_common(run, common, true);

  auto* pre = app.add_subcommand("preprocess", "validate the corpus and write the train/validation split");
  add_common(pre, common, true);

  auto* tr = app.add_subcommand("train", "train every pool member on the split");
  add_common(tr, common, true);

  std::string manifest_in, input, out;
  std::optional<std::size_t> k_override;
  auto* ens = app.add_subcommand("ensemble", "majority vote of the top-k pool members");
  add_common(ens, common, true);
  ens->add_option("--manifest", manifest_in, "member manifest (path<TAB>val_micro_f1)");
  ens->add_option("--input", input, "corpus to predict (JSONL)");
  ens->add_option("--out", out, "prediction file to write");
  ens->add_option("--k", k_override, "number of members (odd)");

  auto* post = app.add_subcommand("postprocess", "type-aware filtering of positive predictions");
  add_common(post, common, true);
  post->add_option("--input", input, "prediction file to filter");
  post->add_option("--out", out, "filtered prediction file to write");

  std::string predictions, gold, model_id;
  bool filtered_flag = false;
  auto* eval = app.add_subcommand("evaluate", "per-subtask and micro F1 against gold");
  add_common(eval, common, false);
  eval->add_option("--predictions", predictions, "prediction file to score");
  eval->add_option("--gold", gold, "gold corpus (JSONL)");
  eval->add_option("--out", out, "report path prefix; writes PREFIX.json and PREFIX.txt");
  eval->add_flag("--filtered", filtered_flag, "mark the report as post-processed");

  std::string report_a, report_b, unfiltered_p, filtered_p;
  auto* abl = app.add_subcommand("ablate", "compare unfiltered and filtered results");
  add_common(abl, common, false);
  abl->add_option("--a", report_a, "baseline report (JSON)");
  abl->add_option("--b", report_b, "compared report (JSON)");
  abl->add_option("--unfiltered", unfiltered_p, "unfiltered prediction file");
  abl->add_option("--filtered", filtered_p, "filtered prediction file");
  abl->add_option("--gold", gold, "gold corpus for prediction files");
  abl->add_option("--out", out, "write the table here as well");

  std::string model_path;
  std::optional<double> threshold;
  auto* pred = app.add_subcommand("predict", "predict with one model");
  add_common(pred, common, false);
  pred->add_option("--model", model_path, "model file")->required();
  pred->add_option("--input", input, "corpus to predict (JSONL)")->required();
  pred->add_option("--out", out, "prediction file to write")->required();
  pred->add_option("--threshold", threshold, "decision threshold (default from config or 0.5)");

  SynthConfig synth;
  bool separate_cues = false;
  bool quiet_text = false;
  auto* syn = app.add_subcommand("synth", "write a planted-cue synthetic corpus");
  syn->add_option("--tweets", synth.tweets, "number of tweets");
  syn->add_option("--seed", synth.seed, "generator seed");
  syn->add_option("--confuser-rate", synth.confuser_rate, "share of location chunks behind person cues");
  syn->add_option("--positive-rate", synth.positive_rate, "share of cued positive candidates");
  syn->add_option("--max-positives", synth.max_positives_per_subtask, "cap per subtask (0 = none)");
  syn->add_option("--id-prefix", synth.id_prefix, "tweet id prefix");
  syn->add_flag("--separate-cues", separate_cues, "distinct cue words per event");
  syn->add_flag("--plain", quiet_text, "no mentions, URLs, hashtags or emoji");
  syn->add_option("--out", out, "corpus file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }
  if (verbose) log::enabled() = true;

  try {
    if (*syn) {
      synth.shared_cues = !separate_cues;
      synth.noise = !quiet_text;
      save_corpus(out, generate_synthetic(synth));
      return 0;
    }

    if (*run) {
      run_pipeline(resolve(common));
      return 0;
    }
    if (*pre || *tr) {
      const Stage s = *pre ? Stage::kPreprocess : Stage::kTrain;
      run_stages(resolve(common), std::span<const Stage>(&s, 1));
      return 0;
    }

    if (*ens) {
      auto cfg = resolve(common);
      if (k_override) cfg.k = *k_override;
      if (manifest_in.empty() && input.empty() && out.empty()) {
        const Stage s = Stage::kEnsemble;
        run_stages(cfg, std::span<const Stage>(&s, 1));
        return 0;
      }
      if (manifest_in.empty() || input.empty() || out.empty()) {
        throw ConfigError("ensemble: --manifest, --input and --out go together");
      }
      const auto reg = cfg.registry();
      const auto entries = load_manifest(manifest_in);
      std::vector<double> scores;
      for (const auto& e : entries) scores.push_back(e.val_micro_f1);
      std::vector<ModelParams> members;
      for (auto i : select_top(scores, cfg.k)) members.push_back(load_model(entries[i].model_path));
      const auto corpus = load_corpus(input, reg);
      const auto inst = mask_corpus(corpus, Vocab(cfg.vocab_size), cfg.clean(), cfg.encoder.max_len, reg);
      save_predictions(out, ensemble_predict(members, inst, cfg.train.threshold), false);
      return 0;
    }

    if (*post) {
      auto cfg = resolve(common);
      if (input.empty() && out.empty()) {
        const Stage s = Stage::kPostprocess;
        run_stages(cfg, std::span<const Stage>(&s, 1));
        return 0;
      }
      if (input.empty() || out.empty()) throw ConfigError("postprocess: --input and --out go together");
      if (cfg.gazetteer_dir.empty()) throw ConfigError("postprocess.gazetteer is not set");
      const auto gaz = load_gazetteer(cfg.gazetteer_dir);
      const auto tm = cfg.type_map_path.empty() ? TypeMap::defaults() : TypeMap::load(cfg.type_map_path);
      save_predictions(out, filter(load_predictions(input), tm, gaz), true);
      return 0;
    }

    if (*eval) {
      if (predictions.empty()) {
        const Stage s = Stage::kEvaluate;
        run_stages(resolve(common), std::span<const Stage>(&s, 1));
        return 0;
      }
      if (gold.empty()) throw ConfigError("evaluate: --predictions needs --gold");
      const auto cfg = resolve(common);
      const auto reg = cfg.registry();
      const auto rep = evaluate_file(predictions, load_corpus(gold, reg), reg, filtered_flag);
      std::cout << render_table(rep);
      if (!out.empty()) write_report(rep, out + ".json", out + ".txt");
      return 0;
    }

    if (*abl) {
      const auto cfg = resolve(common);
      if (report_a.empty() && report_b.empty() && unfiltered_p.empty() && filtered_p.empty()) {
        const Stage s = Stage::kAblate;
        run_stages(cfg, std::span<const Stage>(&s, 1));
        std::cout << std::ifstream(RunLayout{cfg.output_dir}.ablation()).rdbuf();
        return 0;
      }
      MetricsReport a, b;
      if (!report_a.empty() || !report_b.empty()) {
        if (report_a.empty() || report_b.empty()) throw ConfigError("ablate: --a and --b go together");
        a = load_report(report_a);
        b = load_report(report_b);
      } else {
        if (unfiltered_p.empty() || filtered_p.empty() || gold.empty()) {
          throw ConfigError("ablate: --unfiltered, --filtered and --gold go together");
        }
        const auto reg = cfg.registry();
        const auto g = load_corpus(gold, reg);
        a = evaluate_file(unfiltered_p, g, reg, false);
        b = evaluate_file(filtered_p, g, reg, true);
      }
      const auto c = compare(a, b, std::string(kAblationLabelA), std::string(kAblationLabelB));
      print_or_write(render_comparison(c), out);
      return 0;
    }

    if (*pred) {
      const auto cfg = resolve(common);
      const auto reg = cfg.registry();
      const auto model = load_model(model_path);
      const auto corpus = load_corpus(input, reg);
      const auto inst = mask_corpus(corpus, Vocab(model.encoder.cfg.vocab_size), cfg.clean(),
                                    model.encoder.cfg.max_len, reg);
      save_predictions(out, predict(model, inst, threshold.value_or(cfg.train.threshold)), false);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kData);
  }
  return 0;
}
