/* Copyright 2026 The polyglot-ctc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// polyglot-ctc: multi-lingual CTC phoneme recognition experiments.
//
// Subcommands: gen-synth, train, finetune, adapt, decode, eval, sweep.
// Every command is a pure function of its config file and input files;
// rerunning with identical inputs reproduces outputs byte for byte.
// Exit codes: 0 success, 1 I/O error, 2 config/validation error,
// 3 numeric divergence.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pctc/config.hpp"
#include "pctc/data.hpp"
#include "pctc/eval.hpp"
#include "pctc/model.hpp"
#include "pctc/train.hpp"

namespace fs = std::filesystem;
using namespace pctc;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

void require_file(const std::string& path, const std::string& what) {
  if (!fs::is_regular_file(path))
    throw ConfigError(what + " does not exist: " + path);
}

void require_dir(const std::string& path, const std::string& what) {
  if (!fs::is_directory(path))
    throw ConfigError(what + " does not exist: " + path);
}

void make_out_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec)
    throw IoError("cannot create output directory " + path + ": " +
                  ec.message());
}

std::size_t workers_from(const RunConfigFile& config) {
  // The env var wins over the config key; default is one worker for
  // exact reproducibility.
  if (const char* env = std::getenv("POLYGLOT_CTC_WORKERS")) {
    try {
      std::size_t w = std::stoull(env);
      if (w < 1) throw std::invalid_argument("zero");
      return w;
    } catch (const std::exception&) {
      throw ConfigError(std::string("POLYGLOT_CTC_WORKERS is not a positive "
                                    "integer: '") +
                        env + "'");
    }
  }
  return static_cast<std::size_t>(config.get_u64("workers", 1));
}

bool timing_enabled(const RunConfigFile& config) {
  std::string timing = config.get_string("timing", "none");
  if (timing == "none") return false;
  if (timing == "wall") return true;
  throw ConfigError("timing must be 'none' or 'wall', got '" + timing + "'");
}

const std::set<std::string> kTrainingKeys = {
    "learning_rate", "epochs",   "batch_size", "grad_clip_norm",
    "patience",      "dev_fraction", "seed",   "workers",
    "timing",        "out_dir"};

TrainConfig training_config_from(const RunConfigFile& config,
                                 const Overrides& overrides) {
  TrainConfig out;
  out.learning_rate = config.get_double("learning_rate", 0.05);
  out.epochs = static_cast<std::size_t>(config.get_u64("epochs", 30));
  out.batch_size = static_cast<std::size_t>(config.get_u64("batch_size", 8));
  out.grad_clip_norm = config.get_double("grad_clip_norm", 5.0);
  out.patience = static_cast<std::size_t>(config.get_u64("patience", 5));
  out.dev_fraction = config.get_double("dev_fraction", 0.1);
  out.seed = overrides.seed ? *overrides.seed : config.get_u64("seed", 1);
  out.workers = workers_from(config);
  out.validate();
  return out;
}

std::string out_dir_from(const RunConfigFile& config,
                         const Overrides& overrides) {
  return overrides.out_dir ? *overrides.out_dir
                           : config.get_string("out_dir");
}

void print_final_per(const TrainReport& report) {
  char buf[128];
  for (const auto& [lang, per] : report.final_dev_per) {
    std::snprintf(buf, sizeof(buf), "dev PER %s: %.6f", lang.c_str(), per);
    std::cout << buf << "\n";
  }
}

// ---------------------------------------------------------------------------

int cmd_gen_synth(const std::string& config_path,
                  const Overrides& overrides) {
  RunConfigFile config = RunConfigFile::load(config_path);

  std::vector<std::string> languages = config.get_list("languages");
  {
    std::set<std::string> unique(languages.begin(), languages.end());
    if (unique.size() != languages.size())
      throw ConfigError(config_path + ": duplicate language_id in "
                        "'languages'");
  }
  const std::set<std::string> exact = {
      "out_dir",     "seed",       "feature_dim",
      "pool_size",   "pool_seed",  "languages",
      "utterances",  "phones_per_utterance", "frames_per_phone",
      "noise_std",   "inventory_size"};
  const std::set<std::string> lang_suffixes = {
      "phones",           "utterances", "phones_per_utterance",
      "frames_per_phone", "noise_std",  "seed",
      "inventory_size"};
  for (const auto& [key, value] : config.values()) {
    if (exact.count(key)) continue;
    auto dot = key.find('.');
    bool ok = false;
    if (dot != std::string::npos) {
      std::string lang = key.substr(0, dot);
      std::string suffix = key.substr(dot + 1);
      ok = std::find(languages.begin(), languages.end(), lang) !=
               languages.end() &&
           lang_suffixes.count(suffix) > 0;
    }
    if (!ok)
      throw ConfigError(config_path + ": unknown key '" + key + "'");
  }

  const std::uint64_t base_seed =
      overrides.seed ? *overrides.seed : config.get_u64("seed", 1);
  const std::size_t feature_dim =
      static_cast<std::size_t>(config.get_u64("feature_dim", 8));
  const std::size_t pool_size =
      static_cast<std::size_t>(config.get_u64("pool_size", 20));
  const std::uint64_t pool_seed = config.get_u64("pool_seed", base_seed);
  const std::string out_dir = out_dir_from(config, overrides);

  Matrix pool = gen_prototype_pool(pool_seed, pool_size, feature_dim);
  make_out_dir(out_dir);

  for (const std::string& id : languages) {
    auto lang_key = [&](const std::string& suffix) { return id + "." + suffix; };
    SynthLanguageSpec spec;
    spec.language_id = id;
    spec.seed = config.get_u64(lang_key("seed"),
                               derive_seed(base_seed, "lang." + id));
    if (config.has(lang_key("phones"))) {
      std::istringstream ss(config.get_string(lang_key("phones")));
      int idx;
      while (ss >> idx) spec.phone_pool_indices.push_back(idx);
    } else {
      // Draw a seeded inventory from the pool.
      std::size_t size = static_cast<std::size_t>(config.get_u64(
          lang_key("inventory_size"), config.get_u64("inventory_size", 10)));
      std::vector<int> all(pool_size);
      std::iota(all.begin(), all.end(), 0);
      Rng rng(derive_seed(spec.seed, "inventory"));
      std::shuffle(all.begin(), all.end(), rng);
      if (size > pool_size)
        throw ConfigError(config_path + ": inventory_size for " + id +
                          " exceeds pool_size");
      spec.phone_pool_indices.assign(all.begin(), all.begin() + size);
      std::sort(spec.phone_pool_indices.begin(),
                spec.phone_pool_indices.end());
    }
    spec.num_utterances = static_cast<std::size_t>(config.get_u64(
        lang_key("utterances"), config.get_u64("utterances", 200)));
    auto [pmin, pmax] = config.has(lang_key("phones_per_utterance"))
                            ? config.get_range(lang_key("phones_per_utterance"))
                            : (config.has("phones_per_utterance")
                                   ? config.get_range("phones_per_utterance")
                                   : std::pair<std::uint64_t, std::uint64_t>{
                                         3, 8});
    spec.min_phones_per_utterance = pmin;
    spec.max_phones_per_utterance = pmax;
    auto [fmin, fmax] = config.has(lang_key("frames_per_phone"))
                            ? config.get_range(lang_key("frames_per_phone"))
                            : (config.has("frames_per_phone")
                                   ? config.get_range("frames_per_phone")
                                   : std::pair<std::uint64_t, std::uint64_t>{
                                         2, 5});
    spec.min_frames_per_phone = fmin;
    spec.max_frames_per_phone = fmax;
    spec.noise_std = config.get_double(
        lang_key("noise_std"), config.get_double("noise_std", 0.3));

    Corpus corpus = gen_synth_corpus(spec, pool);
    save_corpus(corpus, (fs::path(out_dir) / id).string());
    std::cout << id << ": " << corpus.utterances.size() << " utterances, "
              << corpus.inventory.size() << " symbols (incl. blank)\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_train(const std::string& config_path, const Overrides& overrides) {
  RunConfigFile config = RunConfigFile::load(config_path);
  std::set<std::string> exact = kTrainingKeys;
  exact.insert({"mode", "corpora", "weights", "layers", "hidden"});
  config.reject_unknown_keys(exact);

  TrainMode mode = parse_train_mode(config.get_string("mode"));
  if (mode != TrainMode::kMonolingual && mode != TrainMode::kMultilingual)
    throw ConfigError("train supports modes monolingual and multilingual");

  std::vector<std::string> corpus_dirs = config.get_list("corpora");
  if (mode == TrainMode::kMonolingual && corpus_dirs.size() != 1)
    throw ConfigError("monolingual mode expects exactly one corpus");
  if (mode == TrainMode::kMultilingual && corpus_dirs.size() < 2)
    throw ConfigError("multilingual mode expects at least two corpora");
  for (const auto& dir : corpus_dirs) require_dir(dir, "corpus directory");

  std::vector<double> weights(corpus_dirs.size(), 1.0);
  if (config.has("weights")) {
    weights = config.get_double_list("weights");
    if (weights.size() != corpus_dirs.size())
      throw ConfigError("weights list must match corpora list");
  }

  TrainConfig train_config = training_config_from(config, overrides);
  train_config.mode = mode;
  const std::string out_dir = out_dir_from(config, overrides);

  std::vector<Corpus> corpora;
  for (const auto& dir : corpus_dirs) corpora.push_back(load_corpus(dir));
  const std::size_t feature_dim = corpora.front().feature_dim();
  for (const auto& corpus : corpora)
    if (corpus.feature_dim() != feature_dim)
      throw ConfigError("corpora disagree on feature dimension");

  EncoderConfig encoder_config;
  encoder_config.num_layers =
      static_cast<std::size_t>(config.get_u64("layers", 2));
  encoder_config.hidden_dim =
      static_cast<std::size_t>(config.get_u64("hidden", 32));
  encoder_config.input_dim = feature_dim;

  MultiHeadModel model = init_model(encoder_config, train_config.seed);
  for (const auto& corpus : corpora)
    add_head(model, corpus.inventory, train_config.seed);

  std::vector<MixtureEntry> mixture;
  for (std::size_t i = 0; i < corpora.size(); ++i)
    mixture.push_back({&corpora[i], weights[i]});

  make_out_dir(out_dir);
  TrainReport report = train(model, mixture, train_config);
  save_model(model, (fs::path(out_dir) / "model.pctc").string());
  write_curves_csv(report, (fs::path(out_dir) / "curves.csv").string());
  print_final_per(report);
  if (report.skipped_infeasible > 0)
    std::cout << "skipped infeasible utterances: "
              << report.skipped_infeasible << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_finetune(const std::string& config_path, const Overrides& overrides) {
  RunConfigFile config = RunConfigFile::load(config_path);
  std::set<std::string> exact = kTrainingKeys;
  exact.insert({"model", "target"});
  config.reject_unknown_keys(exact);

  const std::string model_path = config.get_string("model");
  const std::string target_dir = config.get_string("target");
  require_file(model_path, "donor model");
  require_dir(target_dir, "target corpus");

  TrainConfig train_config = training_config_from(config, overrides);
  const std::string out_dir = out_dir_from(config, overrides);

  MultiHeadModel model = load_model(model_path);
  Corpus target = load_corpus(target_dir);

  make_out_dir(out_dir);
  TrainReport report = finetune(model, target, train_config);
  save_model(model, (fs::path(out_dir) / "model.pctc").string());
  write_curves_csv(report, (fs::path(out_dir) / "curves.csv").string());
  print_final_per(report);
  if (report.skipped_infeasible > 0)
    std::cout << "skipped infeasible utterances: "
              << report.skipped_infeasible << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_adapt(const std::string& config_path, const Overrides& overrides) {
  RunConfigFile config = RunConfigFile::load(config_path);
  std::set<std::string> exact = kTrainingKeys;
  exact.insert({"model", "target", "mode", "fraction", "fraction_seed"});
  config.reject_unknown_keys(exact);

  const std::string model_path = config.get_string("model");
  const std::string target_dir = config.get_string("target");
  require_file(model_path, "donor model");
  require_dir(target_dir, "target corpus");

  TrainMode mode = parse_train_mode(config.get_string("mode"));
  if (mode != TrainMode::kAdaptSoftmax && mode != TrainMode::kAdaptFull)
    throw ConfigError("adapt supports modes adapt_softmax and adapt_full");
  const double fraction = config.get_double("fraction", 1.0);

  TrainConfig train_config = training_config_from(config, overrides);
  train_config.fraction_seed =
      config.get_u64("fraction_seed", train_config.seed);
  const std::string out_dir = out_dir_from(config, overrides);

  MultiHeadModel donor = load_model(model_path);
  Corpus target = load_corpus(target_dir);

  make_out_dir(out_dir);
  auto [model, report] =
      mode == TrainMode::kAdaptSoftmax
          ? adapt_softmax(donor, target, fraction, train_config)
          : adapt_full(donor, target, fraction, train_config);
  save_model(model, (fs::path(out_dir) / "model.pctc").string());
  write_curves_csv(report, (fs::path(out_dir) / "curves.csv").string());
  print_final_per(report);
  if (report.skipped_infeasible > 0)
    std::cout << "skipped infeasible utterances: "
              << report.skipped_infeasible << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_decode(const std::string& model_path, const std::string& corpus_dir,
               const std::string& language, const std::string& out_path) {
  require_file(model_path, "model");
  require_dir(corpus_dir, "corpus directory");
  MultiHeadModel model = load_model(model_path);
  Corpus corpus = load_corpus(corpus_dir);
  const std::string lang = language.empty() ? corpus.language_id : language;
  const PhoneInventory& inventory = model.inventory(lang);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::binary);
    if (!file) throw IoError("cannot write " + out_path);
    out = &file;
  }
  for (const auto& utt : corpus.utterances) {
    LabelSeq hyp = decode_utterance(model, lang, utt);
    *out << utt.utterance_id << "\t";
    for (std::size_t i = 0; i < hyp.size(); ++i)
      *out << (i ? " " : "") << inventory.phones[hyp[i]];
    *out << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_eval(const std::string& model_path, const std::string& corpus_dir,
             const std::string& language, const std::string& out_path) {
  require_file(model_path, "model");
  require_dir(corpus_dir, "corpus directory");
  MultiHeadModel model = load_model(model_path);
  Corpus corpus = load_corpus(corpus_dir);
  const std::string lang = language.empty() ? corpus.language_id : language;

  CorpusEval eval = evaluate_corpus(model, corpus, lang);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "PER %.6f (S=%zu I=%zu D=%zu ref=%zu) over %zu utterances",
                eval.per(), eval.totals.substitutions,
                eval.totals.insertions, eval.totals.deletions,
                eval.totals.ref_length, eval.utterances.size());
  std::cout << buf << "\n";

  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + out_path);
    out << "utterance_id\tref_len\tsub\tins\tdel\tper\n";
    for (const auto& ue : eval.utterances) {
      double per = ue.counts.ref_length > 0
                       ? ue.counts.per()
                       : (ue.counts.total() == 0 ? 0.0 : -1.0);
      std::snprintf(buf, sizeof(buf), "%s\t%zu\t%zu\t%zu\t%zu\t%.6f",
                    ue.utterance_id.c_str(), ue.counts.ref_length,
                    ue.counts.substitutions, ue.counts.insertions,
                    ue.counts.deletions, per);
      out << buf << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_sweep(const std::string& config_path, const Overrides& overrides) {
  RunConfigFile config = RunConfigFile::load(config_path);
  std::set<std::string> exact = kTrainingKeys;
  exact.insert({"donors", "donor_names", "target", "fractions", "mode",
                "fraction_seed"});
  config.reject_unknown_keys(exact);

  std::vector<std::string> donor_paths = config.get_list("donors");
  for (const auto& path : donor_paths) require_file(path, "donor model");
  std::vector<std::string> donor_names;
  if (config.has("donor_names")) {
    donor_names = config.get_list("donor_names");
    if (donor_names.size() != donor_paths.size())
      throw ConfigError("donor_names must match donors");
  } else {
    for (const auto& path : donor_paths)
      donor_names.push_back(fs::path(path).stem().string());
  }
  const std::string target_dir = config.get_string("target");
  require_dir(target_dir, "target corpus");
  std::vector<double> fractions = config.get_double_list("fractions");
  TrainMode mode = parse_train_mode(config.get_string("mode"));

  TrainConfig train_config = training_config_from(config, overrides);
  train_config.fraction_seed =
      config.get_u64("fraction_seed", train_config.seed);
  const std::string out_dir = out_dir_from(config, overrides);
  const bool timing = timing_enabled(config);

  std::vector<MultiHeadModel> donors;
  donors.reserve(donor_paths.size());
  for (const auto& path : donor_paths) donors.push_back(load_model(path));
  Corpus target = load_corpus(target_dir);

  std::vector<std::pair<std::string, const MultiHeadModel*>> donor_refs;
  for (std::size_t i = 0; i < donors.size(); ++i)
    donor_refs.emplace_back(donor_names[i], &donors[i]);

  make_out_dir(out_dir);
  SweepReport sweep =
      run_sweep(donor_refs, target, fractions, mode, train_config);
  write_sweep_csv(sweep, (fs::path(out_dir) / "sweep.csv").string(), timing);

  char buf[128];
  std::snprintf(buf, sizeof(buf), "baseline dev PER: %.6f",
                sweep.baseline_dev_per);
  std::cout << buf << "\n";
  for (const auto& name : donor_names) {
    const auto& crossover = sweep.crossover.at(name);
    if (crossover) {
      std::snprintf(buf, sizeof(buf), "crossover %s: %.6f", name.c_str(),
                    *crossover);
      std::cout << buf << "\n";
    } else {
      std::cout << "crossover " << name << ": none\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-lingual CTC phoneme recognition experiments"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string config_path, model_path, corpus_dir, language, out_path;

  auto add_config_command = [&](const std::string& name,
                                const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("config", config_path, "key=value config file")
        ->required();
    cmd->add_option("--seed", [&](const std::vector<std::string>& v) {
          try {
            std::size_t used = 0;
            overrides.seed = std::stoull(v.at(0), &used);
            return used == v.at(0).size();
          } catch (const std::exception&) {
            return false;
          }
        },
        "override the config seed");
    cmd->add_option("--out", [&](const std::vector<std::string>& v) {
          overrides.out_dir = v.at(0);
          return true;
        },
        "override the output directory");
    return cmd;
  };

  CLI::App* gen = add_config_command("gen-synth",
                                     "generate synthetic corpora");
  CLI::App* train_cmd = add_config_command("train",
                                           "train a model from scratch");
  CLI::App* finetune_cmd =
      add_config_command("finetune", "fine-tune a model on one language");
  CLI::App* adapt_cmd = add_config_command(
      "adapt", "port a donor model to an unseen language");
  CLI::App* sweep_cmd = add_config_command(
      "sweep", "donor x fraction adaptation grid with baseline");

  auto add_eval_like = [&](const std::string& name, const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("model", model_path, "model file")->required();
    cmd->add_option("corpus", corpus_dir, "corpus directory")->required();
    cmd->add_option("--language", language,
                    "language id (default: the corpus language)");
    cmd->add_option("--out", out_path, "output TSV path");
    return cmd;
  };
  CLI::App* decode_cmd =
      add_eval_like("decode", "greedy-decode a corpus to phone sequences");
  CLI::App* eval_cmd = add_eval_like("eval", "report PER against a corpus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_synth(config_path, overrides);
    if (train_cmd->parsed()) return cmd_train(config_path, overrides);
    if (finetune_cmd->parsed()) return cmd_finetune(config_path, overrides);
    if (adapt_cmd->parsed()) return cmd_adapt(config_path, overrides);
    if (sweep_cmd->parsed()) return cmd_sweep(config_path, overrides);
    if (decode_cmd->parsed())
      return cmd_decode(model_path, corpus_dir, language, out_path);
    if (eval_cmd->parsed())
      return cmd_eval(model_path, corpus_dir, language, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
