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

#ifndef PCTC_TRAIN_HPP_
#define PCTC_TRAIN_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pctc/ctc.hpp"
#include "pctc/data.hpp"
#include "pctc/error.hpp"
#include "pctc/eval.hpp"
#include "pctc/model.hpp"

// SGD training of the shared-encoder multi-head model. Four regimes:
// monolingual and joint multilingual training, per-language fine-tuning,
// and cross-lingual adaptation of an unseen language by retraining either
// the softmax head only or the full network. Batches are language
// homogeneous; corpora are interleaved proportionally to mixture weight
// times corpus size. Everything is deterministic given the config seeds.

namespace pctc {

enum class TrainMode {
  kMonolingual,
  kMultilingual,
  kFinetune,
  kAdaptSoftmax,
  kAdaptFull,
};

inline const char* train_mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::kMonolingual: return "monolingual";
    case TrainMode::kMultilingual: return "multilingual";
    case TrainMode::kFinetune: return "finetune";
    case TrainMode::kAdaptSoftmax: return "adapt_softmax";
    case TrainMode::kAdaptFull: return "adapt_full";
  }
  return "?";
}

inline TrainMode parse_train_mode(const std::string& s) {
  for (TrainMode m :
       {TrainMode::kMonolingual, TrainMode::kMultilingual,
        TrainMode::kFinetune, TrainMode::kAdaptSoftmax,
        TrainMode::kAdaptFull})
    if (s == train_mode_name(m)) return m;
  throw ConfigError("unknown training mode '" + s + "'");
}

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 30;
  std::size_t batch_size = 8;
  double grad_clip_norm = 5.0;
  std::uint64_t seed = 1;
  TrainMode mode = TrainMode::kMonolingual;
  double target_fraction = 1.0;     // adaptation modes only
  std::uint64_t fraction_seed = 1;  // subset selection seed
  std::size_t patience = 5;         // epochs w/o dev gain before halving lr
  double dev_fraction = 0.1;
  std::size_t workers = 1;

  bool encoder_trainable() const {
    return mode != TrainMode::kAdaptSoftmax;
  }

  void validate() const {
    if (!(learning_rate >= 0.0))
      throw ConfigError("learning_rate must be non-negative");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(grad_clip_norm > 0.0))
      throw ConfigError("grad_clip_norm must be positive");
    if (!(target_fraction > 0.0) || target_fraction > 1.0)
      throw ConfigError("target_fraction must be in (0, 1]");
    if (patience < 1) throw ConfigError("patience must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
  }
};

struct MixtureEntry {
  const Corpus* corpus = nullptr;
  double weight = 1.0;
};

struct EpochStats {
  std::size_t epoch = 0;
  std::map<std::string, double> mean_loss;  // training loss per language
  std::map<std::string, double> dev_loss;   // per language
  std::map<std::string, double> dev_per;    // per language
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::size_t skipped_infeasible = 0;
  double wall_seconds = 0.0;
  std::size_t best_epoch = 0;  // 0 means the initial model was never beaten
  std::map<std::string, double> final_dev_per;

  double final_mean_dev_per() const {
    double sum = 0.0;
    for (const auto& [lang, per] : final_dev_per) sum += per;
    return final_dev_per.empty() ? 0.0
                                 : sum / static_cast<double>(
                                             final_dev_per.size());
  }
};

// ---------------------------------------------------------------------------
// Gradients

struct ModelGrads {
  EncoderParams encoder;  // empty when the encoder is frozen
  std::map<std::string, HeadGrads> heads;
};

namespace detail {

template <typename Fn>
void for_each_grad_value(ModelGrads& grads, Fn&& fn) {
  for (auto& layer : grads.encoder.layers)
    for (auto* dir : {&layer.fwd, &layer.bwd}) {
      for (double& v : dir->w_input.storage()) fn(v);
      for (double& v : dir->w_recurrent.storage()) fn(v);
      for (double& v : dir->bias) fn(v);
    }
  for (auto& [lang, head] : grads.heads) {
    for (double& v : head.weight.storage()) fn(v);
    for (double& v : head.bias) fn(v);
  }
}

inline void accumulate_encoder(EncoderParams& acc, const EncoderParams& inc,
                               double scale) {
  for (std::size_t l = 0; l < acc.layers.size(); ++l) {
    auto pairs = {std::pair{&acc.layers[l].fwd, &inc.layers[l].fwd},
                  std::pair{&acc.layers[l].bwd, &inc.layers[l].bwd}};
    for (auto [a, b] : pairs) {
      for (std::size_t i = 0; i < a->w_input.size(); ++i)
        a->w_input.storage()[i] += scale * b->w_input.storage()[i];
      for (std::size_t i = 0; i < a->w_recurrent.size(); ++i)
        a->w_recurrent.storage()[i] += scale * b->w_recurrent.storage()[i];
      for (std::size_t i = 0; i < a->bias.size(); ++i)
        a->bias[i] += scale * b->bias[i];
    }
  }
}

// Fixed-order index loop, optionally fanned out over worker threads.
// Results must be written to per-index slots so worker count never
// changes the arithmetic.
template <typename Fn>
void indexed_parallel_loop(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w)
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

inline double global_grad_norm(ModelGrads& grads) {
  double sq = 0.0;
  detail::for_each_grad_value(grads, [&](double& v) { sq += v * v; });
  return std::sqrt(sq);
}

// Global-norm clipping; returns the pre-clip norm.
inline double clip_gradients(ModelGrads& grads, double clip_norm) {
  double norm = global_grad_norm(grads);
  if (norm > clip_norm && norm > 0.0) {
    double scale = clip_norm / norm;
    detail::for_each_grad_value(grads, [&](double& v) { v *= scale; });
  }
  return norm;
}

// Mean loss and mean gradients over a batch of utterances. Gradients flow
// through the CTC loss, the utterance's language head, and (unless the
// encoder is frozen) the encoder. Batch loss is the mean of per-utterance
// losses; utterances are processed independently.
inline std::pair<double, ModelGrads> compute_batch_gradients(
    const MultiHeadModel& model, const std::vector<const Utterance*>& batch,
    bool encoder_trainable, std::size_t workers = 1) {
  if (batch.empty())
    throw ConfigError("compute_batch_gradients: empty batch");
  for (const Utterance* utt : batch) model.head(utt->language_id);

  struct PerUtterance {
    double loss = 0.0;
    EncoderParams encoder;
    HeadGrads head;
  };
  std::vector<PerUtterance> partials(batch.size());

  detail::indexed_parallel_loop(
      batch.size(), workers, [&](std::size_t i) {
        const Utterance& utt = *batch[i];
        EncoderOutput enc =
            encoder_forward(model.config, model.encoder, utt.features);
        Matrix logits = project_head(model, utt.language_id, enc.e);
        auto [loss, grad_logits] = ctc_loss_and_grad(logits, utt.labels);
        if (!std::isfinite(loss))
          throw DivergenceError("divergence: non-finite loss on utterance " +
                                utt.utterance_id);
        auto [head_grads, grad_e] =
            head_backward(model.head(utt.language_id), enc.e, grad_logits);
        partials[i].loss = loss;
        partials[i].head = std::move(head_grads);
        if (encoder_trainable)
          partials[i].encoder =
              encoder_backward(model.encoder, enc, grad_e).first;
      });

  ModelGrads grads;
  if (encoder_trainable) grads.encoder = zeros_like(model.encoder);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    loss_sum += partials[i].loss;
    const std::string& lang = batch[i]->language_id;
    auto it = grads.heads.find(lang);
    if (it == grads.heads.end()) {
      HeadGrads zero;
      const LanguageHead& head = model.head(lang);
      zero.weight = Matrix(head.weight.rows(), head.weight.cols());
      zero.bias.assign(head.bias.size(), 0.0);
      it = grads.heads.emplace(lang, std::move(zero)).first;
    }
    for (std::size_t j = 0; j < it->second.weight.size(); ++j)
      it->second.weight.storage()[j] +=
          scale * partials[i].head.weight.storage()[j];
    for (std::size_t j = 0; j < it->second.bias.size(); ++j)
      it->second.bias[j] += scale * partials[i].head.bias[j];
    if (encoder_trainable)
      detail::accumulate_encoder(grads.encoder, partials[i].encoder, scale);
  }
  return {loss_sum * scale, std::move(grads)};
}

// Number of parameters a given mode actually updates: heads only under
// softmax adaptation, encoder plus heads otherwise.
inline std::size_t trainable_parameter_count(const MultiHeadModel& model,
                                             TrainMode mode) {
  std::size_t count = 0;
  if (mode != TrainMode::kAdaptSoftmax)
    for_each_encoder_tensor(
        model.encoder, [&](const std::string&, const auto& tensor) {
          count += tensor.size();
        });
  for (const auto& [lang, head] : model.heads)
    count += head.parameter_count();
  return count;
}

inline void apply_sgd_update(MultiHeadModel& model, const ModelGrads& grads,
                             double learning_rate) {
  if (!grads.encoder.layers.empty()) {
    if (grads.encoder.layers.size() != model.encoder.layers.size())
      throw ConfigError("apply_sgd_update: encoder gradient shape mismatch");
    detail::accumulate_encoder(model.encoder, grads.encoder,
                               -learning_rate);
  }
  for (const auto& [lang, head_grads] : grads.heads) {
    LanguageHead& head = model.head(lang);
    for (std::size_t j = 0; j < head.weight.size(); ++j)
      head.weight.storage()[j] -=
          learning_rate * head_grads.weight.storage()[j];
    for (std::size_t j = 0; j < head.bias.size(); ++j)
      head.bias[j] -= learning_rate * head_grads.bias[j];
  }
}

// One optimization step: batch gradients, global-norm clipping, SGD.
// In adapt_softmax mode only head parameters move. Returns the mean loss.
inline double train_step(MultiHeadModel& model,
                         const std::vector<const Utterance*>& batch,
                         const TrainConfig& config) {
  config.validate();
  auto [loss, grads] = compute_batch_gradients(
      model, batch, config.encoder_trainable(), config.workers);
  clip_gradients(grads, config.grad_clip_norm);
  apply_sgd_update(model, grads, config.learning_rate);
  return loss;
}

// ---------------------------------------------------------------------------
// Epoch machinery

namespace detail {

struct LanguageData {
  const Corpus* source = nullptr;
  double weight = 1.0;
  Corpus train;
  Corpus dev;
  std::vector<std::size_t> feasible;  // indices into train.utterances
};

struct ScheduledBatch {
  double position = 0.0;
  std::size_t language = 0;  // index into the LanguageData list
  std::size_t order = 0;
  std::vector<const Utterance*> utterances;
};

// Language-homogeneous batches, interleaved across corpora proportionally
// to weight x corpus size. A weight w samples round(w * N) utterance slots
// per epoch by cycling a per-epoch shuffled order.
inline std::vector<ScheduledBatch> build_epoch_schedule(
    const std::vector<LanguageData>& languages, const TrainConfig& config,
    std::size_t epoch) {
  std::vector<ScheduledBatch> schedule;
  for (std::size_t li = 0; li < languages.size(); ++li) {
    const LanguageData& lang = languages[li];
    if (lang.feasible.empty()) continue;
    const std::size_t n = lang.feasible.size();
    std::size_t slots = static_cast<std::size_t>(
        std::lround(lang.weight * static_cast<double>(n)));
    if (slots == 0) slots = 1;
    std::vector<std::size_t> order = lang.feasible;
    Rng rng(derive_seed(config.seed, "shuffle." + lang.train.language_id +
                                         "." + std::to_string(epoch)));
    std::shuffle(order.begin(), order.end(), rng);

    const std::size_t num_batches =
        (slots + config.batch_size - 1) / config.batch_size;
    for (std::size_t b = 0; b < num_batches; ++b) {
      ScheduledBatch batch;
      batch.language = li;
      batch.order = b;
      batch.position = (static_cast<double>(b) + 0.5) /
                       static_cast<double>(num_batches);
      for (std::size_t s = b * config.batch_size;
           s < std::min(slots, (b + 1) * config.batch_size); ++s)
        batch.utterances.push_back(
            &lang.train.utterances[order[s % n]]);
      schedule.push_back(std::move(batch));
    }
  }
  std::stable_sort(schedule.begin(), schedule.end(),
                   [](const ScheduledBatch& a, const ScheduledBatch& b) {
                     if (a.position != b.position)
                       return a.position < b.position;
                     if (a.language != b.language)
                       return a.language < b.language;
                     return a.order < b.order;
                   });
  return schedule;
}

}  // namespace detail

// Trains `model` in place on the given mixture and returns the loss/PER
// trajectory. The model left in place is the best-dev checkpoint (the
// untrained model counts as the baseline candidate, so dev PER never ends
// worse than it started). The learning rate halves whenever dev PER fails
// to improve for `patience` consecutive epochs.
inline TrainReport train(MultiHeadModel& model,
                         const std::vector<MixtureEntry>& mixture,
                         const TrainConfig& config) {
  config.validate();
  if (mixture.empty()) throw ConfigError("train: empty mixture");
  const auto start = std::chrono::steady_clock::now();

  std::vector<detail::LanguageData> languages;
  TrainReport report;
  for (const MixtureEntry& entry : mixture) {
    if (entry.corpus == nullptr)
      throw ConfigError("train: null corpus in mixture");
    if (!(entry.weight > 0.0))
      throw ConfigError("train: mixture weights must be positive");
    model.head(entry.corpus->language_id);  // heads must exist up front
    detail::LanguageData lang;
    lang.source = entry.corpus;
    lang.weight = entry.weight;
    auto [train_part, dev_part] =
        split_corpus(*entry.corpus, config.dev_fraction, config.seed);
    if (config.mode == TrainMode::kAdaptSoftmax ||
        config.mode == TrainMode::kAdaptFull)
      train_part = select_fraction(train_part, config.target_fraction,
                                   config.fraction_seed);
    lang.train = std::move(train_part);
    lang.dev = std::move(dev_part);
    for (std::size_t i = 0; i < lang.train.utterances.size(); ++i) {
      if (lang.train.utterances[i].feasible)
        lang.feasible.push_back(i);
      else
        ++report.skipped_infeasible;
    }
    languages.push_back(std::move(lang));
  }
  std::size_t total_feasible = 0;
  for (const auto& lang : languages) total_feasible += lang.feasible.size();
  if (total_feasible == 0)
    throw ConfigError("train: all training utterances are infeasible");

  auto evaluate_dev = [&](EpochStats& stats) {
    for (const auto& lang : languages) {
      const std::string& id = lang.dev.language_id;
      stats.dev_per[id] = evaluate_corpus(model, lang.dev, id).per();
      bool any_feasible = false;
      for (const auto& utt : lang.dev.utterances)
        any_feasible = any_feasible || utt.feasible;
      stats.dev_loss[id] =
          any_feasible ? corpus_mean_loss(model, lang.dev, id)
                       : std::numeric_limits<double>::quiet_NaN();
    }
  };
  auto mean_dev_per = [](const EpochStats& stats) {
    double sum = 0.0;
    for (const auto& [id, per] : stats.dev_per) sum += per;
    return sum / static_cast<double>(stats.dev_per.size());
  };

  EpochStats initial;
  evaluate_dev(initial);
  MultiHeadModel best_model = model;
  double best_per = mean_dev_per(initial);
  std::map<std::string, double> best_per_language = initial.dev_per;
  report.best_epoch = 0;

  TrainConfig step_config = config;
  std::size_t stall = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    auto schedule = detail::build_epoch_schedule(languages, config, epoch);
    std::map<std::string, double> loss_sum;
    std::map<std::string, std::size_t> utt_count;
    for (const auto& batch : schedule) {
      double loss;
      try {
        loss = train_step(model, batch.utterances, step_config);
      } catch (const DivergenceError& e) {
        std::string diag = e.what();
        diag += "; last finite mean losses:";
        if (report.epochs.empty()) {
          diag += " (no completed epochs)";
        } else {
          for (const auto& [id, v] : report.epochs.back().mean_loss)
            diag += " " + id + "=" + std::to_string(v);
        }
        throw DivergenceError(diag);
      }
      const std::string& id =
          languages[batch.language].train.language_id;
      loss_sum[id] += loss * static_cast<double>(batch.utterances.size());
      utt_count[id] += batch.utterances.size();
    }

    EpochStats stats;
    stats.epoch = epoch;
    for (const auto& [id, sum] : loss_sum)
      stats.mean_loss[id] = sum / static_cast<double>(utt_count[id]);
    evaluate_dev(stats);

    double current = mean_dev_per(stats);
    if (current < best_per - 1e-12) {
      best_per = current;
      best_model = model;
      best_per_language = stats.dev_per;
      report.best_epoch = epoch;
      stall = 0;
    } else if (++stall >= config.patience) {
      step_config.learning_rate *= 0.5;
      stall = 0;
    }
    report.epochs.push_back(std::move(stats));
  }

  model = std::move(best_model);
  report.final_dev_per = std::move(best_per_language);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

// Continues training every parameter on a single in-training language.
// Heads of other languages are untouched by routing.
inline TrainReport finetune(MultiHeadModel& model, const Corpus& target,
                            const TrainConfig& config) {
  model.head(target.language_id);
  TrainConfig ft = config;
  ft.mode = TrainMode::kFinetune;
  return train(model, {{&target, 1.0}}, ft);
}

namespace detail {

inline std::pair<MultiHeadModel, TrainReport> adapt_impl(
    const MultiHeadModel& donor, const Corpus& target, double fraction,
    const TrainConfig& config, TrainMode mode) {
  if (donor.heads.count(target.language_id))
    throw ConfigError("adapt: language '" + target.language_id +
                      "' is already a donor head; use finetune instead");
  target.inventory.validate();

  // All donor heads are dropped; one fresh head for the target.
  MultiHeadModel model;
  model.config = donor.config;
  model.encoder = donor.encoder;
  add_head(model, target.inventory, derive_seed(config.seed, "adapt-head"));

  TrainConfig adapt_config = config;
  adapt_config.mode = mode;
  adapt_config.target_fraction = fraction;
  TrainReport report = train(model, {{&target, 1.0}}, adapt_config);
  return {std::move(model), std::move(report)};
}

}  // namespace detail

// Softmax-only porting: fresh target head on the frozen donor encoder,
// trained on a fraction of the target data. Encoder tensors are bitwise
// identical to the donor's afterwards.
inline std::pair<MultiHeadModel, TrainReport> adapt_softmax(
    const MultiHeadModel& donor, const Corpus& target, double fraction,
    const TrainConfig& config) {
  return detail::adapt_impl(donor, target, fraction, config,
                            TrainMode::kAdaptSoftmax);
}

// Full-network adaptation: same head replacement, all parameters trained.
inline std::pair<MultiHeadModel, TrainReport> adapt_full(
    const MultiHeadModel& donor, const Corpus& target, double fraction,
    const TrainConfig& config) {
  return detail::adapt_impl(donor, target, fraction, config,
                            TrainMode::kAdaptFull);
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  std::string donor;
  std::string mode;
  double fraction = 1.0;
  std::uint64_t seed = 0;
  double dev_per = 0.0;
  std::size_t epochs = 0;
  double wall_seconds = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double baseline_dev_per = 0.0;
  // Smallest fraction at which each donor's adapted PER reaches the
  // monolingual 100%-data baseline; absent if it never does.
  std::map<std::string, std::optional<double>> crossover;
};

// Grid of (donor x fraction) adaptations against a from-scratch
// monolingual baseline trained on 100% of the target data.
inline SweepReport run_sweep(
    const std::vector<std::pair<std::string, const MultiHeadModel*>>& donors,
    const Corpus& target, const std::vector<double>& fractions,
    TrainMode mode, const TrainConfig& config) {
  if (mode != TrainMode::kAdaptSoftmax && mode != TrainMode::kAdaptFull)
    throw ConfigError("run_sweep: mode must be adapt_softmax or adapt_full");
  if (fractions.empty()) throw ConfigError("run_sweep: no fractions");
  for (double f : fractions)
    if (!(f > 0.0) || f > 1.0)
      throw ConfigError("run_sweep: fractions must lie in (0, 1]");
  if (!std::is_sorted(fractions.begin(), fractions.end()))
    throw ConfigError("run_sweep: fractions must be sorted ascending");
  if (donors.empty()) throw ConfigError("run_sweep: no donors");

  SweepReport sweep;

  {
    MultiHeadModel baseline =
        init_model(donors.front().second->config,
                   derive_seed(config.seed, "sweep-scratch"));
    add_head(baseline, target.inventory,
             derive_seed(config.seed, "sweep-scratch-head"));
    TrainConfig base_config = config;
    base_config.mode = TrainMode::kMonolingual;
    TrainReport report = train(baseline, {{&target, 1.0}}, base_config);
    sweep.baseline_dev_per = report.final_dev_per.at(target.language_id);
    sweep.rows.push_back({"scratch", "monolingual", 1.0, config.seed,
                          sweep.baseline_dev_per, report.epochs.size(),
                          report.wall_seconds});
  }

  for (const auto& [name, donor] : donors) {
    for (double fraction : fractions) {
      auto [adapted, report] =
          mode == TrainMode::kAdaptSoftmax
              ? adapt_softmax(*donor, target, fraction, config)
              : adapt_full(*donor, target, fraction, config);
      double per = report.final_dev_per.at(target.language_id);
      sweep.rows.push_back({name, train_mode_name(mode), fraction,
                            config.seed, per, report.epochs.size(),
                            report.wall_seconds});
      if (!sweep.crossover[name] && per <= sweep.baseline_dev_per)
        sweep.crossover[name] = fraction;
    }
  }
  return sweep;
}

// ---------------------------------------------------------------------------
// CSV output. Wall-clock timing is only written when `include_timing` is
// set: measured times are not reproducible byte-for-byte, and reruns of a
// command with identical config and seeds must be.

inline void write_curves_csv(const TrainReport& report,
                             const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write curves CSV " + path);
  out << "epoch,language,mean_loss,dev_per\n";
  char buf[64];
  for (const auto& stats : report.epochs)
    for (const auto& [lang, per] : stats.dev_per) {
      auto loss_it = stats.mean_loss.find(lang);
      double loss = loss_it != stats.mean_loss.end()
                        ? loss_it->second
                        : std::numeric_limits<double>::quiet_NaN();
      std::snprintf(buf, sizeof(buf), "%zu,%s,%.6f,%.6f", stats.epoch,
                    lang.c_str(), loss, per);
      out << buf << "\n";
    }
}

inline void write_sweep_csv(const SweepReport& sweep, const std::string& path,
                            bool include_timing = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write sweep CSV " + path);
  out << "donor,mode,fraction,seed,dev_per,epochs,wall_seconds\n";
  char buf[160];
  for (const auto& row : sweep.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%llu,%.6f,%zu,%.3f",
                  row.donor.c_str(), row.mode.c_str(), row.fraction,
                  static_cast<unsigned long long>(row.seed), row.dev_per,
                  row.epochs, include_timing ? row.wall_seconds : 0.0);
    out << buf << "\n";
  }
}

}  // namespace pctc

#endif  // PCTC_TRAIN_HPP_
