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

#ifndef PCTC_EVAL_HPP_
#define PCTC_EVAL_HPP_

#include <string>
#include <vector>

#include "pctc/ctc.hpp"
#include "pctc/data.hpp"
#include "pctc/decode.hpp"
#include "pctc/model.hpp"

namespace pctc {

struct UtteranceEval {
  std::string utterance_id;
  LabelSeq hypothesis;
  ErrorCounts counts;
};

struct CorpusEval {
  std::vector<UtteranceEval> utterances;
  ErrorCounts totals;

  double per() const { return totals.per(); }
};

inline LabelSeq decode_utterance(const MultiHeadModel& model,
                                 const std::string& language_id,
                                 const Utterance& utt) {
  EncoderOutput enc = encoder_forward(model.config, model.encoder,
                                      utt.features);
  return greedy_decode(project_head(model, language_id, enc.e));
}

// Greedy-decodes every utterance and aggregates S/I/D counts; corpus PER
// is total errors over total reference length.
inline CorpusEval evaluate_corpus(const MultiHeadModel& model,
                                  const Corpus& corpus,
                                  const std::string& language_id) {
  model.head(language_id);  // fail fast on unknown language
  if (corpus.utterances.empty())
    throw ConfigError("evaluate_corpus: empty corpus");
  CorpusEval eval;
  for (const auto& utt : corpus.utterances) {
    UtteranceEval ue;
    ue.utterance_id = utt.utterance_id;
    ue.hypothesis = decode_utterance(model, language_id, utt);
    ue.counts = edit_distance(ue.hypothesis, utt.labels);
    eval.totals.accumulate(ue.counts);
    eval.utterances.push_back(std::move(ue));
  }
  return eval;
}

// Mean CTC loss over the feasible utterances of a corpus.
inline double corpus_mean_loss(const MultiHeadModel& model,
                               const Corpus& corpus,
                               const std::string& language_id) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& utt : corpus.utterances) {
    if (!utt.feasible) continue;
    EncoderOutput enc = encoder_forward(model.config, model.encoder,
                                        utt.features);
    Matrix logits = project_head(model, language_id, enc.e);
    sum += ctc_loss_and_grad(logits, utt.labels).first;
    ++n;
  }
  if (n == 0)
    throw ConfigError("corpus_mean_loss: no feasible utterances");
  return sum / static_cast<double>(n);
}

}  // namespace pctc

#endif  // PCTC_EVAL_HPP_
