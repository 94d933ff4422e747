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

// Directional transfer experiments at desk scale. These train real models
// and take a couple of minutes; the fast per-module checks live in
// test_train.cpp.

#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "pctc/train.hpp"

using namespace pctc;

namespace {

Corpus make_lang(const std::string& id, std::vector<int> phones,
                 std::size_t utts, double noise, std::uint64_t seed,
                 const Matrix& pool) {
  SynthLanguageSpec spec;
  spec.language_id = id;
  spec.phone_pool_indices = std::move(phones);
  spec.num_utterances = utts;
  spec.min_phones_per_utterance = 3;
  spec.max_phones_per_utterance = 8;
  spec.min_frames_per_phone = 2;
  spec.max_frames_per_phone = 5;
  spec.noise_std = noise;
  spec.seed = seed;
  return gen_synth_corpus(spec, pool);
}

}  // namespace

TEST_CASE("a donor trained on three related languages ports better than a "
          "single-language donor on scarce target data") {
  const std::vector<std::vector<int>> trio{
      {0, 1, 2, 3, 4, 5, 6, 7, 8, 9},
      {0, 1, 2, 3, 4, 5, 6, 7, 10, 11},
      {0, 1, 2, 3, 4, 5, 6, 7, 12, 13}};
  const std::vector<int> target_subset{0, 1, 2, 3, 4, 5, 8, 10, 12, 13};

  int broad_wins = 0;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    Matrix pool = gen_prototype_pool(derive_seed(seed, "pool"), 20, 8);
    TrainConfig config;
    config.learning_rate = 0.3;
    config.epochs = 40;
    config.batch_size = 4;
    config.seed = seed;
    config.dev_fraction = 0.2;

    std::vector<Corpus> corpora;
    for (std::size_t i = 0; i < 3; ++i)
      corpora.push_back(make_lang("A" + std::to_string(i + 1), trio[i], 100,
                                  1.0, derive_seed(seed, 100 + i), pool));

    MultiHeadModel donor3 = init_model(EncoderConfig{2, 32, 8}, seed);
    for (const auto& corpus : corpora) add_head(donor3, corpus.inventory, seed);
    {
      std::vector<MixtureEntry> mixture;
      for (const auto& corpus : corpora) mixture.push_back({&corpus, 1.0});
      TrainConfig multi = config;
      multi.mode = TrainMode::kMultilingual;
      train(donor3, mixture, multi);
    }

    MultiHeadModel donor1 = init_model(EncoderConfig{2, 32, 8}, seed);
    add_head(donor1, corpora[0].inventory, seed);
    train(donor1, {{&corpora[0], 1.0}}, config);

    Corpus target = make_lang("TGT", target_subset, 50, 1.0,
                              derive_seed(seed, 999), pool);
    TrainConfig head_config = config;
    head_config.learning_rate = 2.0;
    auto [m3, rep3] = adapt_softmax(donor3, target, 0.1, head_config);
    auto [m1, rep1] = adapt_softmax(donor1, target, 0.1, head_config);
    INFO("seed " << seed << ": three-language donor "
                 << rep3.final_dev_per.at("TGT") << ", single "
                 << rep1.final_dev_per.at("TGT"));
    if (rep3.final_dev_per.at("TGT") <= rep1.final_dev_per.at("TGT"))
      ++broad_wins;
  }
  CHECK(broad_wins >= 2);
}
