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

#ifndef PCTC_DATA_HPP_
#define PCTC_DATA_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pctc/ctc.hpp"
#include "pctc/error.hpp"
#include "pctc/inventory.hpp"
#include "pctc/io.hpp"
#include "pctc/matrix.hpp"
#include "pctc/rng.hpp"

// Corpus representation plus a seeded synthetic generator. Each language
// draws its phones from one universal pool of prototype vectors, so
// inventory overlap between languages implies acoustic overlap: the
// desk-scale analog of related languages sharing phones.

namespace pctc {

struct Utterance {
  Matrix features;  // T x F
  LabelSeq labels;
  std::string language_id;
  std::string utterance_id;
  bool feasible = true;  // T >= minimal CTC alignment length
};

struct Corpus {
  std::string language_id;
  PhoneInventory inventory;
  std::vector<Utterance> utterances;
  std::vector<std::pair<std::string, std::string>> meta;

  std::size_t feature_dim() const {
    return utterances.empty() ? 0 : utterances.front().features.cols();
  }
};

struct SynthLanguageSpec {
  std::string language_id;
  std::vector<int> phone_pool_indices;  // which prototypes this language uses
  std::size_t num_utterances = 200;
  std::size_t min_phones_per_utterance = 3;
  std::size_t max_phones_per_utterance = 8;
  std::size_t min_frames_per_phone = 2;
  std::size_t max_frames_per_phone = 5;
  double noise_std = 0.3;
  std::uint64_t seed = 0;
};

inline std::string pool_phone_name(int pool_index) {
  std::ostringstream ss;
  ss << "p";
  if (pool_index < 10) ss << "0";
  ss << pool_index;
  return ss.str();
}

// The universal prototype pool: one mean vector per pool entry, drawn once
// per experiment so that languages sharing a pool index share acoustics.
inline Matrix gen_prototype_pool(std::uint64_t pool_seed,
                                 std::size_t pool_size,
                                 std::size_t feature_dim) {
  if (pool_size == 0 || feature_dim == 0)
    throw ConfigError("prototype pool: pool size and feature dim must be "
                      "positive");
  Matrix pool(pool_size, feature_dim);
  Rng rng(derive_seed(pool_seed, "prototype-pool"));
  std::normal_distribution<double> dist(0.0, 1.0);
  for (double& v : pool.storage()) v = dist(rng);
  return pool;
}

inline void validate_spec(const SynthLanguageSpec& spec,
                          std::size_t pool_size) {
  if (spec.language_id.empty())
    throw ConfigError("synth spec: empty language id");
  if (spec.phone_pool_indices.size() < 1)
    throw ConfigError("synth spec for '" + spec.language_id +
                      "': needs at least one phone");
  std::vector<int> sorted = spec.phone_pool_indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("synth spec for '" + spec.language_id +
                      "': duplicate pool index");
  for (int idx : spec.phone_pool_indices)
    if (idx < 0 || static_cast<std::size_t>(idx) >= pool_size)
      throw ConfigError("synth spec for '" + spec.language_id +
                        "': pool index " + std::to_string(idx) +
                        " outside pool of size " + std::to_string(pool_size));
  if (spec.num_utterances == 0)
    throw ConfigError("synth spec for '" + spec.language_id +
                      "': zero utterances");
  if (spec.min_phones_per_utterance < 1 ||
      spec.max_phones_per_utterance < spec.min_phones_per_utterance)
    throw ConfigError("synth spec for '" + spec.language_id +
                      "': empty phones-per-utterance range");
  if (spec.min_frames_per_phone < 1 ||
      spec.max_frames_per_phone < spec.min_frames_per_phone)
    throw ConfigError("synth spec for '" + spec.language_id +
                      "': empty frames-per-phone range");
  if (spec.noise_std < 0.0)
    throw ConfigError("synth spec for '" + spec.language_id +
                      "': negative noise std");
}

// Each utterance is a concatenation of per-phone segments; each segment is
// the phone's prototype mean plus iid Gaussian noise per frame.
inline Corpus gen_synth_corpus(const SynthLanguageSpec& spec,
                               const Matrix& pool) {
  validate_spec(spec, pool.rows());
  const std::size_t F = pool.cols();

  Corpus corpus;
  corpus.language_id = spec.language_id;
  corpus.inventory.language_id = spec.language_id;
  corpus.inventory.phones.push_back(kBlankName);
  for (int idx : spec.phone_pool_indices)
    corpus.inventory.phones.push_back(pool_phone_name(idx));
  corpus.inventory.validate();

  Rng rng(derive_seed(spec.seed, "synth." + spec.language_id));
  std::uniform_int_distribution<std::size_t> num_phones_dist(
      spec.min_phones_per_utterance, spec.max_phones_per_utterance);
  std::uniform_int_distribution<std::size_t> duration_dist(
      spec.min_frames_per_phone, spec.max_frames_per_phone);
  std::uniform_int_distribution<std::size_t> phone_dist(
      0, spec.phone_pool_indices.size() - 1);
  std::normal_distribution<double> noise(0.0, 1.0);

  for (std::size_t u = 0; u < spec.num_utterances; ++u) {
    Utterance utt;
    utt.language_id = spec.language_id;
    {
      std::ostringstream id;
      id << spec.language_id << "_";
      std::string n = std::to_string(u);
      for (std::size_t pad = n.size(); pad < 4; ++pad) id << "0";
      id << n;
      utt.utterance_id = id.str();
    }
    const std::size_t num_phones = num_phones_dist(rng);
    std::vector<std::size_t> durations(num_phones);
    std::size_t total_frames = 0;
    utt.labels.reserve(num_phones);
    for (std::size_t p = 0; p < num_phones; ++p) {
      utt.labels.push_back(static_cast<int>(phone_dist(rng)) + 1);
      durations[p] = duration_dist(rng);
      total_frames += durations[p];
    }
    utt.features = Matrix(total_frames, F);
    std::size_t t = 0;
    for (std::size_t p = 0; p < num_phones; ++p) {
      const int pool_idx = spec.phone_pool_indices[utt.labels[p] - 1];
      for (std::size_t d = 0; d < durations[p]; ++d, ++t)
        for (std::size_t j = 0; j < F; ++j)
          utt.features(t, j) = pool(pool_idx, j) + spec.noise_std * noise(rng);
    }
    utt.feasible = total_frames >= min_feasible_frames(utt.labels);
    corpus.utterances.push_back(std::move(utt));
  }

  corpus.meta.emplace_back("generator", "synthetic");
  corpus.meta.emplace_back("pool_size", std::to_string(pool.rows()));
  corpus.meta.emplace_back("feature_dim", std::to_string(F));
  {
    std::ostringstream ss;
    for (std::size_t i = 0; i < spec.phone_pool_indices.size(); ++i)
      ss << (i ? " " : "") << spec.phone_pool_indices[i];
    corpus.meta.emplace_back("pool_indices", ss.str());
  }
  corpus.meta.emplace_back("utterances",
                           std::to_string(spec.num_utterances));
  corpus.meta.emplace_back("phones_per_utterance",
                           std::to_string(spec.min_phones_per_utterance) +
                               " " +
                               std::to_string(spec.max_phones_per_utterance));
  corpus.meta.emplace_back("frames_per_phone",
                           std::to_string(spec.min_frames_per_phone) + " " +
                               std::to_string(spec.max_frames_per_phone));
  {
    std::ostringstream ss;
    ss << spec.noise_std;
    corpus.meta.emplace_back("noise_std", ss.str());
  }
  corpus.meta.emplace_back("seed", std::to_string(spec.seed));
  return corpus;
}

// ---------------------------------------------------------------------------
// On-disk corpus layout:
//   inventory.txt              one phone per line, line 0 is the blank
//   transcripts.tsv            utterance_id TAB space-separated phone names
//   features/<id>.f64          header: T, F as little-endian u64;
//                              then T*F little-endian doubles
//   corpus.meta                key=value lines, must include language_id

inline void save_corpus(const Corpus& corpus, const std::string& dir_path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir_path) / "features", ec);
  if (ec)
    throw IoError("cannot create corpus directory " + dir_path + ": " +
                  ec.message());

  save_inventory(corpus.inventory,
                 (fs::path(dir_path) / "inventory.txt").string());

  std::ofstream meta((fs::path(dir_path) / "corpus.meta").string(),
                     std::ios::binary);
  if (!meta) throw IoError("cannot write corpus.meta in " + dir_path);
  meta << "language_id=" << corpus.language_id << "\n";
  for (const auto& [k, v] : corpus.meta) meta << k << "=" << v << "\n";

  std::ofstream tsv((fs::path(dir_path) / "transcripts.tsv").string(),
                    std::ios::binary);
  if (!tsv) throw IoError("cannot write transcripts.tsv in " + dir_path);
  for (const auto& utt : corpus.utterances) {
    tsv << utt.utterance_id << "\t";
    for (std::size_t i = 0; i < utt.labels.size(); ++i)
      tsv << (i ? " " : "") << corpus.inventory.phones[utt.labels[i]];
    tsv << "\n";

    std::ofstream feat((fs::path(dir_path) / "features" /
                        (utt.utterance_id + ".f64"))
                           .string(),
                       std::ios::binary);
    if (!feat)
      throw IoError("cannot write features for " + utt.utterance_id);
    write_le_u64(feat, utt.features.rows());
    write_le_u64(feat, utt.features.cols());
    for (double v : utt.features.storage()) write_le_double(feat, v);
  }
}

inline Corpus load_corpus(const std::string& dir_path) {
  namespace fs = std::filesystem;
  const fs::path dir(dir_path);
  if (!fs::exists(dir / "inventory.txt"))
    throw IoError("missing inventory: " + (dir / "inventory.txt").string());

  Corpus corpus;

  {
    std::ifstream meta(dir / "corpus.meta");
    if (!meta)
      throw IoError("missing corpus.meta in " + dir_path);
    std::string line;
    while (std::getline(meta, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw IoError((dir / "corpus.meta").string() +
                      ": malformed line '" + line + "'");
      std::string key = line.substr(0, eq), value = line.substr(eq + 1);
      if (key == "language_id")
        corpus.language_id = value;
      else
        corpus.meta.emplace_back(key, value);
    }
    if (corpus.language_id.empty())
      throw IoError((dir / "corpus.meta").string() + ": missing language_id");
  }

  corpus.inventory = load_inventory((dir / "inventory.txt").string(),
                                    corpus.language_id);

  std::ifstream tsv(dir / "transcripts.tsv");
  if (!tsv)
    throw IoError("missing transcripts.tsv in " + dir_path);
  std::string line;
  std::size_t line_no = 0;
  std::size_t feature_dim = 0;
  while (std::getline(tsv, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw IoError("transcripts.tsv line " + std::to_string(line_no) +
                    ": missing TAB separator");
    Utterance utt;
    utt.language_id = corpus.language_id;
    utt.utterance_id = line.substr(0, tab);
    std::istringstream phones(line.substr(tab + 1));
    std::string phone;
    while (phones >> phone) {
      int idx = corpus.inventory.index_of(phone);
      if (idx < 0)
        throw IoError("transcripts.tsv line " + std::to_string(line_no) +
                      ": unknown phone '" + phone + "'");
      if (idx == kBlank)
        throw IoError("transcripts.tsv line " + std::to_string(line_no) +
                      ": blank symbol in transcript");
      utt.labels.push_back(idx);
    }

    const fs::path feat_path = dir / "features" / (utt.utterance_id + ".f64");
    std::ifstream feat(feat_path, std::ios::binary);
    if (!feat)
      throw IoError("missing feature file " + feat_path.string());
    std::uint64_t T = read_le_u64(feat, feat_path.string() + " header");
    std::uint64_t F = read_le_u64(feat, feat_path.string() + " header");
    if (T == 0 || F == 0)
      throw IoError(feat_path.string() + ": zero dimension in header");
    if (feature_dim == 0)
      feature_dim = F;
    else if (F != feature_dim)
      throw IoError(feat_path.string() + ": feature dim " +
                    std::to_string(F) + " != corpus dim " +
                    std::to_string(feature_dim));
    utt.features = Matrix(T, F);
    for (double& v : utt.features.storage())
      v = read_le_double(feat, feat_path.string());
    char extra;
    if (feat.read(&extra, 1), feat.gcount() != 0)
      throw IoError(feat_path.string() + ": trailing bytes");
    utt.feasible = T >= min_feasible_frames(utt.labels);
    corpus.utterances.push_back(std::move(utt));
  }
  return corpus;
}

// Deterministic, seed-keyed subset: a seeded shuffle fixes one permutation
// and a fraction f takes its first ceil(f*N) entries, so smaller fractions
// are always nested inside larger ones. Fraction 1 is the identity.
inline Corpus select_fraction(const Corpus& corpus, double fraction,
                              std::uint64_t selection_seed) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw ConfigError("select_fraction: fraction must be in (0, 1], got " +
                      std::to_string(fraction));
  if (fraction == 1.0) return corpus;
  const std::size_t n = corpus.utterances.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(selection_seed, "fraction-select"));
  std::shuffle(perm.begin(), perm.end(), rng);
  const std::size_t keep = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n)));
  Corpus out;
  out.language_id = corpus.language_id;
  out.inventory = corpus.inventory;
  out.meta = corpus.meta;
  for (std::size_t i = 0; i < keep && i < n; ++i)
    out.utterances.push_back(corpus.utterances[perm[i]]);
  return out;
}

// Deterministic train/dev split by seeded shuffle; dev gets
// max(1, round(dev_fraction * N)) utterances.
inline std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus,
                                              double dev_fraction,
                                              std::uint64_t seed) {
  if (corpus.utterances.empty())
    throw ConfigError("split_corpus: empty corpus");
  if (!(dev_fraction > 0.0) || dev_fraction >= 1.0)
    throw ConfigError("split_corpus: dev fraction must be in (0, 1)");
  const std::size_t n = corpus.utterances.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(seed, "dev-split." + corpus.language_id));
  std::shuffle(perm.begin(), perm.end(), rng);
  std::size_t dev_count = static_cast<std::size_t>(
      std::lround(dev_fraction * static_cast<double>(n)));
  dev_count = std::max<std::size_t>(1, std::min(dev_count, n - 1));

  Corpus train, dev;
  for (Corpus* c : {&train, &dev}) {
    c->language_id = corpus.language_id;
    c->inventory = corpus.inventory;
    c->meta = corpus.meta;
  }
  for (std::size_t i = 0; i < n; ++i) {
    (i < dev_count ? dev : train)
        .utterances.push_back(corpus.utterances[perm[i]]);
  }
  return {std::move(train), std::move(dev)};
}

}  // namespace pctc

#endif  // PCTC_DATA_HPP_
