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

#ifndef PCTC_MODEL_HPP_
#define PCTC_MODEL_HPP_

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pctc/error.hpp"
#include "pctc/inventory.hpp"
#include "pctc/io.hpp"
#include "pctc/lstm.hpp"
#include "pctc/matrix.hpp"

// The multi-lingual architecture: one shared BiLSTM encoder, one affine
// softmax head per language projecting the embedding onto that language's
// phone inventory. A forward pass for language L touches the encoder and
// L's head only.

namespace pctc {

struct LanguageHead {
  std::string language_id;
  Matrix weight;             // K x 2*hidden_dim
  std::vector<double> bias;  // K

  std::size_t parameter_count() const {
    return weight.size() + bias.size();
  }
};

inline LanguageHead init_head(const std::string& language_id,
                              std::size_t num_phones, std::size_t embed_dim,
                              std::uint64_t seed) {
  if (num_phones < 2)
    throw ConfigError("init_head: inventory must have at least 2 entries");
  LanguageHead head;
  head.language_id = language_id;
  head.weight = Matrix(num_phones, embed_dim);
  head.bias.assign(num_phones, 0.0);
  Rng rng(seed);
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  for (double& v : head.weight.storage()) v = dist(rng);
  return head;
}

struct MultiHeadModel {
  EncoderConfig config;
  EncoderParams encoder;
  std::map<std::string, LanguageHead> heads;
  std::map<std::string, PhoneInventory> inventories;

  std::size_t embed_dim() const { return 2 * config.hidden_dim; }

  const LanguageHead& head(const std::string& language_id) const {
    auto it = heads.find(language_id);
    if (it == heads.end())
      throw ConfigError("no head for language '" + language_id + "'");
    return it->second;
  }
  LanguageHead& head(const std::string& language_id) {
    auto it = heads.find(language_id);
    if (it == heads.end())
      throw ConfigError("no head for language '" + language_id + "'");
    return it->second;
  }
  const PhoneInventory& inventory(const std::string& language_id) const {
    auto it = inventories.find(language_id);
    if (it == inventories.end())
      throw ConfigError("no inventory for language '" + language_id + "'");
    return it->second;
  }
};

inline MultiHeadModel init_model(const EncoderConfig& config,
                                 std::uint64_t seed) {
  MultiHeadModel model;
  model.config = config;
  model.encoder = init_encoder(config, derive_seed(seed, "encoder"));
  return model;
}

// Registers a fresh head (zero bias, seeded uniform weights) for a
// language. The head's K comes from the inventory size.
inline void add_head(MultiHeadModel& model, const PhoneInventory& inventory,
                     std::uint64_t seed) {
  inventory.validate();
  if (model.heads.count(inventory.language_id))
    throw ConfigError("head for language '" + inventory.language_id +
                      "' already registered");
  model.heads[inventory.language_id] =
      init_head(inventory.language_id, inventory.size(), model.embed_dim(),
                derive_seed(seed, "head." + inventory.language_id));
  model.inventories[inventory.language_id] = inventory;
}

// logits[t] = W_L e[t] + b_L for the one named head.
inline Matrix project_head(const MultiHeadModel& model,
                           const std::string& language_id, const Matrix& e) {
  const LanguageHead& head = model.head(language_id);
  if (e.cols() != head.weight.cols())
    throw ConfigError("project_head: embedding width " +
                      std::to_string(e.cols()) + " != head input width " +
                      std::to_string(head.weight.cols()));
  const std::size_t T = e.rows();
  const std::size_t K = head.weight.rows();
  Matrix logits(T, K);
  for (std::size_t t = 0; t < T; ++t) {
    auto erow = e.row(t);
    for (std::size_t k = 0; k < K; ++k) {
      const double* wrow = head.weight.data() + k * head.weight.cols();
      double acc = head.bias[k];
      for (std::size_t j = 0; j < erow.size(); ++j) acc += wrow[j] * erow[j];
      logits(t, k) = acc;
    }
  }
  return logits;
}

struct HeadGrads {
  Matrix weight;
  std::vector<double> bias;
};

// Backward of project_head: gradients for W_L, b_L and the embedding.
inline std::pair<HeadGrads, Matrix> head_backward(const LanguageHead& head,
                                                  const Matrix& e,
                                                  const Matrix& grad_logits) {
  if (grad_logits.rows() != e.rows() ||
      grad_logits.cols() != head.weight.rows())
    throw ConfigError("head_backward: gradient shape mismatch");
  HeadGrads grads;
  grads.weight = Matrix(head.weight.rows(), head.weight.cols());
  grads.bias.assign(head.bias.size(), 0.0);
  Matrix grad_e(e.rows(), e.cols());
  for (std::size_t t = 0; t < e.rows(); ++t) {
    auto erow = e.row(t);
    for (std::size_t k = 0; k < head.weight.rows(); ++k) {
      const double g = grad_logits(t, k);
      if (g == 0.0) continue;
      grads.bias[k] += g;
      double* wgrow = grads.weight.data() + k * grads.weight.cols();
      const double* wrow = head.weight.data() + k * head.weight.cols();
      double* egrow = grad_e.data() + t * grad_e.cols();
      for (std::size_t j = 0; j < erow.size(); ++j) {
        wgrow[j] += g * erow[j];
        egrow[j] += g * wrow[j];
      }
    }
  }
  return {std::move(grads), std::move(grad_e)};
}

// ---------------------------------------------------------------------------
// Serialization: plain-text header describing config, inventories and
// tensor shapes, then the raw little-endian payload in declared order.
// Round trips are bitwise exact.

inline constexpr const char* kModelMagic = "polyglot-ctc-model";
inline constexpr int kModelVersion = 1;

namespace detail {

template <typename Fn>
void for_each_model_tensor(MultiHeadModel& model, Fn&& fn) {
  for_each_encoder_tensor(model.encoder, fn);
  for (auto& [id, head] : model.heads) {
    fn("head." + id + ".W", head.weight);
    fn("head." + id + ".b", head.bias);
  }
}

template <typename Fn>
void for_each_model_tensor(const MultiHeadModel& model, Fn&& fn) {
  for_each_encoder_tensor(model.encoder, fn);
  for (const auto& [id, head] : model.heads) {
    fn("head." + id + ".W", head.weight);
    fn("head." + id + ".b", head.bias);
  }
}

inline std::pair<std::size_t, std::size_t> tensor_shape(const Matrix& m) {
  return {m.rows(), m.cols()};
}
inline std::pair<std::size_t, std::size_t> tensor_shape(
    const std::vector<double>& v) {
  return {v.size(), 1};
}

}  // namespace detail

inline void save_model(const MultiHeadModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file " + path);

  out << kModelMagic << " v" << kModelVersion << "\n";
  out << "layers " << model.config.num_layers << "\n";
  out << "hidden " << model.config.hidden_dim << "\n";
  out << "input " << model.config.input_dim << "\n";
  out << "languages " << model.inventories.size() << "\n";
  for (const auto& [id, inv] : model.inventories) {
    out << "language " << id << " " << inv.size() << "\n";
    for (const auto& phone : inv.phones) out << phone << "\n";
  }

  std::size_t count = 0;
  detail::for_each_model_tensor(model,
                                [&](const std::string&, const auto&) {
                                  ++count;
                                });
  out << "tensors " << count << "\n";
  detail::for_each_model_tensor(
      model, [&](const std::string& name, const auto& tensor) {
        auto [r, c] = detail::tensor_shape(tensor);
        out << "tensor " << name << " " << r << " " << c << "\n";
      });
  out << "payload\n";
  detail::for_each_model_tensor(
      model, [&](const std::string&, const auto& tensor) {
        if constexpr (std::is_same_v<std::decay_t<decltype(tensor)>,
                                     Matrix>) {
          for (double v : tensor.storage()) write_le_double(out, v);
        } else {
          for (double v : tensor) write_le_double(out, v);
        }
      });
  if (!out) throw IoError("write failure on model file " + path);
}

inline MultiHeadModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path);

  auto next_line = [&](const std::string& what) {
    std::string line;
    if (!std::getline(in, line))
      throw IoError(path + ": truncated model file while reading " + what);
    return line;
  };
  auto expect_key = [&](const std::string& line, const std::string& key,
                        const std::string& what) {
    std::istringstream ss(line);
    std::string k;
    ss >> k;
    if (k != key)
      throw IoError(path + ": expected '" + key + "' while reading " + what +
                    ", got '" + line + "'");
    return ss;
  };

  std::string magic_line = next_line("magic");
  {
    std::istringstream ss(magic_line);
    std::string magic, version;
    ss >> magic >> version;
    if (magic != kModelMagic)
      throw IoError(path + ": not a model file (bad magic '" + magic + "')");
    if (version != "v" + std::to_string(kModelVersion))
      throw IoError(path + ": unsupported model version '" + version + "'");
  }

  MultiHeadModel model;
  {
    auto ss = expect_key(next_line("layers"), "layers", "header");
    ss >> model.config.num_layers;
  }
  {
    auto ss = expect_key(next_line("hidden"), "hidden", "header");
    ss >> model.config.hidden_dim;
  }
  {
    auto ss = expect_key(next_line("input"), "input", "header");
    ss >> model.config.input_dim;
  }
  std::size_t num_languages = 0;
  {
    auto ss = expect_key(next_line("languages"), "languages", "header");
    ss >> num_languages;
  }
  for (std::size_t i = 0; i < num_languages; ++i) {
    auto ss = expect_key(next_line("language"), "language", "inventory");
    std::string id;
    std::size_t k = 0;
    ss >> id >> k;
    if (id.empty() || k < 2)
      throw IoError(path + ": malformed language entry");
    PhoneInventory inv;
    inv.language_id = id;
    for (std::size_t p = 0; p < k; ++p)
      inv.phones.push_back(next_line("phone name"));
    inv.validate();
    model.inventories[id] = inv;
    LanguageHead head;
    head.language_id = id;
    model.heads[id] = head;
  }

  std::size_t tensor_count = 0;
  {
    auto ss = expect_key(next_line("tensors"), "tensors", "header");
    ss >> tensor_count;
  }
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>>
      declared;
  for (std::size_t i = 0; i < tensor_count; ++i) {
    auto ss = expect_key(next_line("tensor"), "tensor", "tensor list");
    std::string name;
    std::size_t r = 0, c = 0;
    ss >> name >> r >> c;
    if (name.empty() || r == 0 || c == 0)
      throw IoError(path + ": malformed tensor declaration");
    declared.emplace_back(name, std::make_pair(r, c));
  }
  if (next_line("payload marker") != "payload")
    throw IoError(path + ": missing payload marker");

  // Size the in-memory tensors from the header, then fill them in order.
  model.encoder = EncoderParams{};
  model.encoder.layers.resize(model.config.num_layers);
  const std::size_t hidden = model.config.hidden_dim;
  for (std::size_t l = 0; l < model.config.num_layers; ++l) {
    std::size_t d = layer_input_dim(model.config, l);
    for (auto* dir :
         {&model.encoder.layers[l].fwd, &model.encoder.layers[l].bwd}) {
      dir->w_input = Matrix(4 * hidden, d);
      dir->w_recurrent = Matrix(4 * hidden, hidden);
      dir->bias.assign(4 * hidden, 0.0);
    }
  }
  for (auto& [id, head] : model.heads) {
    std::size_t k = model.inventories[id].size();
    head.weight = Matrix(k, 2 * hidden);
    head.bias.assign(k, 0.0);
  }

  std::size_t cursor = 0;
  detail::for_each_model_tensor(
      model, [&](const std::string& name, auto& tensor) {
        if (cursor >= declared.size())
          throw IoError(path + ": tensor list shorter than model layout");
        const auto& [decl_name, shape] = declared[cursor++];
        auto [r, c] = detail::tensor_shape(tensor);
        if (decl_name != name || shape.first != r || shape.second != c)
          throw IoError(path + ": tensor '" + decl_name + "' (" +
                        std::to_string(shape.first) + "x" +
                        std::to_string(shape.second) +
                        ") does not match expected '" + name + "' (" +
                        std::to_string(r) + "x" + std::to_string(c) + ")");
        if constexpr (std::is_same_v<std::decay_t<decltype(tensor)>,
                                     Matrix>) {
          for (double& v : tensor.storage())
            v = read_le_double(in, "tensor " + name);
        } else {
          for (double& v : tensor) v = read_le_double(in, "tensor " + name);
        }
      });
  if (cursor != declared.size())
    throw IoError(path + ": tensor list longer than model layout");
  char extra;
  if (in.read(&extra, 1), in.gcount() != 0)
    throw IoError(path + ": trailing bytes after payload");
  return model;
}

}  // namespace pctc

#endif  // PCTC_MODEL_HPP_
