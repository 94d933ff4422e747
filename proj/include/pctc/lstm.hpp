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

#ifndef PCTC_LSTM_HPP_
#define PCTC_LSTM_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pctc/error.hpp"
#include "pctc/matrix.hpp"
#include "pctc/rng.hpp"

// Stacked bidirectional LSTM encoder mapping a feature sequence X (n x F)
// to a shared embedding e (n x 2*hidden_dim), with analytic gradients via
// backpropagation through time. No peepholes, no projection, no dropout;
// initial hidden and cell states are zero in both directions.

namespace pctc {

struct EncoderConfig {
  std::size_t num_layers = 2;
  std::size_t hidden_dim = 32;  // cells per direction
  std::size_t input_dim = 8;    // feature dimension F

  // 6 layers of 360 cells per direction is the full-scale architecture;
  // the toy default above trains in seconds on one core.
  static EncoderConfig full_scale(std::size_t input_dim) {
    return {6, 360, input_dim};
  }
};

// One direction of one layer. The four gates are packed row-wise in the
// order [input, forget, cell, output], so w_input is (4h x d),
// w_recurrent is (4h x h) and bias has 4h entries.
struct LstmDirectionParams {
  Matrix w_input;
  Matrix w_recurrent;
  std::vector<double> bias;
};

struct LstmLayerParams {
  LstmDirectionParams fwd;
  LstmDirectionParams bwd;
};

struct EncoderParams {
  std::vector<LstmLayerParams> layers;
};

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline LstmDirectionParams init_direction(std::size_t in_dim,
                                          std::size_t hidden, Rng& rng) {
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  LstmDirectionParams p;
  p.w_input = Matrix(4 * hidden, in_dim);
  p.w_recurrent = Matrix(4 * hidden, hidden);
  p.bias.assign(4 * hidden, 0.0);
  for (double& v : p.w_input.storage()) v = dist(rng);
  for (double& v : p.w_recurrent.storage()) v = dist(rng);
  for (double& v : p.bias) v = dist(rng);
  return p;
}

inline void check_direction_shapes(const LstmDirectionParams& p,
                                   std::size_t in_dim, std::size_t hidden,
                                   const std::string& where) {
  if (p.w_input.rows() != 4 * hidden || p.w_input.cols() != in_dim ||
      p.w_recurrent.rows() != 4 * hidden ||
      p.w_recurrent.cols() != hidden || p.bias.size() != 4 * hidden)
    throw ConfigError(where + ": parameter shapes inconsistent with input " +
                      std::to_string(in_dim) + " and hidden " +
                      std::to_string(hidden));
}

}  // namespace detail

inline std::size_t layer_input_dim(const EncoderConfig& config,
                                   std::size_t layer) {
  return layer == 0 ? config.input_dim : 2 * config.hidden_dim;
}

// Uniform [-0.05, 0.05] weights from a seeded generator.
inline EncoderParams init_encoder(const EncoderConfig& config,
                                  std::uint64_t seed) {
  if (config.num_layers < 1 || config.hidden_dim < 1 ||
      config.input_dim < 1)
    throw ConfigError("init_encoder: layers, hidden and input dims must be "
                      "at least 1");
  EncoderParams params;
  Rng rng(seed);
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    std::size_t d = layer_input_dim(config, l);
    LstmLayerParams layer;
    layer.fwd = detail::init_direction(d, config.hidden_dim, rng);
    layer.bwd = detail::init_direction(d, config.hidden_dim, rng);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

inline EncoderParams zeros_like(const EncoderParams& params) {
  EncoderParams out;
  for (const auto& layer : params.layers) {
    LstmLayerParams z;
    for (auto [src, dst] : {std::pair{&layer.fwd, &z.fwd},
                            std::pair{&layer.bwd, &z.bwd}}) {
      dst->w_input = Matrix(src->w_input.rows(), src->w_input.cols());
      dst->w_recurrent =
          Matrix(src->w_recurrent.rows(), src->w_recurrent.cols());
      dst->bias.assign(src->bias.size(), 0.0);
    }
    out.layers.push_back(std::move(z));
  }
  return out;
}

// Single gated recurrence step: i,f,o = sigmoid, g = tanh,
// c_t = f . c_prev + i . g, h_t = o . tanh(c_t).
inline std::pair<std::vector<double>, std::vector<double>> lstm_cell_step(
    const LstmDirectionParams& params, std::span<const double> x_t,
    std::span<const double> h_prev, std::span<const double> c_prev) {
  const std::size_t hidden = params.w_recurrent.cols();
  detail::check_direction_shapes(params, x_t.size(), hidden,
                                 "lstm_cell_step");
  if (h_prev.size() != hidden || c_prev.size() != hidden)
    throw ConfigError("lstm_cell_step: state size mismatch");

  std::vector<double> pre(params.bias.begin(), params.bias.end());
  gemv_acc(params.w_input, x_t, pre);
  gemv_acc(params.w_recurrent, h_prev, pre);

  std::vector<double> h(hidden), c(hidden);
  for (std::size_t j = 0; j < hidden; ++j) {
    double i = detail::sigmoid(pre[j]);
    double f = detail::sigmoid(pre[hidden + j]);
    double g = std::tanh(pre[2 * hidden + j]);
    double o = detail::sigmoid(pre[3 * hidden + j]);
    c[j] = f * c_prev[j] + i * g;
    h[j] = o * std::tanh(c[j]);
  }
  return {std::move(h), std::move(c)};
}

namespace detail {

// Post-activation gate values and states for every step of one direction,
// stored in processing order. Recomputation would be cheaper on memory but
// these models are tiny and exactness of the backward pass matters more.
struct DirectionCache {
  Matrix gates;   // n x 4h, [i f g o] per step
  Matrix cell;    // n x h
  Matrix tanh_c;  // n x h
  Matrix hidden;  // n x h
};

// Runs one direction over `input` visiting rows in processing order:
// row t for the forward direction, row n-1-t for the backward one.
inline DirectionCache run_direction(const LstmDirectionParams& params,
                                    const Matrix& input, bool reversed) {
  const std::size_t n = input.rows();
  const std::size_t hidden = params.w_recurrent.cols();
  check_direction_shapes(params, input.cols(), hidden, "bilstm_layer");

  DirectionCache cache;
  cache.gates = Matrix(n, 4 * hidden);
  cache.cell = Matrix(n, hidden);
  cache.tanh_c = Matrix(n, hidden);
  cache.hidden = Matrix(n, hidden);

  std::vector<double> h(hidden, 0.0), c(hidden, 0.0);
  std::vector<double> pre(4 * hidden);
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t row = reversed ? n - 1 - step : step;
    for (std::size_t j = 0; j < 4 * hidden; ++j) pre[j] = params.bias[j];
    gemv_acc(params.w_input, input.row(row), pre);
    gemv_acc(params.w_recurrent, h, pre);
    for (std::size_t j = 0; j < hidden; ++j) {
      double i = sigmoid(pre[j]);
      double f = sigmoid(pre[hidden + j]);
      double g = std::tanh(pre[2 * hidden + j]);
      double o = sigmoid(pre[3 * hidden + j]);
      c[j] = f * c[j] + i * g;
      double tc = std::tanh(c[j]);
      h[j] = o * tc;
      cache.gates(step, j) = i;
      cache.gates(step, hidden + j) = f;
      cache.gates(step, 2 * hidden + j) = g;
      cache.gates(step, 3 * hidden + j) = o;
      cache.cell(step, j) = c[j];
      cache.tanh_c(step, j) = tc;
      cache.hidden(step, j) = h[j];
    }
  }
  return cache;
}

// BPTT through one direction. grad_hidden is n x h in processing order;
// accumulates parameter gradients and adds input gradients (in original
// row order) into grad_input.
inline void backprop_direction(const LstmDirectionParams& params,
                               const Matrix& input,
                               const DirectionCache& cache, bool reversed,
                               const Matrix& grad_hidden,
                               LstmDirectionParams& grads,
                               Matrix& grad_input) {
  const std::size_t n = input.rows();
  const std::size_t hidden = params.w_recurrent.cols();

  std::vector<double> dh(hidden, 0.0), dc(hidden, 0.0);
  std::vector<double> dpre(4 * hidden);
  for (std::size_t step = n; step-- > 0;) {
    const std::size_t row = reversed ? n - 1 - step : step;
    for (std::size_t j = 0; j < hidden; ++j) {
      double dh_total = dh[j] + grad_hidden(step, j);
      double i = cache.gates(step, j);
      double f = cache.gates(step, hidden + j);
      double g = cache.gates(step, 2 * hidden + j);
      double o = cache.gates(step, 3 * hidden + j);
      double tc = cache.tanh_c(step, j);
      double c_prev = step > 0 ? cache.cell(step - 1, j) : 0.0;

      double dc_total = dc[j] + dh_total * o * (1.0 - tc * tc);
      dpre[j] = dc_total * g * i * (1.0 - i);
      dpre[hidden + j] = dc_total * c_prev * f * (1.0 - f);
      dpre[2 * hidden + j] = dc_total * i * (1.0 - g * g);
      dpre[3 * hidden + j] = dh_total * tc * o * (1.0 - o);
      dc[j] = dc_total * f;
    }
    outer_acc(dpre, input.row(row), grads.w_input);
    if (step > 0)
      outer_acc(dpre, cache.hidden.row(step - 1), grads.w_recurrent);
    for (std::size_t j = 0; j < 4 * hidden; ++j) grads.bias[j] += dpre[j];
    gemv_transpose_acc(params.w_input, dpre, grad_input.row(row));
    std::fill(dh.begin(), dh.end(), 0.0);
    gemv_transpose_acc(params.w_recurrent, dpre, dh);
  }
}

struct LayerCache {
  DirectionCache fwd;
  DirectionCache bwd;
};

}  // namespace detail

// One bidirectional layer: row t of the output is the concatenation of the
// forward hidden state at t and the backward hidden state at t (the
// backward pass having consumed the sequence in reverse).
inline Matrix bilstm_layer_forward(const LstmLayerParams& params,
                                   const Matrix& input) {
  if (input.rows() == 0) throw ConfigError("bilstm_layer: empty sequence");
  const std::size_t n = input.rows();
  const std::size_t hidden = params.fwd.w_recurrent.cols();
  detail::DirectionCache fc = detail::run_direction(params.fwd, input, false);
  detail::DirectionCache bc = detail::run_direction(params.bwd, input, true);
  Matrix out(n, 2 * hidden);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < hidden; ++j) {
      out(t, j) = fc.hidden(t, j);
      out(t, hidden + j) = bc.hidden(n - 1 - t, j);
    }
  return out;
}

// Shared embedding plus everything the backward pass needs.
struct EncoderOutput {
  Matrix e;  // n x 2*hidden_dim
  std::vector<Matrix> layer_inputs;
  std::vector<detail::LayerCache> layer_caches;
  std::size_t hidden_dim = 0;
};

inline EncoderOutput encoder_forward(const EncoderConfig& config,
                                     const EncoderParams& params,
                                     const Matrix& features) {
  if (params.layers.size() != config.num_layers)
    throw ConfigError("encoder_forward: config expects " +
                      std::to_string(config.num_layers) + " layers, params " +
                      "have " + std::to_string(params.layers.size()));
  if (features.cols() != config.input_dim)
    throw ConfigError("encoder_forward: feature dim " +
                      std::to_string(features.cols()) + " != configured " +
                      std::to_string(config.input_dim));
  if (features.rows() == 0)
    throw ConfigError("encoder_forward: empty sequence");

  const std::size_t n = features.rows();
  const std::size_t hidden = config.hidden_dim;
  EncoderOutput out;
  out.hidden_dim = hidden;
  Matrix current = features;
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    const LstmLayerParams& layer = params.layers[l];
    detail::check_direction_shapes(layer.fwd, current.cols(), hidden,
                                   "encoder_forward layer " +
                                       std::to_string(l));
    detail::LayerCache cache;
    cache.fwd = detail::run_direction(layer.fwd, current, false);
    cache.bwd = detail::run_direction(layer.bwd, current, true);
    Matrix next(n, 2 * hidden);
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t j = 0; j < hidden; ++j) {
        next(t, j) = cache.fwd.hidden(t, j);
        next(t, hidden + j) = cache.bwd.hidden(n - 1 - t, j);
      }
    out.layer_inputs.push_back(std::move(current));
    out.layer_caches.push_back(std::move(cache));
    current = std::move(next);
  }
  out.e = std::move(current);
  return out;
}

// Backpropagation through the whole stack. Returns gradients for every
// parameter tensor plus the gradient with respect to the input features.
inline std::pair<EncoderParams, Matrix> encoder_backward(
    const EncoderParams& params, const EncoderOutput& cache,
    const Matrix& grad_e) {
  if (cache.layer_caches.size() != params.layers.size() ||
      cache.layer_inputs.size() != params.layers.size())
    throw ConfigError("encoder_backward: cache does not match parameters");
  if (grad_e.rows() != cache.e.rows() || grad_e.cols() != cache.e.cols())
    throw ConfigError("encoder_backward: grad shape " +
                      shape_string(grad_e) + " != encoder output shape " +
                      shape_string(cache.e));

  const std::size_t n = cache.e.rows();
  const std::size_t hidden = cache.hidden_dim;
  EncoderParams grads = zeros_like(params);

  Matrix grad_out = grad_e;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const Matrix& input = cache.layer_inputs[l];
    if (params.layers[l].fwd.w_input.cols() != input.cols())
      throw ConfigError("encoder_backward: stale cache for layer " +
                        std::to_string(l));
    Matrix grad_fwd(n, hidden), grad_bwd(n, hidden);
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t j = 0; j < hidden; ++j) {
        grad_fwd(t, j) = grad_out(t, j);
        grad_bwd(t, j) = grad_out(n - 1 - t, hidden + j);
      }
    Matrix grad_input(input.rows(), input.cols());
    detail::backprop_direction(params.layers[l].fwd, input,
                               cache.layer_caches[l].fwd, false, grad_fwd,
                               grads.layers[l].fwd, grad_input);
    detail::backprop_direction(params.layers[l].bwd, input,
                               cache.layer_caches[l].bwd, true, grad_bwd,
                               grads.layers[l].bwd, grad_input);
    grad_out = std::move(grad_input);
  }
  return {std::move(grads), std::move(grad_out)};
}

// Flat views over all tensors of an EncoderParams, in a fixed order. Used
// by the trainer for clipping/updates and by serialization.
template <typename Params, typename Fn>
void for_each_encoder_tensor(Params& params, Fn&& fn) {
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& layer = params.layers[l];
    std::string base = "encoder.layer" + std::to_string(l);
    fn(base + ".fwd.W", layer.fwd.w_input);
    fn(base + ".fwd.U", layer.fwd.w_recurrent);
    fn(base + ".fwd.b", layer.fwd.bias);
    fn(base + ".bwd.W", layer.bwd.w_input);
    fn(base + ".bwd.U", layer.bwd.w_recurrent);
    fn(base + ".bwd.b", layer.bwd.bias);
  }
}

}  // namespace pctc

#endif  // PCTC_LSTM_HPP_
