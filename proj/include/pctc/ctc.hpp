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

#ifndef PCTC_CTC_HPP_
#define PCTC_CTC_HPP_

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pctc/error.hpp"
#include "pctc/matrix.hpp"

// Connectionist Temporal Classification loss, following the forward-backward
// recursions of Graves et al. (ICML 2006), all in log domain with -inf for
// probability zero. The blank symbol has index 0 in every inventory.

namespace pctc {

constexpr int kBlank = 0;

// Phone indices, never containing the blank.
using LabelSeq = std::vector<int>;

struct CtcTables {
  Matrix alpha;           // T x (2u+1), log domain
  Matrix beta;            // T x (2u+1), log domain
  double log_likelihood;  // log P(z | X)
};

// Collapses maximal runs of identical symbols to one, then removes blanks:
// the reduction that maps a frame-level path to a label sequence.
inline LabelSeq ctc_reduce(const std::vector<int>& path) {
  LabelSeq out;
  int prev = -1;
  for (int sym : path) {
    if (sym != prev && sym != kBlank) out.push_back(sym);
    prev = sym;
  }
  return out;
}

// z_1..z_u -> blank, z_1, blank, z_2, ..., blank (length 2u+1).
inline std::vector<int> extend_labels(const LabelSeq& z) {
  std::vector<int> ext(2 * z.size() + 1, kBlank);
  for (std::size_t i = 0; i < z.size(); ++i) ext[2 * i + 1] = z[i];
  return ext;
}

// Shortest T admitting an alignment: one frame per label plus a separating
// blank between adjacent repeats.
inline std::size_t min_feasible_frames(const LabelSeq& z) {
  std::size_t t = z.size();
  for (std::size_t i = 1; i < z.size(); ++i)
    if (z[i] == z[i - 1]) ++t;
  return t;
}

namespace detail {

inline void validate_labels(const LabelSeq& z, std::size_t num_classes) {
  for (int label : z) {
    if (label <= kBlank || static_cast<std::size_t>(label) >= num_classes)
      throw ConfigError("label out of inventory: index " +
                        std::to_string(label) + " with K=" +
                        std::to_string(num_classes));
  }
}

inline void validate_log_posteriors(const Matrix& lp) {
  if (lp.rows() == 0) throw ConfigError("ctc: empty sequence");
  for (std::size_t t = 0; t < lp.rows(); ++t) {
    double sum = 0.0;
    for (double v : lp.row(t)) sum += std::exp(v);
    if (std::abs(sum - 1.0) > 1e-9)
      throw ConfigError("ctc: log_posteriors row " + std::to_string(t) +
                        " sums to " + std::to_string(sum) + ", expected 1");
  }
}

// Skip from s-2 is allowed only across a blank between distinct phones.
inline bool skip_allowed(const std::vector<int>& ext, std::size_t s) {
  return s >= 2 && ext[s] != kBlank && ext[s] != ext[s - 2];
}

}  // namespace detail

// Log-domain forward-backward over the blank-extended label sequence.
// alpha[t][s] and beta[t][s] both include the emission at frame t, so
// log_sum_exp_s(alpha[t][s] + beta[t][s] - lp[t][ext[s]]) equals the
// log-likelihood at every frame. An infeasible (T, z) pair comes out as
// log_likelihood == -inf; it is the caller's job to decide whether that
// is an error.
inline CtcTables ctc_forward_backward(const Matrix& log_posteriors,
                                      const LabelSeq& z) {
  detail::validate_log_posteriors(log_posteriors);
  detail::validate_labels(z, log_posteriors.cols());

  const std::size_t T = log_posteriors.rows();
  const std::vector<int> ext = extend_labels(z);
  const std::size_t S = ext.size();
  const Matrix& lp = log_posteriors;

  CtcTables tables;
  tables.alpha = Matrix(T, S, kLogZero);
  tables.beta = Matrix(T, S, kLogZero);
  Matrix& alpha = tables.alpha;
  Matrix& beta = tables.beta;

  alpha(0, 0) = lp(0, ext[0]);
  if (S > 1) alpha(0, 1) = lp(0, ext[1]);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = log_add(acc, alpha(t - 1, s - 1));
      if (detail::skip_allowed(ext, s))
        acc = log_add(acc, alpha(t - 1, s - 2));
      alpha(t, s) = acc == kLogZero ? kLogZero : acc + lp(t, ext[s]);
    }
  }

  beta(T - 1, S - 1) = lp(T - 1, ext[S - 1]);
  if (S > 1) beta(T - 1, S - 2) = lp(T - 1, ext[S - 2]);
  for (std::size_t ti = T - 1; ti-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = beta(ti + 1, s);
      if (s + 1 < S) acc = log_add(acc, beta(ti + 1, s + 1));
      if (s + 2 < S && detail::skip_allowed(ext, s + 2))
        acc = log_add(acc, beta(ti + 1, s + 2));
      beta(ti, s) = acc == kLogZero ? kLogZero : acc + lp(ti, ext[s]);
    }
  }

  double ll = alpha(T - 1, S - 1);
  if (S > 1) ll = log_add(ll, alpha(T - 1, S - 2));
  tables.log_likelihood = ll;
  return tables;
}

// CTC loss and its gradient with respect to pre-softmax logits. The softmax
// is folded into the loss, giving grad = softmax(logits) - occupancy, where
// occupancy[t][k] is the posterior probability that symbol k is emitted at
// frame t. Each gradient row sums to zero.
inline std::pair<double, Matrix> ctc_loss_and_grad(const Matrix& logits,
                                                   const LabelSeq& z) {
  const Matrix lp = log_softmax_rows(logits);
  const CtcTables tables = ctc_forward_backward(lp, z);
  if (tables.log_likelihood == kLogZero)
    throw InfeasibleError(
        "infeasible alignment: T=" + std::to_string(logits.rows()) +
        " frames, need at least " + std::to_string(min_feasible_frames(z)));

  const std::size_t T = logits.rows();
  const std::size_t K = logits.cols();
  const std::vector<int> ext = extend_labels(z);
  const double ll = tables.log_likelihood;

  Matrix grad(T, K);
  for (std::size_t t = 0; t < T; ++t) {
    // Occupancy in log domain first, accumulated per symbol.
    std::vector<double> log_occ(K, kLogZero);
    for (std::size_t s = 0; s < ext.size(); ++s) {
      double a = tables.alpha(t, s);
      double b = tables.beta(t, s);
      if (a == kLogZero || b == kLogZero) continue;
      double mass = a + b - lp(t, ext[s]) - ll;
      log_occ[ext[s]] = log_add(log_occ[ext[s]], mass);
    }
    for (std::size_t k = 0; k < K; ++k)
      grad(t, k) = std::exp(lp(t, k)) - std::exp(log_occ[k]);
  }
  return {-ll, grad};
}

// Direct evaluation of the path sum: enumerates every K^T frame-level path,
// keeps those whose reduction equals z, and sums their probabilities. This
// is the independent oracle the forward-backward implementation is checked
// against; it deliberately shares no lattice code with it.
inline double ctc_brute_force(const Matrix& log_posteriors,
                              const LabelSeq& z) {
  detail::validate_log_posteriors(log_posteriors);
  detail::validate_labels(z, log_posteriors.cols());
  const std::size_t T = log_posteriors.rows();
  const std::size_t K = log_posteriors.cols();

  double total_paths = std::pow(static_cast<double>(K),
                                static_cast<double>(T));
  if (total_paths > 1e7)
    throw ConfigError("ctc_brute_force: oracle bound exceeded, K^T = " +
                      std::to_string(total_paths));

  std::vector<int> path(T, 0);
  double result = kLogZero;
  for (;;) {
    if (ctc_reduce(path) == z) {
      double logp = 0.0;
      for (std::size_t t = 0; t < T; ++t) logp += log_posteriors(t, path[t]);
      result = log_add(result, logp);
    }
    // Odometer increment, last frame fastest.
    std::size_t pos = T;
    while (pos-- > 0) {
      if (++path[pos] < static_cast<int>(K)) break;
      path[pos] = 0;
      if (pos == 0) return result;
    }
  }
}

}  // namespace pctc

#endif  // PCTC_CTC_HPP_
