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

#ifndef PCTC_DECODE_HPP_
#define PCTC_DECODE_HPP_

#include <algorithm>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "pctc/ctc.hpp"
#include "pctc/error.hpp"
#include "pctc/matrix.hpp"

namespace pctc {

// Best-path decoding: per-frame argmax followed by the CTC reduction.
// Argmax ties break toward the lowest index, so the blank wins ties.
inline LabelSeq greedy_decode(const Matrix& logits) {
  std::vector<int> path(logits.rows());
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    auto row = logits.row(t);
    std::size_t best = 0;
    for (std::size_t k = 1; k < row.size(); ++k)
      if (row[k] > row[best]) best = k;
    path[t] = static_cast<int>(best);
  }
  return ctc_reduce(path);
}

namespace detail {

struct PrefixScore {
  double blank = kLogZero;      // mass of paths ending in blank
  double non_blank = kLogZero;  // mass of paths ending in the last symbol
  double total() const { return log_add(blank, non_blank); }
};

// Deterministic order: higher score first, then shorter, then
// lexicographically smaller prefix.
inline bool beam_before(const std::pair<LabelSeq, PrefixScore>& a,
                        const std::pair<LabelSeq, PrefixScore>& b) {
  double sa = a.second.total(), sb = b.second.total();
  if (sa != sb) return sa > sb;
  if (a.first.size() != b.first.size())
    return a.first.size() < b.first.size();
  return a.first < b.first;
}

}  // namespace detail

// Lexicon-free prefix beam search over normalized log-posteriors, merging
// the blank/non-blank probability mass per prefix. With beam_width at
// least the number of reachable prefixes this is exact maximization of
// P(z|X) over label sequences. Returns the best prefix and its
// accumulated search score.
inline std::pair<LabelSeq, double> prefix_beam_decode_scored(
    const Matrix& log_posteriors, std::size_t beam_width) {
  if (beam_width == 0)
    throw ConfigError("prefix_beam_decode: beam width must be >= 1");
  detail::validate_log_posteriors(log_posteriors);
  const std::size_t T = log_posteriors.rows();
  const std::size_t K = log_posteriors.cols();

  std::map<LabelSeq, detail::PrefixScore> beams;
  beams[{}].blank = 0.0;  // log 1: the empty path

  for (std::size_t t = 0; t < T; ++t) {
    std::map<LabelSeq, detail::PrefixScore> next;
    for (const auto& [prefix, score] : beams) {
      const double total = score.total();
      detail::PrefixScore& same = next[prefix];
      same.blank = log_add(same.blank, total + log_posteriors(t, kBlank));
      for (std::size_t k = 1; k < K; ++k) {
        const double p = log_posteriors(t, k);
        if (!prefix.empty() && prefix.back() == static_cast<int>(k)) {
          // Repeating the last symbol keeps the same prefix; only a path
          // that went through a blank starts a new occurrence.
          same.non_blank = log_add(same.non_blank, score.non_blank + p);
          LabelSeq extended = prefix;
          extended.push_back(static_cast<int>(k));
          detail::PrefixScore& ext = next[extended];
          ext.non_blank = log_add(ext.non_blank, score.blank + p);
        } else {
          LabelSeq extended = prefix;
          extended.push_back(static_cast<int>(k));
          detail::PrefixScore& ext = next[extended];
          ext.non_blank = log_add(ext.non_blank, total + p);
        }
      }
    }
    if (next.size() > beam_width) {
      std::vector<std::pair<LabelSeq, detail::PrefixScore>> ranked(
          next.begin(), next.end());
      std::sort(ranked.begin(), ranked.end(), detail::beam_before);
      ranked.resize(beam_width);
      next = std::map<LabelSeq, detail::PrefixScore>(ranked.begin(),
                                                     ranked.end());
    }
    beams = std::move(next);
  }

  std::vector<std::pair<LabelSeq, detail::PrefixScore>> ranked(beams.begin(),
                                                               beams.end());
  std::sort(ranked.begin(), ranked.end(), detail::beam_before);
  return {ranked.front().first, ranked.front().second.total()};
}

inline LabelSeq prefix_beam_decode(const Matrix& log_posteriors,
                                   std::size_t beam_width) {
  return prefix_beam_decode_scored(log_posteriors, beam_width).first;
}

// Substitution / insertion / deletion counts of a minimal-cost alignment.
// Insertions are hypothesis symbols with no reference counterpart;
// deletions are reference symbols the hypothesis missed.
struct ErrorCounts {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t ref_length = 0;

  std::size_t total() const {
    return substitutions + insertions + deletions;
  }
  double per() const {
    if (ref_length == 0)
      throw ConfigError("PER undefined for empty reference");
    return static_cast<double>(total()) / static_cast<double>(ref_length);
  }
  void accumulate(const ErrorCounts& o) {
    substitutions += o.substitutions;
    insertions += o.insertions;
    deletions += o.deletions;
    ref_length += o.ref_length;
  }
};

// Levenshtein alignment with unit costs. Among minimal-cost alignments the
// one with the most diagonal steps is chosen, which makes the S/I/D split
// unique and symmetric under swapping hyp and ref.
inline ErrorCounts edit_distance(const LabelSeq& hyp, const LabelSeq& ref) {
  const std::size_t H = hyp.size(), R = ref.size();
  struct Cell {
    int cost;
    int diag;  // diagonal steps on the best path, maximized secondarily
  };
  auto better = [](Cell a, Cell b) {
    return a.cost != b.cost ? a.cost < b.cost : a.diag > b.diag;
  };
  std::vector<std::vector<Cell>> d(H + 1, std::vector<Cell>(R + 1));
  d[0][0] = {0, 0};
  for (std::size_t i = 1; i <= H; ++i) d[i][0] = {static_cast<int>(i), 0};
  for (std::size_t j = 1; j <= R; ++j) d[0][j] = {static_cast<int>(j), 0};
  for (std::size_t i = 1; i <= H; ++i)
    for (std::size_t j = 1; j <= R; ++j) {
      Cell best = {d[i - 1][j - 1].cost + (hyp[i - 1] != ref[j - 1] ? 1 : 0),
                   d[i - 1][j - 1].diag + 1};
      Cell up = {d[i - 1][j].cost + 1, d[i - 1][j].diag};
      Cell left = {d[i][j - 1].cost + 1, d[i][j - 1].diag};
      if (better(up, best)) best = up;
      if (better(left, best)) best = left;
      d[i][j] = best;
    }

  ErrorCounts counts;
  counts.ref_length = R;
  std::size_t i = H, j = R;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      Cell via_diag = {
          d[i - 1][j - 1].cost + (hyp[i - 1] != ref[j - 1] ? 1 : 0),
          d[i - 1][j - 1].diag + 1};
      if (via_diag.cost == d[i][j].cost && via_diag.diag == d[i][j].diag) {
        if (hyp[i - 1] != ref[j - 1]) ++counts.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d[i - 1][j].cost + 1 == d[i][j].cost &&
        d[i - 1][j].diag == d[i][j].diag) {
      ++counts.insertions;
      --i;
      continue;
    }
    ++counts.deletions;
    --j;
  }
  return counts;
}

}  // namespace pctc

#endif  // PCTC_DECODE_HPP_
