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

#ifndef PCTC_MATRIX_HPP_
#define PCTC_MATRIX_HPP_

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pctc/error.hpp"

namespace pctc {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// Dense row-major matrix of doubles. Everything in this library is small
// enough that a flat std::vector is the right storage; there are no sparse
// or blocked paths.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return std::span<double>(data_.data() + r * cols_, cols_);
  }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_.data() + r * cols_, cols_);
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  void fill(double v) { data_.assign(data_.size(), v); }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

inline std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// log(sum(exp(v))) with the usual max-shift. Returns -inf iff every input
// is -inf; -inf entries carry zero probability mass and are absorbed.
inline double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw ConfigError("log_sum_exp: empty reduction");
  double vmax = kLogZero;
  for (double v : values)
    if (v > vmax) vmax = v;
  if (vmax == kLogZero) return kLogZero;
  double sum = 0.0;
  for (double v : values)
    if (v != kLogZero) sum += std::exp(v - vmax);
  return vmax + std::log(sum);
}

inline double log_sum_exp(std::initializer_list<double> values) {
  return log_sum_exp(std::span<const double>(values.begin(), values.size()));
}

inline double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// Softmax of one row of logits, shift-invariant and overflow-safe.
inline std::vector<double> softmax_row(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  double vmax = -std::numeric_limits<double>::infinity();
  for (double v : logits) {
    if (std::isnan(v)) throw ConfigError("softmax_row: non-finite logits");
    if (v > vmax) vmax = v;
  }
  if (!std::isfinite(vmax))
    throw ConfigError("softmax_row: non-finite logits");
  double sum = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(logits[i] - vmax);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

// Row-wise log-softmax; the numerically stable form used by the CTC loss.
inline Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    auto in = logits.row(t);
    double vmax = -std::numeric_limits<double>::infinity();
    for (double v : in) {
      if (std::isnan(v))
        throw ConfigError("log_softmax_rows: non-finite logits");
      if (v > vmax) vmax = v;
    }
    if (!std::isfinite(vmax))
      throw ConfigError("log_softmax_rows: non-finite logits");
    double sum = 0.0;
    for (double v : in) sum += std::exp(v - vmax);
    double lse = vmax + std::log(sum);
    for (std::size_t k = 0; k < logits.cols(); ++k) out(t, k) = in[k] - lse;
  }
  return out;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw ConfigError("matmul: shape mismatch " + shape_string(a) + " * " +
                      shape_string(b));
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* crow = c.data() + i * c.cols();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.data() + k * b.cols();
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

// y += A * x for flat vectors, the hot loop of the LSTM cell.
inline void gemv_acc(const Matrix& a, std::span<const double> x,
                     std::span<double> y) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.data() + i * a.cols();
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += arow[j] * x[j];
    y[i] += acc;
  }
}

// y += A^T * x.
inline void gemv_transpose_acc(const Matrix& a, std::span<const double> x,
                               std::span<double> y) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* arow = a.data() + i * a.cols();
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += xi * arow[j];
  }
}

// A += x * y^T (outer product accumulation).
inline void outer_acc(std::span<const double> x, std::span<const double> y,
                      Matrix& a) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    double* arow = a.data() + i * a.cols();
    for (std::size_t j = 0; j < y.size(); ++j) arow[j] += xi * y[j];
  }
}

}  // namespace pctc

#endif  // PCTC_MATRIX_HPP_
