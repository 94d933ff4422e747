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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "pctc/grad_check.hpp"
#include "pctc/matrix.hpp"

using namespace pctc;

TEST_CASE("log_sum_exp basics") {
  CHECK(log_sum_exp({0.0, 0.0}) == Catch::Approx(std::log(2.0)));
  CHECK(log_sum_exp({-3.25}) == -3.25);
  CHECK(log_sum_exp({kLogZero, -1.5}) == -1.5);
  CHECK(log_sum_exp({kLogZero, kLogZero}) == kLogZero);
  CHECK_THROWS_AS(log_sum_exp(std::span<const double>{}), ConfigError);
}

TEST_CASE("log_sum_exp stays within max and max + ln(n)") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng() % 8;
    std::vector<double> v(n);
    double vmax = -1e300;
    for (double& x : v) {
      x = dist(rng);
      vmax = std::max(vmax, x);
    }
    double lse = log_sum_exp(v);
    CHECK(lse >= vmax);
    CHECK(lse <= vmax + std::log(static_cast<double>(n)) + 1e-12);
  }
}

TEST_CASE("log_add handles probability zero exactly") {
  CHECK(log_add(kLogZero, kLogZero) == kLogZero);
  CHECK(log_add(kLogZero, -0.5) == -0.5);
  CHECK(log_add(std::log(0.25), std::log(0.5)) ==
        Catch::Approx(std::log(0.75)));
}

TEST_CASE("softmax_row examples") {
  {
    std::vector<double> logits{0.0, 0.0};
    auto out = softmax_row(logits);
    CHECK(out[0] == Catch::Approx(0.5));
    CHECK(out[1] == Catch::Approx(0.5));
  }
  {
    // Shift invariance keeps huge logits from overflowing.
    std::vector<double> logits{1000.0, 1000.0};
    auto out = softmax_row(logits);
    CHECK(out[0] == Catch::Approx(0.5));
    CHECK(out[1] == Catch::Approx(0.5));
  }
  {
    std::vector<double> logits{std::log(1.0), std::log(3.0)};
    auto out = softmax_row(logits);
    CHECK(out[0] == Catch::Approx(0.25));
    CHECK(out[1] == Catch::Approx(0.75));
  }
  std::vector<double> bad{0.0, std::nan("")};
  CHECK_THROWS_AS(softmax_row(bad), ConfigError);
}

TEST_CASE("softmax_row sums to one and preserves the argmax") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dist(-30.0, 30.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + rng() % 7;
    std::vector<double> logits(n);
    for (double& x : logits) x = dist(rng);
    auto out = softmax_row(logits);
    double sum = 0.0;
    for (double p : out) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    std::size_t argmax_in = 0, argmax_out = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (logits[i] > logits[argmax_in]) argmax_in = i;
      if (out[i] > out[argmax_out]) argmax_out = i;
    }
    CHECK(argmax_in == argmax_out);

    // Shift invariance.
    std::vector<double> shifted = logits;
    for (double& x : shifted) x += 17.25;
    auto out2 = softmax_row(shifted);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(out2[i] == Catch::Approx(out[i]).margin(1e-12));
  }
}

TEST_CASE("matmul identities") {
  Matrix a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 3;
  a(1, 1) = 4;

  CHECK(matmul(a, Matrix::identity(2)) == a);
  CHECK(matmul(Matrix::identity(2), a) == a);
  CHECK(matmul(a, Matrix(2, 3)) == Matrix(2, 3));

  Matrix b(2, 2);
  b(0, 0) = 5;
  b(0, 1) = 6;
  b(1, 0) = 7;
  b(1, 1) = 8;
  Matrix c = matmul(a, b);
  CHECK(c(0, 0) == 19);
  CHECK(c(0, 1) == 22);
  CHECK(c(1, 0) == 43);
  CHECK(c(1, 1) == 50);

  CHECK_THROWS_WITH(matmul(a, Matrix(3, 2)),
                    Catch::Matchers::ContainsSubstring("2x2") &&
                        Catch::Matchers::ContainsSubstring("3x2"));
}

TEST_CASE("matmul distributes over addition") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t m = 1 + rng() % 4, k = 1 + rng() % 4, n = 1 + rng() % 4;
    Matrix a(m, k), b(k, n), c(k, n);
    for (double& v : a.storage()) v = dist(rng);
    for (double& v : b.storage()) v = dist(rng);
    for (double& v : c.storage()) v = dist(rng);
    Matrix bc(k, n);
    for (std::size_t i = 0; i < bc.size(); ++i)
      bc.storage()[i] = b.storage()[i] + c.storage()[i];
    Matrix lhs = matmul(a, bc);
    Matrix ab = matmul(a, b), ac = matmul(a, c);
    for (std::size_t i = 0; i < lhs.size(); ++i)
      CHECK(lhs.storage()[i] ==
            Catch::Approx(ab.storage()[i] + ac.storage()[i]).margin(1e-12));
  }
}

TEST_CASE("grad_check on closed-form gradients") {
  auto square = [](const std::vector<double>& x) { return x[0] * x[0]; };
  CHECK(grad_check(square, {3.0}, {6.0}, 1e-5) <= 1e-8);

  auto constant = [](const std::vector<double>&) { return 4.2; };
  CHECK(grad_check(constant, {1.0, -2.0}, {0.0, 0.0}, 1e-5) <= 1e-10);

  // Quadratic form x^T A x with A symmetric: gradient is 2 A x.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const std::size_t n = 4;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double v = dist(rng);
      a(i, j) = v;
      a(j, i) = v;
    }
  std::vector<double> point(n);
  for (double& v : point) v = dist(rng);
  auto quad = [&](const std::vector<double>& x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) acc += x[i] * a(i, j) * x[j];
    return acc;
  };
  std::vector<double> grad(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) grad[i] += 2.0 * a(i, j) * point[j];
  CHECK(grad_check(quad, point, grad, 1e-5) <= 1e-7);
}

TEST_CASE("grad_check reports the offending coordinate") {
  auto f = [](const std::vector<double>& x) {
    return x[1] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : x[0];
  };
  CHECK_THROWS_WITH(grad_check(f, {0.0, 0.5}, {1.0, 0.0}, 1e-1),
                    Catch::Matchers::ContainsSubstring("coordinate 1"));
}
