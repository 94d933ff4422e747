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

#ifndef PCTC_GRAD_CHECK_HPP_
#define PCTC_GRAD_CHECK_HPP_

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "pctc/error.hpp"

namespace pctc {

// Compares an analytic gradient against central finite differences of a
// scalar function, coordinate by coordinate. Returns the max over
// coordinates of |analytic - numeric| / max(1, |analytic|, |numeric|).
inline double grad_check(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& point, const std::vector<double>& analytic,
    double step) {
  if (analytic.size() != point.size())
    throw ConfigError("grad_check: gradient/point size mismatch");
  std::vector<double> probe = point;
  double worst = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    probe[i] = point[i] + step;
    double up = f(probe);
    probe[i] = point[i] - step;
    double down = f(probe);
    probe[i] = point[i];
    if (!std::isfinite(up) || !std::isfinite(down))
      throw DivergenceError("grad_check: non-finite f at coordinate " +
                            std::to_string(i));
    double numeric = (up - down) / (2.0 * step);
    double denom = std::max(
        {1.0, std::abs(analytic[i]), std::abs(numeric)});
    double rel = std::abs(analytic[i] - numeric) / denom;
    if (rel > worst) worst = rel;
  }
  return worst;
}

}  // namespace pctc

#endif  // PCTC_GRAD_CHECK_HPP_
