// Copyright 2026 The fedsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <string>

#include "fedsim/core.hpp"

namespace fedsim {

bool ParamVector::all_finite() const noexcept {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_same_size(const ParamVector& x, const ParamVector& y,
                       std::string_view what) {
  if (x.size() != y.size()) {
    throw DimensionError(std::string(what) + ": length mismatch (" +
                         std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
  }
}

ParamVector axpy(double a, const ParamVector& x, const ParamVector& y) {
  ParamVector out = y;
  axpy_inplace(a, x, out);
  return out;
}

void axpy_inplace(double a, const ParamVector& x, ParamVector& y) {
  require_same_size(x, y, "axpy");
  const std::size_t d = x.size();
  for (std::size_t i = 0; i < d; ++i) y[i] += a * x[i];
}

ParamVector scale(double a, const ParamVector& x) {
  ParamVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
  return out;
}

ParamVector subtract(const ParamVector& x, const ParamVector& y) {
  require_same_size(x, y, "subtract");
  ParamVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return out;
}

double dot(const ParamVector& x, const ParamVector& y) {
  require_same_size(x, y, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double l2_norm(const ParamVector& x) {
  // Scaled accumulation keeps huge/tiny entries from overflowing.
  double scale_ = 0.0;
  for (double v : x) scale_ = std::max(scale_, std::abs(v));
  if (scale_ == 0.0) return 0.0;
  double acc = 0.0;
  for (double v : x) {
    const double s = v / scale_;
    acc += s * s;
  }
  return scale_ * std::sqrt(acc);
}

double max_abs(const ParamVector& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double distance(const ParamVector& x, const ParamVector& y) {
  return l2_norm(subtract(x, y));
}

}  // namespace fedsim
