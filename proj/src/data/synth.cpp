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

#include <algorithm>
#include <cmath>
#include <limits>

#include "fedsim/data.hpp"

namespace fedsim {

FederatedDataset synth_classification(const SynthSpec& spec, RngStream& rng) {
  if (spec.n_classes < 2 || spec.n < spec.n_classes) {
    throw ParameterError("synth_classification: need n >= n_classes >= 2");
  }
  if (spec.n_features < 1) {
    throw ParameterError("synth_classification: n_features must be >= 1");
  }
  if (!(spec.margin > 0.0)) {
    throw ParameterError("synth_classification: margin must be positive");
  }
  if (!(spec.test_fraction >= 0.0 && spec.test_fraction < 1.0)) {
    throw ParameterError("synth_classification: test_fraction in [0,1)");
  }
  const std::size_t F = spec.n_features;
  const std::size_t C = spec.n_classes;

  // Random centers rescaled so the closest pair sits exactly `margin` apart.
  std::vector<double> centers(C * F);
  for (auto& v : centers) v = rng.normal();
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < C; ++a) {
    for (std::size_t b = a + 1; b < C; ++b) {
      double acc = 0.0;
      for (std::size_t f = 0; f < F; ++f) {
        const double diff = centers[a * F + f] - centers[b * F + f];
        acc += diff * diff;
      }
      min_dist = std::min(min_dist, std::sqrt(acc));
    }
  }
  if (!(min_dist > 0.0)) {
    throw DataError("synth_classification: degenerate class centers");
  }
  for (auto& v : centers) v *= spec.margin / min_dist;

  std::vector<std::size_t> order(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) order[i] = i;
  for (std::size_t i = spec.n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  }

  std::vector<double> raw(spec.n * F);
  std::vector<int> labels(spec.n);
  for (std::size_t s = 0; s < spec.n; ++s) {
    const std::size_t cls = order[s] % C;
    labels[s] = static_cast<int>(cls);
    for (std::size_t f = 0; f < F; ++f) {
      raw[s * F + f] = centers[cls * F + f] + rng.normal();
    }
  }

  const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  for (auto& v : raw) v = span > 0.0 ? (v - lo) / span : 0.0;

  const auto n_test =
      static_cast<std::size_t>(std::floor(spec.test_fraction * double(spec.n)));
  const std::size_t n_train = spec.n - n_test;

  FederatedDataset out;
  for (Dataset* ds : {&out.train, &out.test}) {
    ds->n_features = F;
    ds->n_classes = C;
  }
  out.train.features.assign(raw.begin(), raw.begin() + std::ptrdiff_t(n_train * F));
  out.train.labels.assign(labels.begin(), labels.begin() + std::ptrdiff_t(n_train));
  out.test.features.assign(raw.begin() + std::ptrdiff_t(n_train * F), raw.end());
  out.test.labels.assign(labels.begin() + std::ptrdiff_t(n_train), labels.end());
  return out;
}

}  // namespace fedsim
