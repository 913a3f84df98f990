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

#pragma once

// Shared fixtures and independent oracles for the unit tests.

#include <cmath>
#include <filesystem>
#include <string>

#include "fedsim/data.hpp"
#include "fedsim/fed.hpp"
#include "fedsim/models.hpp"

namespace fedsim::testing {

inline FederatedDataset federation(std::size_t n_clients, double alpha,
                                   std::uint64_t seed, std::size_t n = 600,
                                   std::size_t features = 6,
                                   std::size_t classes = 3,
                                   double margin = 3.0) {
  SynthSpec s;
  s.n = n;
  s.n_features = features;
  s.n_classes = classes;
  s.margin = margin;
  RngStream rng = derive_stream(seed, "data/server");
  FederatedDataset data = synth_classification(s, rng);
  RngStream prng = derive_stream(seed, "partition/server");
  data.partition = dirichlet_partition(data.train.labels,
                                       {n_clients, alpha}, prng);
  return data;
}

/// grad of (1/n) sum_i f_i, assembled client by client.
inline ParamVector objective_gradient(const ModelSpec& spec,
                                      const ParamVector& x,
                                      const FederatedDataset& data) {
  ParamVector g(x.size(), 0.0);
  for (const auto& shard : data.partition) {
    const ParamVector gi = gradient(spec, x, data.train, full_batch(shard));
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += gi[k];
  }
  for (double& v : g) v /= double(data.partition.size());
  return g;
}

/// Plain gradient descent on the federated objective.
inline ParamVector gd_step(const ModelSpec& spec, const ParamVector& x,
                           const FederatedDataset& data, double gamma) {
  const ParamVector g = objective_gradient(spec, x, data);
  ParamVector out = x;
  for (std::size_t k = 0; k < x.size(); ++k) out[k] -= gamma * g[k];
  return out;
}

/// Minimizer of the (strongly convex) federated objective by gradient
/// descent, stopped once ||grad|| <= grad_tol.
inline ParamVector solve_optimum(const ModelSpec& spec,
                                 const FederatedDataset& data, double gamma,
                                 double grad_tol = 1e-12,
                                 std::size_t max_iter = 2'000'000) {
  ParamVector x(spec.param_count(), 0.0);
  for (std::size_t it = 0; it < max_iter; ++it) {
    const ParamVector g = objective_gradient(spec, x, data);
    if (l2_norm(g) <= grad_tol) break;
    for (std::size_t k = 0; k < x.size(); ++k) x[k] -= gamma * g[k];
  }
  return x;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fedsim_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fedsim::testing
