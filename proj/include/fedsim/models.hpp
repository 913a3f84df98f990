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

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "fedsim/core.hpp"
#include "fedsim/data.hpp"

namespace fedsim {

enum class ModelKind { logreg, mlp };

std::string_view to_string(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view name);

/// Fully-connected softmax classifier. `layer_sizes` runs from the input
/// width to the class count: {F, C} for logistic regression, {F, h1, h2, C}
/// for the three-layer ReLU MLP.
///
/// Parameters are packed layer by layer as [W_l (out x in, column-major),
/// b_l (out)].
struct ModelSpec {
  ModelKind kind = ModelKind::logreg;
  std::vector<std::size_t> layer_sizes;
  double l2_reg = 0.0;

  static ModelSpec logreg(std::size_t n_features, std::size_t n_classes,
                          double l2_reg = 0.0);
  static ModelSpec mlp(std::size_t n_features,
                       const std::vector<std::size_t>& hidden,
                       std::size_t n_classes, double l2_reg = 0.0);

  std::size_t n_inputs() const { return layer_sizes.front(); }
  std::size_t n_outputs() const { return layer_sizes.back(); }
  std::size_t n_layers() const { return layer_sizes.size() - 1; }
  std::size_t param_count() const;

  /// Throws ParameterError if the spec is malformed or does not fit the data
  /// dimensions.
  void validate(std::size_t n_features, std::size_t n_classes) const;
};

/// Row indices into a Dataset; unique within one batch.
struct Batch {
  std::vector<std::size_t> rows;
  std::size_t size() const noexcept { return rows.size(); }
};

/// Zeros for logistic regression; He-uniform weights (bound sqrt(6/fan_in))
/// and zero biases for the MLP.
ParamVector init_params(const ModelSpec& spec, RngStream& rng);

/// Mean softmax cross-entropy over the batch plus (l2_reg/2)||params||^2.
double loss(const ModelSpec& spec, const ParamVector& params,
            const Dataset& data, const Batch& batch);

/// Exact gradient of `loss`.
ParamVector gradient(const ModelSpec& spec, const ParamVector& params,
                     const Dataset& data, const Batch& batch);

struct LossGradient {
  double loss = 0.0;
  ParamVector grad;
};

LossGradient loss_and_gradient(const ModelSpec& spec,
                               const ParamVector& params, const Dataset& data,
                               const Batch& batch);

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Full-split mean loss (including the L2 term) and top-1 accuracy.
EvalResult evaluate(const ModelSpec& spec, const ParamVector& params,
                    const Dataset& split);

/// min(b, shard_size) distinct positions in [0, shard_size), uniformly without
/// replacement, in draw order.
std::vector<std::size_t> sample_batch(std::size_t shard_size, std::size_t b,
                                      RngStream& rng);

/// Maps shard positions onto dataset rows.
Batch gather_batch(const std::vector<std::size_t>& shard,
                   const std::vector<std::size_t>& positions);

/// Every row of the shard, in shard order.
Batch full_batch(const std::vector<std::size_t>& shard);

}  // namespace fedsim
