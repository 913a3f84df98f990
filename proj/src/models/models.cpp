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

#include "fedsim/models.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace fedsim {

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1>;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstVectorMap = Eigen::Map<const Vector>;
using VectorMap = Eigen::Map<Vector>;

// Evaluation is chunked so activations for a large split stay small.
constexpr std::size_t kEvalChunk = 1024;

struct LayerView {
  std::size_t in, out, w_offset, b_offset;
};

std::vector<LayerView> layer_views(const ModelSpec& spec) {
  std::vector<LayerView> views;
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
    const std::size_t in = spec.layer_sizes[l];
    const std::size_t out = spec.layer_sizes[l + 1];
    views.push_back({in, out, offset, offset + in * out});
    offset += in * out + out;
  }
  return views;
}

void check_params(const ModelSpec& spec, const ParamVector& params) {
  if (params.size() != spec.param_count()) {
    throw DimensionError("model expects " + std::to_string(spec.param_count()) +
                         " parameters, got " + std::to_string(params.size()));
  }
}

void check_batch(const Dataset& data, const Batch& batch) {
  if (batch.rows.empty()) throw ParameterError("empty batch");
  for (std::size_t r : batch.rows) {
    if (r >= data.size()) throw ParameterError("batch row out of range");
  }
}

// Inputs as columns: F x B.
Matrix gather_inputs(const Dataset& data, const std::size_t* rows,
                     std::size_t count) {
  Matrix x(Eigen::Index(data.n_features), Eigen::Index(count));
  for (std::size_t j = 0; j < count; ++j) {
    const auto row = data.row(rows[j]);
    std::copy(row.begin(), row.end(), x.col(Eigen::Index(j)).data());
  }
  return x;
}

struct Forward {
  std::vector<Matrix> pre;   // pre-activations per layer
  std::vector<Matrix> post;  // post[0] = inputs, post[l+1] = relu(pre[l])
  Matrix probs;              // softmax of the last layer
  Vector sample_loss;
};

Forward forward(const ModelSpec& spec, const std::vector<LayerView>& views,
                const ParamVector& params, Matrix inputs,
                const int* labels) {
  Forward fw;
  fw.post.push_back(std::move(inputs));
  for (std::size_t l = 0; l < views.size(); ++l) {
    const auto& v = views[l];
    ConstMatrixMap w(params.data() + v.w_offset, Eigen::Index(v.out),
                     Eigen::Index(v.in));
    ConstVectorMap b(params.data() + v.b_offset, Eigen::Index(v.out));
    Matrix z = w * fw.post.back();
    z.colwise() += b;
    if (l + 1 < views.size()) {
      fw.post.push_back(z.cwiseMax(0.0));
    }
    fw.pre.push_back(std::move(z));
  }
  (void)spec;

  const Matrix& logits = fw.pre.back();
  const Eigen::Index n = logits.cols();
  fw.probs.resize(logits.rows(), n);
  fw.sample_loss.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double m = logits.col(j).maxCoeff();
    const auto shifted = (logits.col(j).array() - m).eval();
    const double z = shifted.exp().sum();
    fw.probs.col(j) = shifted.exp() / z;
    fw.sample_loss(j) = std::log(z) - shifted(labels[j]);
  }
  return fw;
}

double reg_term(const ModelSpec& spec, const ParamVector& params) {
  if (spec.l2_reg == 0.0) return 0.0;
  return 0.5 * spec.l2_reg * dot(params, params);
}

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
  return kind == ModelKind::mlp ? "mlp" : "logreg";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  if (name == "logreg") return ModelKind::logreg;
  if (name == "mlp") return ModelKind::mlp;
  return std::nullopt;
}

ModelSpec ModelSpec::logreg(std::size_t n_features, std::size_t n_classes,
                            double l2_reg) {
  return {ModelKind::logreg, {n_features, n_classes}, l2_reg};
}

ModelSpec ModelSpec::mlp(std::size_t n_features,
                         const std::vector<std::size_t>& hidden,
                         std::size_t n_classes, double l2_reg) {
  ModelSpec spec{ModelKind::mlp, {n_features}, l2_reg};
  spec.layer_sizes.insert(spec.layer_sizes.end(), hidden.begin(), hidden.end());
  spec.layer_sizes.push_back(n_classes);
  return spec;
}

std::size_t ModelSpec::param_count() const {
  std::size_t d = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    d += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
  }
  return d;
}

void ModelSpec::validate(std::size_t n_features, std::size_t n_classes) const {
  if (layer_sizes.size() < 2) {
    throw ParameterError("model: need at least input and output sizes");
  }
  if (kind == ModelKind::logreg && layer_sizes.size() != 2) {
    throw ParameterError("model: logreg takes no hidden layers");
  }
  for (std::size_t s : layer_sizes) {
    if (s == 0) throw ParameterError("model: layer sizes must be positive");
  }
  if (layer_sizes.front() != n_features) {
    throw ParameterError("model: input width " +
                         std::to_string(layer_sizes.front()) +
                         " does not match " + std::to_string(n_features) +
                         " features");
  }
  if (layer_sizes.back() != n_classes) {
    throw ParameterError("model: output width " +
                         std::to_string(layer_sizes.back()) +
                         " does not match " + std::to_string(n_classes) +
                         " classes");
  }
  if (!(l2_reg >= 0.0)) throw ParameterError("model: l2_reg must be >= 0");
}

ParamVector init_params(const ModelSpec& spec, RngStream& rng) {
  ParamVector params(spec.param_count(), 0.0);
  if (spec.kind == ModelKind::logreg) return params;
  for (const auto& v : layer_views(spec)) {
    const double bound = std::sqrt(6.0 / double(v.in));
    for (std::size_t i = 0; i < v.in * v.out; ++i) {
      params[v.w_offset + i] = bound * (2.0 * rng.uniform() - 1.0);
    }
  }
  return params;
}

LossGradient loss_and_gradient(const ModelSpec& spec,
                               const ParamVector& params, const Dataset& data,
                               const Batch& batch) {
  check_params(spec, params);
  check_batch(data, batch);
  const auto views = layer_views(spec);
  const std::size_t B = batch.size();

  std::vector<int> labels(B);
  for (std::size_t j = 0; j < B; ++j) labels[j] = data.labels[batch.rows[j]];
  Forward fw = forward(spec, views, params,
                       gather_inputs(data, batch.rows.data(), B),
                       labels.data());

  LossGradient out;
  out.loss = fw.sample_loss.mean() + reg_term(spec, params);
  out.grad = ParamVector(params.size(), 0.0);

  Matrix delta = fw.probs;
  for (std::size_t j = 0; j < B; ++j) delta(labels[j], Eigen::Index(j)) -= 1.0;
  delta /= double(B);

  for (std::size_t l = views.size(); l-- > 0;) {
    const auto& v = views[l];
    MatrixMap gw(out.grad.data() + v.w_offset, Eigen::Index(v.out),
                 Eigen::Index(v.in));
    VectorMap gb(out.grad.data() + v.b_offset, Eigen::Index(v.out));
    gw.noalias() = delta * fw.post[l].transpose();
    gb = delta.rowwise().sum();
    if (l > 0) {
      ConstMatrixMap w(params.data() + v.w_offset, Eigen::Index(v.out),
                       Eigen::Index(v.in));
      Matrix back = w.transpose() * delta;
      delta = back.cwiseProduct(
          (fw.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  if (spec.l2_reg != 0.0) axpy_inplace(spec.l2_reg, params, out.grad);
  return out;
}

double loss(const ModelSpec& spec, const ParamVector& params,
            const Dataset& data, const Batch& batch) {
  check_params(spec, params);
  check_batch(data, batch);
  const auto views = layer_views(spec);
  std::vector<int> labels(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    labels[j] = data.labels[batch.rows[j]];
  }
  const Forward fw =
      forward(spec, views, params,
              gather_inputs(data, batch.rows.data(), batch.size()),
              labels.data());
  return fw.sample_loss.mean() + reg_term(spec, params);
}

ParamVector gradient(const ModelSpec& spec, const ParamVector& params,
                     const Dataset& data, const Batch& batch) {
  return loss_and_gradient(spec, params, data, batch).grad;
}

EvalResult evaluate(const ModelSpec& spec, const ParamVector& params,
                    const Dataset& split) {
  check_params(spec, params);
  if (split.size() == 0) throw ParameterError("evaluate: empty split");
  const auto views = layer_views(spec);
  const std::size_t n = split.size();

  std::vector<std::size_t> rows(std::min(n, kEvalChunk));
  double loss_sum = 0.0;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < n; start += kEvalChunk) {
    const std::size_t count = std::min(kEvalChunk, n - start);
    for (std::size_t j = 0; j < count; ++j) rows[j] = start + j;
    const Forward fw =
        forward(spec, views, params, gather_inputs(split, rows.data(), count),
                split.labels.data() + start);
    loss_sum += fw.sample_loss.sum();
    for (std::size_t j = 0; j < count; ++j) {
      Eigen::Index best = 0;
      fw.pre.back().col(Eigen::Index(j)).maxCoeff(&best);
      if (best == split.labels[start + j]) ++correct;
    }
  }
  return {loss_sum / double(n) + reg_term(spec, params),
          double(correct) / double(n)};
}

std::vector<std::size_t> sample_batch(std::size_t shard_size, std::size_t b,
                                      RngStream& rng) {
  if (shard_size == 0) throw DataError("sample_batch: empty shard");
  if (b < 1) throw ParameterError("sample_batch: batch size must be >= 1");
  const std::size_t k = std::min(b, shard_size);
  std::vector<std::size_t> pool(shard_size);
  for (std::size_t i = 0; i < shard_size; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(shard_size - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

Batch gather_batch(const std::vector<std::size_t>& shard,
                   const std::vector<std::size_t>& positions) {
  Batch batch;
  batch.rows.reserve(positions.size());
  for (std::size_t p : positions) batch.rows.push_back(shard.at(p));
  return batch;
}

Batch full_batch(const std::vector<std::size_t>& shard) {
  return Batch{shard};
}

}  // namespace fedsim
