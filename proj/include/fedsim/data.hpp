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
#include <filesystem>
#include <span>
#include <vector>

#include "fedsim/core.hpp"

namespace fedsim {

/// Row-major feature matrix with integer class labels.
struct Dataset {
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::vector<double> features;  // size() * n_features, values in [0,1]
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * n_features, n_features};
  }
};

/// Client id -> sample indices into the training split.
using Partition = std::vector<std::vector<std::size_t>>;

/// Train/test pair. Evaluation always happens on the global test split; only
/// the training split is partitioned across clients.
struct FederatedDataset {
  Dataset train;
  Dataset test;
  Partition partition;
};

struct PartitionSpec {
  std::size_t n_clients = 1;
  double alpha = 0.7;
};

/// Per-class Dirichlet split: for every class, client proportions are drawn
/// from Dirichlet(alpha * 1) and the (shuffled) class indices are divided by
/// largest-remainder rounding. Clients still empty afterwards take one sample
/// from the currently largest client.
Partition dirichlet_partition(std::span<const int> labels,
                              const PartitionSpec& spec, RngStream& rng);

/// Throws DataError unless the cells are disjoint, cover [0, n) exactly and
/// are all nonempty.
void check_partition(const Partition& partition, std::size_t n);

/// counts[client][class]
std::vector<std::vector<std::size_t>> class_histograms(
    const Partition& partition, std::span<const int> labels,
    std::size_t n_classes);

/// Total-variation distance between each client's class distribution and the
/// global class distribution.
std::vector<double> histogram_tv_distances(const Partition& partition,
                                           std::span<const int> labels,
                                           std::size_t n_classes);

/// CSV with header `client_id,class_id,count`, one line per (client, class).
void write_partition_stats(const std::filesystem::path& path,
                           const Partition& partition,
                           std::span<const int> labels, std::size_t n_classes);

/// Reads an IDX image file (magic 0x00000803) and label file (0x00000801).
/// Pixels are scaled to [0,1] by dividing by 255.
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

struct SynthSpec {
  std::size_t n = 1000;
  std::size_t n_features = 20;
  std::size_t n_classes = 10;
  double margin = 4.0;
  double test_fraction = 0.2;
};

/// Gaussian class clusters (unit noise) whose centers are at least `margin`
/// apart, min-max scaled into [0,1]. Labels are balanced to within one
/// sample; the last floor(test_fraction * n) shuffled samples form the test
/// split.
FederatedDataset synth_classification(const SynthSpec& spec, RngStream& rng);

}  // namespace fedsim
