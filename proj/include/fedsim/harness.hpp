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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedsim/data.hpp"
#include "fedsim/fed.hpp"
#include "fedsim/models.hpp"

namespace fedsim {

struct DatasetConfig {
  enum class Kind { synth, mnist_idx };
  Kind kind = Kind::synth;
  SynthSpec synth;
  std::filesystem::path train_images;
  std::filesystem::path train_labels;
  std::filesystem::path test_images;
  std::filesystem::path test_labels;
};

/// One fully resolved experiment cell. A gamma grid multiplies it into one
/// run per stepsize.
struct ExperimentConfig {
  std::string name;
  DatasetConfig dataset;
  PartitionSpec partition;
  ModelKind model_kind = ModelKind::mlp;
  std::vector<std::size_t> hidden{128, 64};
  double l2_reg = 0.0;
  FedConfig fed;
  std::vector<double> grid;
  std::filesystem::path output_dir = "out";
  bool partition_stats = true;
};

/// Parsed config file: the cells it describes plus any problems found while
/// reading it. Each problem string starts with the offending key.
struct ExperimentPlan {
  std::vector<ExperimentConfig> cells;
  std::vector<std::string> violations;
};

/// Parses TOML text. Never throws for content problems; they land in
/// `violations`.
ExperimentPlan parse_experiment(std::string_view toml_text,
                                std::string_view source_name = "<config>");

/// Reads and parses a config file. Throws IoError if it cannot be read.
ExperimentPlan load_experiment(const std::filesystem::path& path);

/// Empty iff every invariant of the cell holds. Entries look like
/// "fed.p: must lie in (0, 1]".
std::vector<std::string> validate_config(const ExperimentConfig& config);

/// Builds the dataset (synthetic or IDX) and partitions its training split.
FederatedDataset materialize_dataset(const ExperimentConfig& config);

ModelSpec model_spec(const ExperimentConfig& config, std::size_t n_features,
                     std::size_t n_classes);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::size_t> workers;
  bool quiet = false;
};

struct CellReport {
  std::string name;
  double gamma = 0.0;
  bool ok = false;
  std::string error;
  RunSummary summary;
  std::filesystem::path csv_path;
  std::filesystem::path json_path;
};

struct ExperimentReport {
  std::vector<CellReport> cells;
  bool ok() const;
};

/// Applies option overrides to every cell of the plan.
void apply_options(ExperimentPlan& plan, const RunOptions& options);

/// Runs every (cell, gamma) pair, writing `<cell>__gamma<g>.csv` and `.json`
/// atomically under each cell's output_dir. A failing cell is reported and
/// does not stop the others.
ExperimentReport run_experiment(const ExperimentPlan& plan,
                                const RunOptions& options = {});

/// JSON echo of the configuration and run summary, as written next to the CSV.
std::string run_json(const ExperimentConfig& config, const FedConfig& fed,
                     const ModelSpec& spec, const RunRecord& record);

std::string output_stem(const std::string& cell, double gamma);

/// Human-readable table of best test accuracy per cell.
std::string summary_table(const ExperimentReport& report);

}  // namespace fedsim
