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

// Command-line front end. Talks to the simulator only through the C API.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include "fedsim/fedsim.h"

namespace {

struct ExperimentDeleter {
  void operator()(fedsim_experiment* e) const { fedsim_experiment_free(e); }
};
using ExperimentHandle = std::unique_ptr<fedsim_experiment, ExperimentDeleter>;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fedsim: communication-efficient federated training simulator"};
  app.set_version_flag("--version", std::string(fedsim_version()));

  std::string config_path;
  std::int64_t seed = 0;
  std::string out_dir;
  std::size_t workers = 0;
  bool quiet = false;
  bool validate_only = false;

  app.add_option("--config", config_path, "Experiment config (TOML)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Override the run seed");
  app.add_option("--out", out_dir, "Override the output directory");
  app.add_option("--workers", workers, "Threads for per-client work")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "Only print the final summary");
  app.add_flag("--validate", validate_only,
               "Check the config and exit without running");
  CLI11_PARSE(app, argc, argv);

  fedsim_experiment* raw = nullptr;
  if (fedsim_experiment_load(config_path.c_str(), &raw) != FEDSIM_OK) {
    std::fprintf(stderr, "fedsim: %s\n", fedsim_last_error());
    return kExitConfig;
  }
  ExperimentHandle exp(raw);

  const std::size_t n_violations = fedsim_experiment_violation_count(exp.get());
  if (n_violations > 0) {
    std::fprintf(stderr, "fedsim: invalid configuration %s\n",
                 config_path.c_str());
    for (std::size_t i = 0; i < n_violations; ++i) {
      std::fprintf(stderr, "  %s\n", fedsim_experiment_violation(exp.get(), i));
    }
    return kExitConfig;
  }
  if (validate_only) {
    if (!quiet) std::printf("%s: ok\n", config_path.c_str());
    return kExitOk;
  }

  if (*seed_opt) {
    fedsim_experiment_set_seed(exp.get(), static_cast<std::uint64_t>(seed));
  }
  if (!out_dir.empty()) fedsim_experiment_set_output_dir(exp.get(), out_dir.c_str());
  if (workers > 0) fedsim_experiment_set_workers(exp.get(), workers);

  const fedsim_status status = fedsim_experiment_run(exp.get(), quiet ? 1 : 0);
  if (status != FEDSIM_OK && status != FEDSIM_ERR_CELL_FAILED) {
    std::fprintf(stderr, "fedsim: %s: %s\n", fedsim_status_string(status),
                 fedsim_last_error());
    return status == FEDSIM_ERR_CONFIG ? kExitConfig : kExitFailed;
  }
  std::fputs(fedsim_experiment_summary(exp.get()), stdout);
  if (status == FEDSIM_ERR_CELL_FAILED) {
    std::fprintf(stderr, "fedsim: %s\n", fedsim_last_error());
    return kExitFailed;
  }
  return kExitOk;
}
