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

#include "fedsim/fed.hpp"

namespace fedsim::detail {

/// Checks the config against the dataset before any compute starts.
void check_run_inputs(const FedConfig& config, const FederatedDataset& data,
                      const ModelSpec& spec);

std::vector<std::size_t> sample_clients(const FedConfig& config,
                                        RngStream& rng);

Batch draw_batch(const FedConfig& config, const std::vector<std::size_t>& shard,
                 RngStream& rng);

/// Evaluates `model` and appends a row at iteration t.
void log_eval(RunRecord& record, const BitLedger& ledger, const FedConfig& config,
              const FederatedDataset& data, const ModelSpec& spec,
              const ParamVector& model, std::uint64_t t);

}  // namespace fedsim::detail
