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
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fedsim/compressors.hpp"
#include "fedsim/core.hpp"
#include "fedsim/data.hpp"
#include "fedsim/metrics.hpp"
#include "fedsim/models.hpp"

namespace fedsim {

enum class Algorithm { fedcomloc, fedavg, sparse_fedavg, scaffold };

/// Where FedComLoc applies its compressor: on the uplink (com), on the model
/// the local gradient is evaluated at (local), on the downlink (global), or
/// nowhere (none, i.e. plain Scaffnew).
enum class Variant { none, com, local, global };

std::string_view to_string(Algorithm a) noexcept;
std::string_view to_string(Variant v) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name);
std::optional<Variant> parse_variant(std::string_view name);

struct FedConfig {
  Algorithm algorithm = Algorithm::fedcomloc;
  Variant variant = Variant::com;
  std::size_t n_clients = 10;
  std::size_t sample_size = 10;
  double p = 0.1;
  double gamma = 0.05;
  /// Total local iterations. FedAvg/Scaffold run T / local_steps_baseline
  /// rounds so every algorithm does the same local work.
  std::uint64_t T = 1000;
  CompressorSpec compressor;
  double tau = 0.01;
  std::uint64_t seed = 0;
  /// 0 means full-shard gradients.
  std::size_t batch_size = 64;
  std::size_t local_steps_baseline = 10;
  /// Evaluate every this many communication rounds (plus round 0).
  std::size_t eval_every = 1;
  /// Threads for per-client work. Results do not depend on this.
  std::size_t workers = 1;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// State owned by one simulated client.
struct ClientState {
  ParamVector x;
  ParamVector h;
  RngStream batch_rng;
  RngStream quant_rng;
};

ClientState make_client(std::size_t id, const ParamVector& x0,
                        std::uint64_t seed);

/// theta_0..theta_{T-1}, each 1 with probability p.
std::vector<std::uint8_t> generate_coins(double p, std::uint64_t T,
                                         RngStream& rng);

/// One local step: x_hat = x - gamma (g - h), where g is the stochastic
/// gradient at x, or at C(x) for the local variant. x itself is never
/// replaced by C(x).
ParamVector local_step(ClientState& client, double gamma,
                       const ModelSpec& spec, const Dataset& train,
                       const Batch& batch, const CompressorSpec& compressor,
                       Variant variant);

/// Server averaging on a communication round.
///
/// `x_hats` are the sampled clients' local iterates in ascending client id
/// order, `client_rngs` their quantization streams. Under the com variant each
/// entry is replaced in place by its compressed upload. Returns the mean,
/// compressed by the downlink compressor under the global variant.
ParamVector aggregate(std::span<ParamVector> x_hats,
                      std::span<RngStream* const> client_rngs, Variant variant,
                      const CompressorSpec& compressor, RngStream& server_rng);

/// h + (p / gamma) (x_new - x_hat).
ParamVector update_control(const ParamVector& h, const ParamVector& x_new,
                           const ParamVector& x_hat, double p, double gamma);

/// Compressor actually applied to uplink / downlink traffic, for the ledger.
CompressorSpec uplink_compressor(const FedConfig& config);
CompressorSpec downlink_compressor(const FedConfig& config);

struct IterationView {
  std::uint64_t t = 0;
  bool communicated = false;
  std::span<const ClientState> clients;
  const ParamVector& server;
};

/// Called after every iteration (FedComLoc) or round (baselines). Tests use
/// it to check invariants along the trajectory.
using IterationObserver = std::function<void(const IterationView&)>;

struct RunResult {
  RunRecord record;
  ParamVector model;  // last server model
};

RunResult run_fedcomloc(const FedConfig& config, const FederatedDataset& data,
                        const ModelSpec& spec,
                        const IterationObserver& observer = {});

/// FedAvg, and sparseFedAvg when config.algorithm == sparse_fedavg (client
/// updates are compressed before the server mean).
RunResult run_fedavg(const FedConfig& config, const FederatedDataset& data,
                     const ModelSpec& spec,
                     const IterationObserver& observer = {});

RunResult run_scaffold(const FedConfig& config, const FederatedDataset& data,
                       const ModelSpec& spec,
                       const IterationObserver& observer = {});

/// Dispatches on config.algorithm.
RunResult run(const FedConfig& config, const FederatedDataset& data,
              const ModelSpec& spec, const IterationObserver& observer = {});

/// (1/n) sum_i f_i(x) over the client shards.
double federated_objective(const ModelSpec& spec, const ParamVector& x,
                           const FederatedDataset& data);

}  // namespace fedsim
