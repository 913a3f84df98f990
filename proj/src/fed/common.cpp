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

#include "fed/internal.hpp"
#include "fedsim/fed.hpp"

namespace fedsim {

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::fedcomloc: return "fedcomloc";
    case Algorithm::fedavg: return "fedavg";
    case Algorithm::sparse_fedavg: return "sparse_fedavg";
    case Algorithm::scaffold: return "scaffold";
  }
  return "fedcomloc";
}

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::none: return "none";
    case Variant::com: return "com";
    case Variant::local: return "local";
    case Variant::global: return "global";
  }
  return "none";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::fedcomloc, Algorithm::fedavg,
                 Algorithm::sparse_fedavg, Algorithm::scaffold}) {
    if (name == to_string(a)) return a;
  }
  return std::nullopt;
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (auto v : {Variant::none, Variant::com, Variant::local, Variant::global}) {
    if (name == to_string(v)) return v;
  }
  return std::nullopt;
}

void FedConfig::validate() const {
  if (n_clients < 1) throw ConfigError("fed.n_clients: must be >= 1");
  if (sample_size < 1) throw ConfigError("fed.sample_size: must be >= 1");
  if (sample_size > n_clients) {
    throw ConfigError("fed.sample_size: " + std::to_string(sample_size) +
                      " exceeds n_clients " + std::to_string(n_clients));
  }
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("fed.p: must lie in (0, 1]");
  if (!(gamma > 0.0)) throw ConfigError("fed.gamma: must be positive");
  if (T < 1) throw ConfigError("fed.T: must be >= 1");
  if (!(tau >= 0.0)) throw ConfigError("fed.tau: must be >= 0");
  if (local_steps_baseline < 1) {
    throw ConfigError("fed.local_steps_baseline: must be >= 1");
  }
  if (eval_every < 1) throw ConfigError("fed.eval_every: must be >= 1");
  if (workers < 1) throw ConfigError("fed.workers: must be >= 1");
  try {
    compressor.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("fed.compressor: ") + e.what());
  }
}

ClientState make_client(std::size_t id, const ParamVector& x0,
                        std::uint64_t seed) {
  return ClientState{x0, ParamVector(x0.size(), 0.0),
                     derive_stream(seed, client_label("batch", id)),
                     derive_stream(seed, client_label("quant", id))};
}

std::vector<std::uint8_t> generate_coins(double p, std::uint64_t T,
                                         RngStream& rng) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw ParameterError("generate_coins: p must lie in (0, 1]");
  }
  std::vector<std::uint8_t> coins(T);
  for (auto& c : coins) c = rng.bernoulli(p) ? 1 : 0;
  return coins;
}

ParamVector local_step(ClientState& client, double gamma,
                       const ModelSpec& spec, const Dataset& train,
                       const Batch& batch, const CompressorSpec& compressor,
                       Variant variant) {
  require_same_size(client.x, client.h, "local_step");
  ParamVector g =
      variant == Variant::local
          ? gradient(spec, compress(compressor, client.x, client.quant_rng),
                     train, batch)
          : gradient(spec, client.x, train, batch);
  ParamVector x_hat = client.x;
  const std::size_t d = x_hat.size();
  for (std::size_t k = 0; k < d; ++k) {
    x_hat[k] -= gamma * (g[k] - client.h[k]);
  }
  return x_hat;
}

ParamVector aggregate(std::span<ParamVector> x_hats,
                      std::span<RngStream* const> client_rngs, Variant variant,
                      const CompressorSpec& compressor, RngStream& server_rng) {
  if (x_hats.empty()) throw ProtocolError("aggregate: no sampled clients");
  if (client_rngs.size() != x_hats.size()) {
    throw ProtocolError("aggregate: one rng per client required");
  }
  if (variant == Variant::com) {
    for (std::size_t i = 0; i < x_hats.size(); ++i) {
      x_hats[i] = compress(compressor, x_hats[i], *client_rngs[i]);
    }
  }
  ParamVector mean = x_hats[0];
  for (std::size_t i = 1; i < x_hats.size(); ++i) {
    axpy_inplace(1.0, x_hats[i], mean);
  }
  if (x_hats.size() > 1) {
    const double inv = 1.0 / double(x_hats.size());
    for (double& v : mean) v *= inv;
  }
  if (variant == Variant::global) {
    mean = compress(compressor, mean, server_rng);
  }
  return mean;
}

ParamVector update_control(const ParamVector& h, const ParamVector& x_new,
                           const ParamVector& x_hat, double p, double gamma) {
  require_same_size(h, x_new, "update_control");
  require_same_size(h, x_hat, "update_control");
  const double c = p / gamma;
  ParamVector out = h;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] += c * (x_new[k] - x_hat[k]);
  }
  return out;
}

CompressorSpec uplink_compressor(const FedConfig& config) {
  switch (config.algorithm) {
    case Algorithm::fedcomloc:
      return config.variant == Variant::com ? config.compressor
                                            : CompressorSpec::identity();
    case Algorithm::sparse_fedavg:
      return config.compressor;
    case Algorithm::fedavg:
    case Algorithm::scaffold:
      return CompressorSpec::identity();
  }
  return CompressorSpec::identity();
}

CompressorSpec downlink_compressor(const FedConfig& config) {
  if (config.algorithm == Algorithm::fedcomloc &&
      config.variant == Variant::global) {
    return config.compressor;
  }
  return CompressorSpec::identity();
}

double federated_objective(const ModelSpec& spec, const ParamVector& x,
                           const FederatedDataset& data) {
  double acc = 0.0;
  for (const auto& shard : data.partition) {
    acc += loss(spec, x, data.train, full_batch(shard));
  }
  return acc / double(data.partition.size());
}

RunResult run(const FedConfig& config, const FederatedDataset& data,
              const ModelSpec& spec, const IterationObserver& observer) {
  switch (config.algorithm) {
    case Algorithm::fedcomloc:
      return run_fedcomloc(config, data, spec, observer);
    case Algorithm::fedavg:
    case Algorithm::sparse_fedavg:
      return run_fedavg(config, data, spec, observer);
    case Algorithm::scaffold:
      return run_scaffold(config, data, spec, observer);
  }
  throw ConfigError("fed.algorithm: unknown");
}

namespace detail {

void check_run_inputs(const FedConfig& config, const FederatedDataset& data,
                      const ModelSpec& spec) {
  config.validate();
  if (data.partition.size() != config.n_clients) {
    throw ConfigError("fed.n_clients: config says " +
                      std::to_string(config.n_clients) +
                      " but the partition has " +
                      std::to_string(data.partition.size()) + " clients");
  }
  check_partition(data.partition, data.train.size());
  try {
    spec.validate(data.train.n_features, data.train.n_classes);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (data.test.size() == 0) throw ConfigError("dataset: empty test split");
}

std::vector<std::size_t> sample_clients(const FedConfig& config,
                                        RngStream& rng) {
  return sample_without_replacement(config.n_clients, config.sample_size, rng);
}

Batch draw_batch(const FedConfig& config, const std::vector<std::size_t>& shard,
                 RngStream& rng) {
  if (config.batch_size == 0) return full_batch(shard);
  return gather_batch(shard, sample_batch(shard.size(), config.batch_size, rng));
}

void log_eval(RunRecord& record, const BitLedger& ledger, const FedConfig& config,
              const FederatedDataset& data, const ModelSpec& spec,
              const ParamVector& model, std::uint64_t t) {
  const double train_loss = federated_objective(spec, model, data);
  const EvalResult test = evaluate(spec, model, data.test);
  record_eval(record, ledger, config.tau, t, train_loss, test.loss,
              test.accuracy);
}

}  // namespace detail

}  // namespace fedsim
