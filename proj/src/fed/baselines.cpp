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
#include "fed/worker_pool.hpp"
#include "fedsim/fed.hpp"

namespace fedsim {

namespace {

std::uint64_t round_count(const FedConfig& config) {
  return std::max<std::uint64_t>(1, config.T / config.local_steps_baseline);
}

// x + mean(deltas), reduced in ascending client order.
ParamVector apply_mean_delta(const ParamVector& x,
                             const std::vector<ParamVector>& deltas) {
  ParamVector sum = deltas[0];
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    axpy_inplace(1.0, deltas[i], sum);
  }
  return axpy(1.0 / double(deltas.size()), sum, x);
}

bool any_non_finite(const std::vector<ParamVector>& vs) {
  return std::any_of(vs.begin(), vs.end(),
                     [](const ParamVector& v) { return !v.all_finite(); });
}

struct BaselineSetup {
  RngStream sample_rng;
  ParamVector x;
  std::vector<ClientState> clients;
};

BaselineSetup setup(const FedConfig& config, const ModelSpec& spec) {
  RngStream init_rng = derive_stream(config.seed, server_label("init"));
  BaselineSetup s{derive_stream(config.seed, server_label("sample")),
                  init_params(spec, init_rng),
                  {}};
  s.clients.reserve(config.n_clients);
  for (std::size_t i = 0; i < config.n_clients; ++i) {
    s.clients.push_back(make_client(i, s.x, config.seed));
  }
  return s;
}

}  // namespace

RunResult run_fedavg(const FedConfig& config, const FederatedDataset& data,
                     const ModelSpec& spec, const IterationObserver& observer) {
  detail::check_run_inputs(config, data, spec);
  const bool sparse = config.algorithm == Algorithm::sparse_fedavg;
  auto [sample_rng, x, clients] = setup(config, spec);
  const std::size_t d = x.size();
  const std::size_t steps = config.local_steps_baseline;
  const std::uint64_t rounds = round_count(config);
  const std::uint64_t up_bits = bit_cost(uplink_compressor(config), d);
  const std::uint64_t down_bits = bit_cost(downlink_compressor(config), d);

  RunResult result;
  result.record.summary.seed = config.seed;
  result.record.summary.dimension = d;
  BitLedger ledger;
  detail::log_eval(result.record, ledger, config, data, spec, x, 0);

  detail::WorkerPool pool(config.workers);
  std::vector<ParamVector> deltas(config.sample_size);
  for (std::uint64_t r = 0; r < rounds; ++r) {
    const auto sampled = detail::sample_clients(config, sample_rng);
    pool.run(sampled.size(), [&](std::size_t j) {
      ClientState& client = clients[sampled[j]];
      const auto& shard = data.partition[sampled[j]];
      ParamVector y = x;
      for (std::size_t k = 0; k < steps; ++k) {
        const Batch batch = detail::draw_batch(config, shard, client.batch_rng);
        axpy_inplace(-config.gamma, gradient(spec, y, data.train, batch), y);
      }
      client.x = y;
      ParamVector delta = subtract(y, x);
      deltas[j] = sparse ? compress(config.compressor, delta, client.quant_rng)
                         : std::move(delta);
    });
    ledger.add_local_steps(steps);
    if (any_non_finite(deltas)) {
      result.record.summary.diverged = true;
      break;
    }
    x = apply_mean_delta(x, deltas);
    ledger.add_communication(up_bits * sampled.size(),
                             down_bits * sampled.size());
    if (ledger.comm_rounds() % config.eval_every == 0 || r + 1 == rounds) {
      detail::log_eval(result.record, ledger, config, data, spec, x,
                       (r + 1) * steps);
    }
    if (observer) observer(IterationView{r, true, clients, x});
  }
  result.model = std::move(x);
  finalize_summary(result.record);
  return result;
}

RunResult run_scaffold(const FedConfig& config, const FederatedDataset& data,
                       const ModelSpec& spec,
                       const IterationObserver& observer) {
  detail::check_run_inputs(config, data, spec);
  auto [sample_rng, x, clients] = setup(config, spec);
  const std::size_t d = x.size();
  const std::size_t steps = config.local_steps_baseline;
  const std::uint64_t rounds = round_count(config);
  // Model plus control variate travel both ways.
  const std::uint64_t link_bits = 2 * bit_cost(CompressorSpec::identity(), d);

  RunResult result;
  result.record.summary.seed = config.seed;
  result.record.summary.dimension = d;
  BitLedger ledger;
  detail::log_eval(result.record, ledger, config, data, spec, x, 0);

  ParamVector c(d, 0.0);  // server control variate; clients keep theirs in h
  detail::WorkerPool pool(config.workers);
  std::vector<ParamVector> dx(config.sample_size);
  std::vector<ParamVector> dc(config.sample_size);
  const double inv_step_gamma = 1.0 / (double(steps) * config.gamma);

  for (std::uint64_t r = 0; r < rounds; ++r) {
    const auto sampled = detail::sample_clients(config, sample_rng);
    pool.run(sampled.size(), [&](std::size_t j) {
      ClientState& client = clients[sampled[j]];
      const auto& shard = data.partition[sampled[j]];
      // Correction -c_i + c is fixed for the whole round.
      const ParamVector correction = subtract(c, client.h);
      ParamVector y = x;
      for (std::size_t k = 0; k < steps; ++k) {
        const Batch batch = detail::draw_batch(config, shard, client.batch_rng);
        ParamVector g = gradient(spec, y, data.train, batch);
        axpy_inplace(1.0, correction, g);
        axpy_inplace(-config.gamma, g, y);
      }
      // c_i+ = c_i - c + (x - y) / (steps * gamma)
      ParamVector h_new = subtract(client.h, c);
      for (std::size_t k = 0; k < d; ++k) {
        h_new[k] += (x[k] - y[k]) * inv_step_gamma;
      }
      dx[j] = subtract(y, x);
      dc[j] = subtract(h_new, client.h);
      client.h = std::move(h_new);
      client.x = std::move(y);
    });
    ledger.add_local_steps(steps);
    if (any_non_finite(dx) || any_non_finite(dc)) {
      result.record.summary.diverged = true;
      break;
    }
    x = apply_mean_delta(x, dx);
    // c += (|S|/n) mean(dc) = sum(dc) / n
    ParamVector dc_sum = dc[0];
    for (std::size_t j = 1; j < dc.size(); ++j) axpy_inplace(1.0, dc[j], dc_sum);
    axpy_inplace(1.0 / double(config.n_clients), dc_sum, c);

    ledger.add_communication(link_bits * sampled.size(),
                             link_bits * sampled.size());
    if (ledger.comm_rounds() % config.eval_every == 0 || r + 1 == rounds) {
      detail::log_eval(result.record, ledger, config, data, spec, x,
                       (r + 1) * steps);
    }
    if (observer) observer(IterationView{r, true, clients, x});
  }
  result.model = std::move(x);
  finalize_summary(result.record);
  return result;
}

}  // namespace fedsim
