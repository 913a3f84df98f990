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
#include <cmath>

#include "fed/internal.hpp"
#include "fed/worker_pool.hpp"
#include "fedsim/fed.hpp"

namespace fedsim {

namespace {

double control_sum_inf(const std::vector<ClientState>& clients) {
  ParamVector sum(clients.front().h.size(), 0.0);
  for (const auto& c : clients) axpy_inplace(1.0, c.h, sum);
  return max_abs(sum);
}

}  // namespace

RunResult run_fedcomloc(const FedConfig& config, const FederatedDataset& data,
                        const ModelSpec& spec,
                        const IterationObserver& observer) {
  detail::check_run_inputs(config, data, spec);

  const std::uint64_t seed = config.seed;
  RngStream init_rng = derive_stream(seed, server_label("init"));
  RngStream coin_rng = derive_stream(seed, server_label("coins"));
  RngStream sample_rng = derive_stream(seed, server_label("sample"));
  RngStream server_quant = derive_stream(seed, server_label("quant"));

  const ParamVector x0 = init_params(spec, init_rng);
  const std::size_t d = x0.size();
  std::vector<ClientState> clients;
  clients.reserve(config.n_clients);
  for (std::size_t i = 0; i < config.n_clients; ++i) {
    clients.push_back(make_client(i, x0, seed));
  }
  const auto coins = generate_coins(config.p, config.T, coin_rng);

  const std::uint64_t up_bits = bit_cost(uplink_compressor(config), d);
  const std::uint64_t down_bits = bit_cost(downlink_compressor(config), d);

  RunResult result;
  result.record.summary.seed = seed;
  result.record.summary.dimension = d;
  result.model = x0;

  BitLedger ledger;
  detail::log_eval(result.record, ledger, config, data, spec, result.model, 0);

  detail::WorkerPool pool(config.workers);
  std::vector<ParamVector> x_hats(config.sample_size);
  std::vector<RngStream*> rngs(config.sample_size);
  bool logged_last = true;
  std::uint64_t last_comm_t = 0;

  for (std::uint64_t t = 0; t < config.T; ++t) {
    const auto sampled = detail::sample_clients(config, sample_rng);

    pool.run(sampled.size(), [&](std::size_t j) {
      ClientState& client = clients[sampled[j]];
      const Batch batch =
          detail::draw_batch(config, data.partition[sampled[j]], client.batch_rng);
      x_hats[j] = local_step(client, config.gamma, spec, data.train, batch,
                             config.compressor, config.variant);
    });
    ledger.add_local_steps(1);

    const bool diverged = std::any_of(
        x_hats.begin(), x_hats.end(),
        [](const ParamVector& v) { return !v.all_finite(); });
    if (diverged) {
      result.record.summary.diverged = true;
      break;
    }

    const bool communicate = coins[t] != 0;
    if (communicate) {
      for (std::size_t j = 0; j < sampled.size(); ++j) {
        rngs[j] = &clients[sampled[j]].quant_rng;
      }
      ParamVector x_new = aggregate(x_hats, rngs, config.variant,
                                    config.compressor, server_quant);
      // Under the com variant x_hats now hold the compressed uploads, which
      // is what the control update must subtract for sum_i h_i to stay 0.
      for (std::size_t j = 0; j < sampled.size(); ++j) {
        ClientState& client = clients[sampled[j]];
        client.h = update_control(client.h, x_new, x_hats[j], config.p,
                                  config.gamma);
        client.x = x_new;
      }
      ledger.add_communication(up_bits * sampled.size(),
                               down_bits * sampled.size());
      result.model = std::move(x_new);
      result.record.summary.max_control_sum =
          std::max(result.record.summary.max_control_sum,
                   control_sum_inf(clients));

      last_comm_t = t + 1;
      logged_last = ledger.comm_rounds() % config.eval_every == 0;
      if (logged_last) {
        detail::log_eval(result.record, ledger, config, data, spec,
                         result.model, t + 1);
      }
    } else {
      for (std::size_t j = 0; j < sampled.size(); ++j) {
        clients[sampled[j]].x = std::move(x_hats[j]);
      }
    }

    if (observer) {
      observer(IterationView{t, communicate, clients, result.model});
    }
  }
  if (!logged_last && !result.record.summary.diverged) {
    detail::log_eval(result.record, ledger, config, data, spec, result.model,
                     last_comm_t);
  }
  finalize_summary(result.record);
  return result;
}

}  // namespace fedsim
