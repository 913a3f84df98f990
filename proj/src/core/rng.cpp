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
#include <array>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <cmath>

#include "fedsim/core.hpp"

namespace fedsim {

namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  // seed_seq's mixing algorithm is fixed by the standard, so this seeding is
  // identical on every conforming platform.
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw ParameterError("uniform_index: empty range");
  boost::random::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(engine_);
}

double RngStream::normal() {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw ParameterError("gamma: shape must be positive");
  boost::random::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

RngStream derive_stream(std::uint64_t seed, std::string_view label) {
  return RngStream(seed, fnv1a64(label));
}

std::string client_label(std::string_view role, std::size_t client) {
  return std::string(role) + "/client-" + std::to_string(client);
}

std::string server_label(std::string_view role) {
  return std::string(role) + "/server";
}

std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                    std::size_t k,
                                                    RngStream& rng) {
  if (k > n) throw ParameterError("sample_without_replacement: k > n");
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  if (k == n) return pool;
  // Partial Fisher-Yates over the first k slots.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace fedsim
