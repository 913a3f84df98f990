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
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedsim/error.hpp"

namespace fedsim {

/// Flat vector of model coordinates. Models, gradients and control variates
/// all live in this layout; the length is fixed once a run starts.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t d, double fill = 0.0) : values_(d, fill) {}
  ParamVector(std::initializer_list<double> values) : values_(values) {}
  explicit ParamVector(std::vector<double> values)
      : values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  std::span<double> span() noexcept { return values_; }
  std::span<const double> span() const noexcept { return values_; }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  const std::vector<double>& values() const noexcept { return values_; }

  bool all_finite() const noexcept;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> values_;
};

/// Returns a*x + y. Throws DimensionError on length mismatch.
ParamVector axpy(double a, const ParamVector& x, const ParamVector& y);

/// y += a*x in place.
void axpy_inplace(double a, const ParamVector& x, ParamVector& y);

ParamVector scale(double a, const ParamVector& x);
ParamVector subtract(const ParamVector& x, const ParamVector& y);

double dot(const ParamVector& x, const ParamVector& y);
double l2_norm(const ParamVector& x);
double max_abs(const ParamVector& x);

/// Euclidean distance between two vectors of equal length.
double distance(const ParamVector& x, const ParamVector& y);

void require_same_size(const ParamVector& x, const ParamVector& y,
                       std::string_view what);

/// A reproducible random stream owned by one logical actor (the server or a
/// single client). Streams are derived from a run seed plus a string label of
/// the form "role/client-<i>" or "role/server".
class RngStream {
 public:
  using engine_type = std::mt19937_64;
  using result_type = engine_type::result_type;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // UniformRandomBitGenerator interface so the stream can feed
  // Boost.Random / <random> distributions directly.
  static constexpr result_type min() { return engine_type::min(); }
  static constexpr result_type max() { return engine_type::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();
  /// Gamma(shape, 1) draw.
  double gamma(double shape);
  bool bernoulli(double p);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  engine_type engine_;
};

/// Same (seed, label) always yields the same stream; changing either gives an
/// unrelated one.
RngStream derive_stream(std::uint64_t seed, std::string_view label);

/// "role/client-<i>"
std::string client_label(std::string_view role, std::size_t client);
/// "role/server"
std::string server_label(std::string_view role);

/// k distinct values from [0, n) in ascending order.
std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                    std::size_t k,
                                                    RngStream& rng);

}  // namespace fedsim
