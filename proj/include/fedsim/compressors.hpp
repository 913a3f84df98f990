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
#include <optional>
#include <string>
#include <string_view>

#include "fedsim/core.hpp"

namespace fedsim {

enum class CompressorKind { identity, topk, quant, topk_quant };

std::string_view to_string(CompressorKind kind) noexcept;
std::optional<CompressorKind> parse_compressor_kind(std::string_view name);

/// Description of a compression operator and the knobs it needs.
///
/// `density` is the fraction of coordinates TopK keeps, applied to the whole
/// flat model vector: K = max(1, round(density * d)). `bits` is the
/// quantization budget r, used by `quant` and `topk_quant`.
struct CompressorSpec {
  CompressorKind kind = CompressorKind::identity;
  double density = 1.0;
  int bits = 8;

  static CompressorSpec identity() { return {}; }
  static CompressorSpec topk(double density) {
    return {CompressorKind::topk, density, 8};
  }
  static CompressorSpec quant(int bits) {
    return {CompressorKind::quant, 1.0, bits};
  }
  static CompressorSpec topk_quant(double density, int bits) {
    return {CompressorKind::topk_quant, density, bits};
  }

  bool uses_rng() const noexcept {
    return kind == CompressorKind::quant || kind == CompressorKind::topk_quant;
  }

  /// Throws ParameterError when density is outside (0,1] or bits outside
  /// [1,31].
  void validate() const;

  friend bool operator==(const CompressorSpec&,
                         const CompressorSpec&) = default;
};

std::size_t effective_k(double density, std::size_t d);

/// Keeps the K largest-magnitude entries of x and zeroes the rest. Among equal
/// magnitudes the lower index wins.
ParamVector top_k(const ParamVector& x, std::size_t k);

/// Unbiased stochastic quantization onto a 2^bits-level grid scaled by
/// ||x||_2. Draws exactly one uniform per coordinate, in index order, even
/// when x is zero, so stream positions do not depend on the data.
ParamVector quantize(const ParamVector& x, int bits, RngStream& rng);

/// quantize(top_k(x, k), bits).
ParamVector compose_topk_quant(const ParamVector& x, std::size_t k, int bits,
                               RngStream& rng);

/// Applies the operator described by spec. rng is only touched by the
/// quantizing kinds.
ParamVector compress(const CompressorSpec& spec, const ParamVector& x,
                     RngStream& rng);

/// Wire cost in bits of one compressed d-vector:
///   identity    32 d
///   topk        K (32 + ceil(log2 d))
///   quant       32 + d (1 + r)
///   topk_quant  32 + K (1 + r + ceil(log2 d))
std::uint64_t bit_cost(const CompressorSpec& spec, std::size_t d);

/// ceil(log2 d) for d >= 1, computed exactly.
unsigned ceil_log2(std::uint64_t d);

}  // namespace fedsim
