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

#include "fedsim/compressors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace fedsim {

std::string_view to_string(CompressorKind kind) noexcept {
  switch (kind) {
    case CompressorKind::identity: return "identity";
    case CompressorKind::topk: return "topk";
    case CompressorKind::quant: return "quant";
    case CompressorKind::topk_quant: return "topk_quant";
  }
  return "identity";
}

std::optional<CompressorKind> parse_compressor_kind(std::string_view name) {
  if (name == "identity" || name == "none") return CompressorKind::identity;
  if (name == "topk") return CompressorKind::topk;
  if (name == "quant") return CompressorKind::quant;
  if (name == "topk_quant") return CompressorKind::topk_quant;
  return std::nullopt;
}

void CompressorSpec::validate() const {
  if (!(density > 0.0 && density <= 1.0)) {
    throw ParameterError("compressor density must lie in (0, 1], got " +
                         std::to_string(density));
  }
  if (bits < 1 || bits > 31) {
    throw ParameterError("compressor bits must lie in [1, 31], got " +
                         std::to_string(bits));
  }
}

std::size_t effective_k(double density, std::size_t d) {
  const auto k = static_cast<std::size_t>(std::llround(density * double(d)));
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(d, 1));
}

ParamVector top_k(const ParamVector& x, std::size_t k) {
  const std::size_t d = x.size();
  if (k < 1 || k > d) {
    throw ParameterError("top_k: K=" + std::to_string(k) +
                         " outside [1, " + std::to_string(d) + "]");
  }
  if (k == d) return x;

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Strict total order: larger magnitude first, lower index on ties.
  auto before = [&x](std::size_t a, std::size_t b) {
    const double ma = std::abs(x[a]);
    const double mb = std::abs(x[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  };
  std::nth_element(order.begin(), order.begin() + std::ptrdiff_t(k - 1),
                   order.end(), before);

  ParamVector y(d, 0.0);
  for (std::size_t j = 0; j < k; ++j) y[order[j]] = x[order[j]];
  return y;
}

ParamVector quantize(const ParamVector& x, int bits, RngStream& rng) {
  if (bits < 1 || bits > 31) {
    throw ParameterError("quantize: bits must lie in [1, 31]");
  }
  const std::size_t d = x.size();
  const double norm = l2_norm(x);
  const double levels = std::ldexp(1.0, bits);

  ParamVector out(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const double u = rng.uniform();
    if (norm == 0.0 || x[i] == 0.0) continue;
    const double y = std::min(std::abs(x[i]) / norm, 1.0);
    const double scaled = levels * y;
    const double lower = std::floor(scaled);
    const double level = (u < scaled - lower) ? lower + 1.0 : lower;
    out[i] = norm * std::copysign(level / levels, x[i]);
  }
  return out;
}

ParamVector compose_topk_quant(const ParamVector& x, std::size_t k, int bits,
                               RngStream& rng) {
  return quantize(top_k(x, k), bits, rng);
}

ParamVector compress(const CompressorSpec& spec, const ParamVector& x,
                     RngStream& rng) {
  switch (spec.kind) {
    case CompressorKind::identity:
      return x;
    case CompressorKind::topk:
      return top_k(x, effective_k(spec.density, x.size()));
    case CompressorKind::quant:
      return quantize(x, spec.bits, rng);
    case CompressorKind::topk_quant:
      return compose_topk_quant(x, effective_k(spec.density, x.size()),
                                spec.bits, rng);
  }
  return x;
}

unsigned ceil_log2(std::uint64_t d) {
  unsigned bits = 0;
  while ((std::uint64_t{1} << bits) < d) ++bits;
  return bits;
}

std::uint64_t bit_cost(const CompressorSpec& spec, std::size_t d) {
  const std::uint64_t dd = d;
  const std::uint64_t index_bits = ceil_log2(dd);
  const std::uint64_t r = static_cast<std::uint64_t>(spec.bits);
  switch (spec.kind) {
    case CompressorKind::identity:
      return 32 * dd;
    case CompressorKind::topk:
      return effective_k(spec.density, d) * (32 + index_bits);
    case CompressorKind::quant:
      return 32 + dd * (1 + r);
    case CompressorKind::topk_quant:
      return 32 + effective_k(spec.density, d) * (1 + r + index_bits);
  }
  return 32 * dd;
}

}  // namespace fedsim
