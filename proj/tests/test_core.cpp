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

#include <doctest.h>

#include <cmath>
#include <set>

#include "fedsim/core.hpp"

using namespace fedsim;

TEST_CASE("axpy examples") {
  CHECK(axpy(2.0, {1, 2}, {0, 1}) == ParamVector{2, 5});
  CHECK(axpy(0.0, {7, 7}, {3, 4}) == ParamVector{3, 4});
  CHECK(axpy(-1.0, {1, 1}, {1, 1}) == ParamVector{0, 0});
}

TEST_CASE("axpy rejects mismatched lengths") {
  CHECK_THROWS_AS(axpy(1.0, {1, 2}, {1, 2, 3}), DimensionError);
  ParamVector y{1.0};
  CHECK_THROWS_AS(axpy_inplace(1.0, {1, 2}, y), DimensionError);
}

TEST_CASE("l2_norm examples") {
  CHECK(l2_norm({3, 4}) == 5.0);
  CHECK(l2_norm({0, 0, 0}) == 0.0);
  CHECK(l2_norm({1, 1, 1, 1}) == 2.0);
  CHECK(l2_norm({1e200, 1e200}) == doctest::Approx(std::sqrt(2.0) * 1e200));
}

TEST_CASE("axpy is bilinear and l2_norm is absolutely homogeneous") {
  RngStream rng = derive_stream(7, "prop/server");
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng.uniform_index(20);
    ParamVector x(d), y(d), zero(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
    }
    const double a = rng.normal() * 3;
    const double b = rng.normal() * 3;
    const double c = rng.normal() * 10;

    // a*x + (b*y + 0) equals the componentwise bilinear expression.
    const ParamVector lhs = axpy(a, x, axpy(b, y, zero));
    for (std::size_t i = 0; i < d; ++i) {
      const double expect = a * x[i] + b * y[i];
      CHECK(std::abs(lhs[i] - expect) <= 1e-12 * (std::abs(a * x[i]) + std::abs(b * y[i]) + 1e-300));
    }
    // Linearity in the scale argument.
    const ParamVector sum_scale = axpy(a + b, x, zero);
    const ParamVector split = axpy(a, x, axpy(b, x, zero));
    for (std::size_t i = 0; i < d; ++i) {
      CHECK(std::abs(sum_scale[i] - split[i]) <=
            1e-12 * (std::abs(a) + std::abs(b)) * std::abs(x[i]) + 1e-300);
    }

    const double n = l2_norm(x);
    CHECK(std::abs(l2_norm(scale(c, x)) - std::abs(c) * n) <= 1e-12 * std::abs(c) * n);
  }
}

TEST_CASE("derive_stream is deterministic and label/seed sensitive") {
  auto draws = [](RngStream s) {
    std::vector<std::uint64_t> v;
    for (int i = 0; i < 100; ++i) v.push_back(s());
    return v;
  };
  const auto a = draws(derive_stream(42, "coins"));
  CHECK(a == draws(derive_stream(42, "coins")));
  CHECK(a != draws(derive_stream(42, "quant/client-3")));
  CHECK(a != draws(derive_stream(43, "coins")));
}

TEST_CASE("stream labels follow the role/client-<i> scheme") {
  CHECK(client_label("quant", 3) == "quant/client-3");
  CHECK(server_label("coins") == "coins/server");
}

TEST_CASE("uniform draws stay in [0,1) with the right mean") {
  RngStream rng = derive_stream(1, "u/server");
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("sample_without_replacement returns sorted distinct indices") {
  RngStream rng = derive_stream(3, "sample/server");
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = sample_without_replacement(20, 5, rng);
    REQUIRE(s.size() == 5);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 5);
    CHECK(s.back() < 20);
  }
  const auto all = sample_without_replacement(4, 4, rng);
  CHECK(all == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK_THROWS_AS(sample_without_replacement(3, 4, rng), ParameterError);
}

TEST_CASE("finiteness check") {
  CHECK(ParamVector{1, 2}.all_finite());
  CHECK_FALSE(ParamVector{1, NAN}.all_finite());
  CHECK_FALSE(ParamVector{INFINITY}.all_finite());
}
