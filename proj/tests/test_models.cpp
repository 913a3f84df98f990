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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedsim/models.hpp"
#include "test_util.hpp"

using namespace fedsim;

namespace {

Dataset random_dataset(std::size_t n, std::size_t features, std::size_t classes,
                       std::uint64_t seed) {
  RngStream rng = derive_stream(seed, "data/server");
  Dataset ds;
  ds.n_features = features;
  ds.n_classes = classes;
  ds.features.resize(n * features);
  for (auto& v : ds.features) v = rng.uniform();
  ds.labels.resize(n);
  for (auto& l : ds.labels) l = int(rng.uniform_index(classes));
  return ds;
}

Batch all_rows(const Dataset& ds) {
  std::vector<std::size_t> rows(ds.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return full_batch(rows);
}

ParamVector random_params(const ModelSpec& spec, std::uint64_t seed, double s = 0.5) {
  RngStream rng = derive_stream(seed, "init/server");
  ParamVector p(spec.param_count());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = s * rng.normal();
  return p;
}

// Oracle: per-sample cross-entropy written out directly for logreg.
double logreg_sample_loss(const ModelSpec& spec, const ParamVector& p,
                          std::span<const double> x, int label) {
  const std::size_t F = spec.layer_sizes[0];
  const std::size_t C = spec.layer_sizes[1];
  std::vector<double> z(C);
  for (std::size_t c = 0; c < C; ++c) {
    z[c] = p[F * C + c];
    for (std::size_t f = 0; f < F; ++f) z[c] += p[f * C + c] * x[f];  // column-major W
  }
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s) - z[std::size_t(label)];
}

// Largest per-coordinate relative error between central differences and
// the analytic gradient over `count` random coordinates.
double fd_check(const ModelSpec& spec, const ParamVector& params,
                const Dataset& data, const Batch& batch, int count,
                std::uint64_t seed) {
  const ParamVector g = gradient(spec, params, data, batch);
  RngStream rng = derive_stream(seed, "fd/server");
  const double h = 1e-5;
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const std::size_t i = rng.uniform_index(params.size());
    ParamVector up = params, down = params;
    up[i] += h;
    down[i] -= h;
    const double fd = (loss(spec, up, data, batch) - loss(spec, down, data, batch)) / (2 * h);
    const double scale = std::max({std::abs(fd), std::abs(g[i]), 1e-6});
    worst = std::max(worst, std::abs(fd - g[i]) / scale);
  }
  return worst;
}

}  // namespace

TEST_CASE("parameter counts") {
  CHECK(ModelSpec::logreg(784, 10).param_count() == 7850);
  CHECK(ModelSpec::mlp(784, {128, 64}, 10).param_count() ==
        784 * 128 + 128 + 128 * 64 + 64 + 64 * 10 + 10);
}

TEST_CASE("spec validation") {
  CHECK_NOTHROW(ModelSpec::mlp(4, {3}, 2).validate(4, 2));
  CHECK_THROWS_AS(ModelSpec::mlp(4, {3}, 2).validate(5, 2), ParameterError);
  CHECK_THROWS_AS(ModelSpec::logreg(4, 2, -1.0).validate(4, 2), ParameterError);
}

TEST_CASE("init_params") {
  RngStream a = derive_stream(3, "init/server");
  const auto lr = ModelSpec::logreg(5, 3);
  const ParamVector z = init_params(lr, a);
  CHECK(z == ParamVector(lr.param_count(), 0.0));

  const auto mlp = ModelSpec::mlp(784, {128, 64}, 10);
  RngStream r1 = derive_stream(3, "init/server");
  RngStream r2 = derive_stream(3, "init/server");
  const ParamVector p = init_params(mlp, r1);
  CHECK(p == init_params(mlp, r2));
  const double bound = std::sqrt(6.0 / 784.0);
  for (std::size_t i = 0; i < 784 * 128; ++i) CHECK(std::abs(p[i]) <= bound);
  for (std::size_t i = 784 * 128; i < 784 * 128 + 128; ++i) CHECK(p[i] == 0.0);
}

TEST_CASE("uniform softmax at zero params gives ln C") {
  Dataset ds = random_dataset(50, 4, 10, 1);
  for (std::size_t i = 0; i < ds.size(); ++i) ds.labels[i] = int(i % 10);
  const auto spec = ModelSpec::logreg(4, 10);
  const ParamVector zero(spec.param_count(), 0.0);
  CHECK(loss(spec, zero, ds, all_rows(ds)) == doctest::Approx(std::log(10.0)).epsilon(1e-14));
}

TEST_CASE("saturated logits leave only the regularizer") {
  Dataset ds;
  ds.n_features = 1;
  ds.n_classes = 2;
  ds.features = {1.0};
  ds.labels = {1};
  const auto spec = ModelSpec::logreg(1, 2, 1.0);
  // W = [-400, 400], b = 0: margin 800, cross-entropy underflows to 0.
  const ParamVector p{-400, 400, 0, 0};
  CHECK(loss(spec, p, ds, all_rows(ds)) == doctest::Approx(0.5 * 2 * 400.0 * 400.0));
}

TEST_CASE("loss equals the mean of per-sample losses") {
  const Dataset ds = random_dataset(37, 6, 4, 2);
  const auto spec = ModelSpec::logreg(6, 4);
  const ParamVector p = random_params(spec, 2);
  double oracle = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    oracle += logreg_sample_loss(spec, p, ds.row(i), ds.labels[i]);
  }
  oracle /= double(ds.size());
  CHECK(loss(spec, p, ds, all_rows(ds)) == doctest::Approx(oracle).epsilon(1e-13));

  const auto mlp = ModelSpec::mlp(6, {5, 3}, 4);
  const ParamVector q = random_params(mlp, 3);
  double mean = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) mean += loss(mlp, q, ds, Batch{{i}});
  CHECK(loss(mlp, q, ds, all_rows(ds)) == doctest::Approx(mean / double(ds.size())).epsilon(1e-13));
}

TEST_CASE("hand-computed logreg gradient") {
  // x = [1,2], label 0, zero params: softmax = [.5,.5], residual = [-.5,.5].
  Dataset ds;
  ds.n_features = 2;
  ds.n_classes = 2;
  ds.features = {1.0, 2.0};
  ds.labels = {0};
  const auto spec = ModelSpec::logreg(2, 2);
  const ParamVector g = gradient(spec, ParamVector(6, 0.0), ds, all_rows(ds));
  // W is out x in, column-major: [W00, W10, W01, W11], then b.
  CHECK(g == ParamVector{-0.5, 0.5, -1.0, 1.0, -0.5, 0.5});
}

TEST_CASE("regularizer adds lambda * params") {
  const Dataset ds = random_dataset(20, 3, 3, 4);
  const auto plain = ModelSpec::mlp(3, {4}, 3, 0.0);
  auto reg = plain;
  reg.l2_reg = 0.3;
  const ParamVector p = random_params(plain, 4);
  const ParamVector diff = subtract(gradient(reg, p, ds, all_rows(ds)),
                                    gradient(plain, p, ds, all_rows(ds)));
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(diff[i] == doctest::Approx(0.3 * p[i]).epsilon(1e-12));
  }
}

TEST_CASE("gradient matches central finite differences") {
  const Dataset ds = random_dataset(8, 5, 3, 5);
  const Batch b = all_rows(ds);
  const auto mlp = ModelSpec::mlp(5, {7, 6}, 3, 0.01);
  const auto lr = ModelSpec::logreg(5, 3, 0.01);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CHECK(fd_check(mlp, random_params(mlp, seed), ds, b, 30, seed) < 1e-5);
    CHECK(fd_check(lr, random_params(lr, seed), ds, b, 30, seed) < 1e-5);
  }
}

TEST_CASE("full-batch gradient is the mean of per-sample gradients") {
  const Dataset ds = random_dataset(16, 4, 3, 6);
  const auto mlp = ModelSpec::mlp(4, {6, 5}, 3, 0.05);
  const ParamVector p = random_params(mlp, 6);
  ParamVector mean(p.size(), 0.0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    axpy_inplace(1.0 / double(ds.size()), gradient(mlp, p, ds, Batch{{i}}), mean);
  }
  const ParamVector full = gradient(mlp, p, ds, all_rows(ds));
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(full[i] - mean[i]) <= 1e-12);
}

TEST_CASE("regularized logreg loss is strongly convex") {
  const Dataset ds = random_dataset(30, 4, 3, 7);
  const double lambda = 0.1;
  const auto spec = ModelSpec::logreg(4, 3, lambda);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const ParamVector x = random_params(spec, 2 * s, 2.0);
    const ParamVector y = random_params(spec, 2 * s + 1, 2.0);
    const ParamVector mid = axpy(0.5, subtract(y, x), x);
    const double lhs = loss(spec, mid, ds, all_rows(ds));
    const double rhs = 0.5 * loss(spec, x, ds, all_rows(ds)) +
                       0.5 * loss(spec, y, ds, all_rows(ds)) -
                       lambda / 8.0 * std::pow(distance(x, y), 2);
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("empty batch and dimension errors") {
  const Dataset ds = random_dataset(4, 2, 2, 8);
  const auto spec = ModelSpec::logreg(2, 2);
  CHECK_THROWS_AS(loss(spec, ParamVector(6, 0.0), ds, Batch{}), ParameterError);
  CHECK_THROWS_AS(gradient(spec, ParamVector(6, 0.0), ds, Batch{}), ParameterError);
  CHECK_THROWS_AS(loss(spec, ParamVector(5, 0.0), ds, all_rows(ds)), DimensionError);
  Dataset empty;
  empty.n_features = 2;
  empty.n_classes = 2;
  CHECK_THROWS_AS(evaluate(spec, ParamVector(6, 0.0), empty), ParameterError);
}

TEST_CASE("evaluate: chance level, bounds and purity") {
  // Labels independent of the features: any fixed model sits at 1/C.
  const Dataset ds = random_dataset(20000, 6, 5, 9);
  const auto spec = ModelSpec::mlp(6, {8}, 5);
  RngStream rng = derive_stream(9, "init/server");
  const ParamVector p = init_params(spec, rng);
  const EvalResult a = evaluate(spec, p, ds);
  CHECK(std::abs(a.accuracy - 0.2) <= 0.05);
  CHECK(a.loss >= 0.0);
  const EvalResult b = evaluate(spec, p, ds);
  CHECK(a.loss == b.loss);
  CHECK(a.accuracy == b.accuracy);
}

TEST_CASE("evaluate matches loss on the whole split") {
  const Dataset ds = random_dataset(2500, 3, 4, 10);  // crosses the chunk size
  const auto spec = ModelSpec::logreg(3, 4, 0.02);
  const ParamVector p = random_params(spec, 10);
  CHECK(evaluate(spec, p, ds).loss == doctest::Approx(loss(spec, p, ds, all_rows(ds))).epsilon(1e-12));
}

TEST_CASE("sample_batch") {
  RngStream rng = derive_stream(11, "batch/client-0");
  SUBCASE("exhaustion returns a permutation of the shard") {
    auto s = sample_batch(5, 9, rng);
    REQUIRE(s.size() == 5);
    std::sort(s.begin(), s.end());
    CHECK(s == std::vector<std::size_t>{0, 1, 2, 3, 4});
  }
  SUBCASE("draws are distinct") {
    for (int i = 0; i < 100; ++i) {
      auto s = sample_batch(30, 10, rng);
      std::sort(s.begin(), s.end());
      CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
    }
  }
  SUBCASE("b = 1 is uniform over the shard") {
    const int n = 100000;
    std::vector<double> count(16, 0.0);
    for (int i = 0; i < n; ++i) count[sample_batch(16, 1, rng)[0]] += 1;
    double chi2 = 0.0;
    const double expect = n / 16.0;
    for (double c : count) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2 < 30.578);  // chi-square 0.99 quantile, 15 dof
  }
  SUBCASE("same stream state gives the same batch") {
    RngStream a = derive_stream(12, "batch/client-1");
    RngStream b = derive_stream(12, "batch/client-1");
    CHECK(sample_batch(50, 8, a) == sample_batch(50, 8, b));
  }
  SUBCASE("empty shard") {
    CHECK_THROWS_AS(sample_batch(0, 4, rng), DataError);
  }
  SUBCASE("gather maps positions into the shard") {
    const Batch b = gather_batch({10, 20, 30}, {2, 0});
    CHECK(b.rows == std::vector<std::size_t>{30, 10});
  }
}
