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
#include <fstream>
#include <numeric>
#include <set>

#include "fedsim/data.hpp"
#include "fedsim/models.hpp"
#include "test_util.hpp"

using namespace fedsim;

namespace {

std::vector<int> balanced_labels(std::size_t n, int classes) {
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = int(i % std::size_t(classes));
  return labels;
}

void check_complete(const Partition& part, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& cell : part) {
    CHECK_FALSE(cell.empty());
    for (std::size_t i : cell) {
      REQUIRE(i < n);
      ++seen[i];
    }
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

double mean_tv(const std::vector<int>& labels, std::size_t clients, double alpha,
               std::uint64_t seed) {
  RngStream rng = derive_stream(seed, "partition/server");
  const auto part = dirichlet_partition(labels, {clients, alpha}, rng);
  const auto tv = histogram_tv_distances(part, labels, 10);
  return std::accumulate(tv.begin(), tv.end(), 0.0) / double(tv.size());
}

void put_u32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_idx(const std::filesystem::path& path, std::uint32_t magic,
               const std::vector<std::uint32_t>& dims,
               const std::vector<unsigned char>& payload) {
  std::ofstream out(path, std::ios::binary);
  put_u32(out, magic);
  for (auto d : dims) put_u32(out, d);
  out.write(reinterpret_cast<const char*>(payload.data()),
            std::streamsize(payload.size()));
}

}  // namespace

TEST_CASE("dirichlet_partition covers every index exactly once") {
  const auto labels = balanced_labels(1000, 10);
  for (double alpha : {0.05, 0.1, 0.7, 5.0, 1000.0}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      RngStream rng = derive_stream(seed, "partition/server");
      const auto part = dirichlet_partition(labels, {20, alpha}, rng);
      REQUIRE(part.size() == 20);
      check_complete(part, labels.size());
      CHECK_NOTHROW(check_partition(part, labels.size()));
    }
  }
}

TEST_CASE("dirichlet_partition with a single client") {
  const auto labels = balanced_labels(57, 3);
  RngStream rng = derive_stream(1, "partition/server");
  const auto part = dirichlet_partition(labels, {1, 0.5}, rng);
  REQUIRE(part.size() == 1);
  std::vector<std::size_t> all = part[0];
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expect(57);
  std::iota(expect.begin(), expect.end(), std::size_t{0});
  CHECK(all == expect);
}

TEST_CASE("dirichlet_partition repairs empty clients") {
  // Every client gets at least one sample even with as many clients as
  // samples and a very skewed split.
  const auto labels = balanced_labels(12, 2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng = derive_stream(seed, "partition/server");
    check_complete(dirichlet_partition(labels, {12, 0.05}, rng), 12);
  }
}

TEST_CASE("dirichlet_partition near-homogeneous for large alpha") {
  const auto labels = balanced_labels(10000, 10);
  RngStream rng = derive_stream(5, "partition/server");
  const auto part = dirichlet_partition(labels, {10, 1000.0}, rng);
  const auto hist = class_histograms(part, labels, 10);
  for (const auto& h : hist) {
    const double total = double(std::accumulate(h.begin(), h.end(), std::size_t{0}));
    for (std::size_t c = 0; c < 10; ++c) {
      CHECK(std::abs(double(h[c]) / total - 0.1) <= 0.02);
    }
  }
  const auto tv = histogram_tv_distances(part, labels, 10);
  CHECK(*std::max_element(tv.begin(), tv.end()) <= 0.1);
}

TEST_CASE("dirichlet_partition skewed for small alpha") {
  const auto labels = balanced_labels(1000, 10);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng = derive_stream(seed, "partition/server");
    const auto part = dirichlet_partition(labels, {10, 0.1}, rng);
    const auto hist = class_histograms(part, labels, 10);
    bool skewed = false;
    for (const auto& h : hist) {
      const std::size_t total = std::accumulate(h.begin(), h.end(), std::size_t{0});
      const std::size_t top = *std::max_element(h.begin(), h.end());
      if (2 * top >= total) skewed = true;
    }
    CHECK(skewed);
  }
}

TEST_CASE("heterogeneity grows as alpha shrinks") {
  const auto labels = balanced_labels(2000, 10);
  double tv_small = 0.0, tv_large = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    tv_small += mean_tv(labels, 10, 0.1, seed);
    tv_large += mean_tv(labels, 10, 1.0, seed);
  }
  CHECK(tv_small > tv_large);
}

TEST_CASE("dirichlet_partition is deterministic given the stream") {
  const auto labels = balanced_labels(300, 3);
  RngStream a = derive_stream(9, "partition/server");
  RngStream b = derive_stream(9, "partition/server");
  CHECK(dirichlet_partition(labels, {7, 0.3}, a) ==
        dirichlet_partition(labels, {7, 0.3}, b));
}

TEST_CASE("dirichlet_partition errors") {
  RngStream rng = derive_stream(0, "partition/server");
  CHECK_THROWS_AS(dirichlet_partition(std::vector<int>{}, {1, 1.0}, rng), DataError);
  CHECK_THROWS_AS(dirichlet_partition(balanced_labels(3, 3), {4, 1.0}, rng), DataError);
  CHECK_THROWS_AS(dirichlet_partition(balanced_labels(9, 3), {2, 0.0}, rng),
                  ParameterError);
}

TEST_CASE("check_partition flags overlap and gaps") {
  CHECK_NOTHROW(check_partition({{0, 2}, {1}}, 3));
  CHECK_THROWS(check_partition({{0, 1}, {1, 2}}, 3));
  CHECK_THROWS(check_partition({{0}, {2}}, 3));
  CHECK_THROWS(check_partition({{0, 1, 2}, {}}, 3));
}

TEST_CASE("partition stats CSV") {
  const auto dir = testing::scratch_dir("partition_stats");
  const std::vector<int> labels{0, 1, 1, 2, 0};
  write_partition_stats(dir / "p.csv", {{0, 1}, {2, 3, 4}}, labels, 3);
  std::ifstream in(dir / "p.csv");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text ==
        "client_id,class_id,count\n"
        "0,0,1\n0,1,1\n0,2,0\n"
        "1,0,1\n1,1,1\n1,2,1\n");
}

TEST_CASE("synth_classification shape and balance") {
  SynthSpec s;
  s.n = 1003;
  s.n_features = 5;
  s.n_classes = 4;
  RngStream rng = derive_stream(2, "data/server");
  const auto data = synth_classification(s, rng);
  CHECK(data.train.size() + data.test.size() == 1003);
  CHECK(data.test.size() == 200);
  CHECK(data.partition.empty());
  std::vector<std::size_t> counts(4, 0);
  for (const Dataset* ds : {&data.train, &data.test}) {
    CHECK(ds->n_features == 5);
    CHECK(ds->features.size() == ds->size() * 5);
    for (double v : ds->features) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    for (int l : ds->labels) ++counts[std::size_t(l)];
  }
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  CHECK(*hi - *lo <= 1);
}

TEST_CASE("synth_classification minimal instance") {
  SynthSpec s;
  s.n = 2;
  s.n_classes = 2;
  s.n_features = 3;
  RngStream rng = derive_stream(0, "data/server");
  const auto data = synth_classification(s, rng);
  std::multiset<int> all(data.train.labels.begin(), data.train.labels.end());
  all.insert(data.test.labels.begin(), data.test.labels.end());
  CHECK(all == std::multiset<int>{0, 1});
}

TEST_CASE("synth_classification is deterministic") {
  SynthSpec s;
  RngStream a = derive_stream(4, "data/server");
  RngStream b = derive_stream(4, "data/server");
  const auto x = synth_classification(s, a);
  const auto y = synth_classification(s, b);
  CHECK(x.train.features == y.train.features);
  CHECK(x.train.labels == y.train.labels);
  CHECK(x.test.features == y.test.features);
}

TEST_CASE("synth_classification rejects bad shapes") {
  RngStream rng = derive_stream(0, "data/server");
  SynthSpec s;
  s.n_classes = 1;
  CHECK_THROWS_AS(synth_classification(s, rng), ParameterError);
  s.n_classes = 10;
  s.n = 5;
  CHECK_THROWS_AS(synth_classification(s, rng), ParameterError);
}

TEST_CASE("logistic regression separates margin-4 synth data") {
  SynthSpec s;
  s.n = 1000;
  s.margin = 4.0;
  RngStream rng = derive_stream(0, "data/server");
  const auto data = synth_classification(s, rng);
  const auto spec = ModelSpec::logreg(s.n_features, s.n_classes);
  std::vector<std::size_t> all(data.train.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const Batch batch = full_batch(all);
  ParamVector x(spec.param_count(), 0.0);
  for (int it = 0; it < 3000; ++it) {
    const ParamVector g = gradient(spec, x, data.train, batch);
    axpy_inplace(-2.0, g, x);
  }
  CHECK(evaluate(spec, x, data.test).accuracy >= 0.95);
}

TEST_CASE("load_idx round-trips a hand-built fixture") {
  const auto dir = testing::scratch_dir("idx");
  std::vector<unsigned char> pixels(4 * 2 * 3);
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = static_cast<unsigned char>(i * 11);
  write_idx(dir / "img", 0x00000803, {4, 2, 3}, pixels);
  write_idx(dir / "lab", 0x00000801, {4}, {3, 0, 7, 1});

  const Dataset ds = load_idx(dir / "img", dir / "lab");
  CHECK(ds.size() == 4);
  CHECK(ds.n_features == 6);
  CHECK(ds.n_classes == 8);
  CHECK(ds.labels == std::vector<int>{3, 0, 7, 1});
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    CHECK(ds.features[i] == pixels[i] / 255.0);
  }

  SUBCASE("swapped files are rejected at offset 0") {
    try {
      (void)load_idx(dir / "img", dir / "img");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 0);
    }
  }
  SUBCASE("truncated image payload") {
    write_idx(dir / "short", 0x00000803, {4, 2, 3}, {1, 2, 3});
    try {
      (void)load_idx(dir / "short", dir / "lab");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 16 + 3);
      CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }
  }
  SUBCASE("count mismatch") {
    write_idx(dir / "lab3", 0x00000801, {3}, {1, 2, 3});
    try {
      (void)load_idx(dir / "img", dir / "lab3");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 4);
    }
  }
  SUBCASE("missing file names the path") {
    try {
      (void)load_idx(dir / "nope", dir / "lab");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("nope") != std::string::npos);
    }
  }
}

TEST_CASE("load_idx on MNIST when available") {
  const char* root = std::getenv("FEDSIM_MNIST_DIR");
  if (root == nullptr) return;
  const std::filesystem::path dir(root);
  const Dataset ds = load_idx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
  CHECK(ds.size() == 60000);
  CHECK(ds.n_features == 784);
  CHECK(ds.n_classes == 10);
}
