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
#include <fstream>
#include <numeric>

#include "fedsim/data.hpp"

namespace fedsim {

namespace {

std::vector<double> dirichlet(std::size_t k, double alpha, RngStream& rng) {
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& v : w) {
    v = rng.gamma(alpha);
    total += v;
  }
  if (!(total > 0.0)) {
    // Every Gamma(alpha) draw underflowed; fall back to a single random
    // winner, which is the limit of Dirichlet(alpha -> 0).
    std::fill(w.begin(), w.end(), 0.0);
    w[rng.uniform_index(k)] = 1.0;
    return w;
  }
  for (auto& v : w) v /= total;
  return w;
}

// Splits m items into counts proportional to `share` (summing to 1). The
// leftover after flooring goes to the largest fractional parts, lower index
// first on ties.
std::vector<std::size_t> largest_remainder(std::size_t m,
                                           const std::vector<double>& share) {
  const std::size_t k = share.size();
  std::vector<std::size_t> counts(k);
  std::vector<double> frac(k);
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const double exact = share[j] * double(m);
    counts[j] = static_cast<std::size_t>(std::floor(exact));
    frac[j] = exact - double(counts[j]);
    assigned += counts[j];
  }
  // Rounding error can in principle push the floor sum above m.
  while (assigned > m) {
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --assigned;
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t j = 0; assigned < m; j = (j + 1) % k) {
    ++counts[order[j]];
    ++assigned;
  }
  return counts;
}

}  // namespace

Partition dirichlet_partition(std::span<const int> labels,
                              const PartitionSpec& spec, RngStream& rng) {
  if (labels.empty()) throw DataError("dirichlet_partition: empty label set");
  if (spec.n_clients < 1) {
    throw ParameterError("dirichlet_partition: n_clients must be >= 1");
  }
  if (!(spec.alpha > 0.0)) {
    throw ParameterError("dirichlet_partition: alpha must be positive");
  }
  if (labels.size() < spec.n_clients) {
    throw DataError("dirichlet_partition: " + std::to_string(labels.size()) +
                    " samples cannot cover " + std::to_string(spec.n_clients) +
                    " clients");
  }

  int max_label = 0;
  for (int l : labels) {
    if (l < 0) throw DataError("dirichlet_partition: negative label");
    max_label = std::max(max_label, l);
  }
  std::vector<std::vector<std::size_t>> by_class(std::size_t(max_label) + 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[std::size_t(labels[i])].push_back(i);
  }

  Partition part(spec.n_clients);
  for (auto& members : by_class) {
    if (members.empty()) continue;
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.uniform_index(i)]);
    }
    const auto share = dirichlet(spec.n_clients, spec.alpha, rng);
    const auto counts = largest_remainder(members.size(), share);
    std::size_t next = 0;
    for (std::size_t c = 0; c < spec.n_clients; ++c) {
      for (std::size_t j = 0; j < counts[c]; ++j) {
        part[c].push_back(members[next++]);
      }
    }
  }

  for (std::size_t c = 0; c < spec.n_clients; ++c) {
    if (!part[c].empty()) continue;
    auto donor = std::max_element(
        part.begin(), part.end(),
        [](const auto& a, const auto& b) { return a.size() < b.size(); });
    part[c].push_back(donor->back());
    donor->pop_back();
  }
  for (auto& cell : part) std::sort(cell.begin(), cell.end());
  return part;
}

void check_partition(const Partition& partition, std::size_t n) {
  std::vector<char> seen(n, 0);
  std::size_t total = 0;
  for (std::size_t c = 0; c < partition.size(); ++c) {
    if (partition[c].empty()) {
      throw DataError("partition: client " + std::to_string(c) + " is empty");
    }
    for (std::size_t idx : partition[c]) {
      if (idx >= n) throw DataError("partition: index out of range");
      if (seen[idx]) {
        throw DataError("partition: sample " + std::to_string(idx) +
                        " assigned twice");
      }
      seen[idx] = 1;
      ++total;
    }
  }
  if (total != n) throw DataError("partition: not every sample is assigned");
}

std::vector<std::vector<std::size_t>> class_histograms(
    const Partition& partition, std::span<const int> labels,
    std::size_t n_classes) {
  std::vector<std::vector<std::size_t>> counts(
      partition.size(), std::vector<std::size_t>(n_classes, 0));
  for (std::size_t c = 0; c < partition.size(); ++c) {
    for (std::size_t idx : partition[c]) ++counts[c][std::size_t(labels[idx])];
  }
  return counts;
}

std::vector<double> histogram_tv_distances(const Partition& partition,
                                           std::span<const int> labels,
                                           std::size_t n_classes) {
  std::vector<double> global(n_classes, 0.0);
  for (int l : labels) global[std::size_t(l)] += 1.0;
  for (auto& g : global) g /= double(labels.size());

  const auto counts = class_histograms(partition, labels, n_classes);
  std::vector<double> tv(partition.size(), 0.0);
  for (std::size_t c = 0; c < partition.size(); ++c) {
    const double m = double(partition[c].size());
    double acc = 0.0;
    for (std::size_t k = 0; k < n_classes; ++k) {
      acc += std::abs(double(counts[c][k]) / m - global[k]);
    }
    tv[c] = 0.5 * acc;
  }
  return tv;
}

void write_partition_stats(const std::filesystem::path& path,
                           const Partition& partition,
                           std::span<const int> labels, std::size_t n_classes) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write partition stats: " + path.string());
  out << "client_id,class_id,count\n";
  const auto counts = class_histograms(partition, labels, n_classes);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t k = 0; k < n_classes; ++k) {
      out << c << ',' << k << ',' << counts[c][k] << '\n';
    }
  }
  if (!out) throw IoError("failed writing partition stats: " + path.string());
}

}  // namespace fedsim
