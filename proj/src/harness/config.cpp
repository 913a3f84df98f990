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

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <toml.hpp>

#include "fedsim/harness.hpp"

namespace fedsim {

namespace {

const std::set<std::string, std::less<>>& known_keys() {
  static const std::set<std::string, std::less<>> keys = {
      "name", "seed", "workers", "output_dir", "grid", "partition_stats",
      "dataset.kind", "dataset.n", "dataset.n_features", "dataset.n_classes",
      "dataset.margin", "dataset.test_fraction", "dataset.train_images",
      "dataset.train_labels", "dataset.test_images", "dataset.test_labels",
      "partition.n_clients", "partition.alpha",
      "model.kind", "model.hidden", "model.l2_reg",
      "fed.algorithm", "fed.variant", "fed.sample_size", "fed.p", "fed.gamma",
      "fed.T", "fed.batch_size", "fed.tau", "fed.local_steps_baseline",
      "fed.eval_every", "fed.compressor.kind", "fed.compressor.density",
      "fed.compressor.bits",
  };
  return keys;
}

void collect_unknown(const toml::table& table, const std::string& prefix,
                     std::vector<std::string>& out) {
  for (const auto& [k, node] : table) {
    const std::string key = prefix.empty() ? std::string(k.str())
                                           : prefix + "." + std::string(k.str());
    if (prefix.empty() && key == "cells") continue;
    if (const auto* sub = node.as_table()) {
      collect_unknown(*sub, key, out);
    } else if (!known_keys().contains(key)) {
      out.push_back(key + ": unknown key");
    }
  }
}

// Looks a dotted key up in the cell table first, then in the base table.
class Reader {
 public:
  Reader(const toml::table& base, const toml::table* cell,
         std::vector<std::string>& violations)
      : base_(base), cell_(cell), violations_(violations) {}

  toml::node_view<const toml::node> find(std::string_view key) const {
    if (cell_ != nullptr) {
      if (auto v = cell_->at_path(key); v) return v;
    }
    return base_.at_path(key);
  }

  bool has(std::string_view key) const { return static_cast<bool>(find(key)); }

  double real(std::string_view key, double fallback) {
    const auto v = find(key);
    if (!v) return fallback;
    if (auto d = v.value<double>(); d && (v.is_integer() || v.is_floating_point())) {
      return *d;
    }
    bad(key, "expected a number");
    return fallback;
  }

  std::int64_t integer(std::string_view key, std::int64_t fallback) {
    const auto v = find(key);
    if (!v) return fallback;
    if (!v.is_integer()) {
      bad(key, "expected an integer");
      return fallback;
    }
    return *v.value<std::int64_t>();
  }

  std::size_t count(std::string_view key, std::size_t fallback) {
    const std::int64_t v = integer(key, static_cast<std::int64_t>(fallback));
    if (v < 0) {
      bad(key, "must be non-negative");
      return fallback;
    }
    return static_cast<std::size_t>(v);
  }

  std::string text(std::string_view key, std::string fallback) {
    const auto v = find(key);
    if (!v) return fallback;
    if (!v.is_string()) {
      bad(key, "expected a string");
      return fallback;
    }
    return std::string(*v.value<std::string_view>());
  }

  bool flag(std::string_view key, bool fallback) {
    const auto v = find(key);
    if (!v) return fallback;
    if (!v.is_boolean()) {
      bad(key, "expected true or false");
      return fallback;
    }
    return *v.value<bool>();
  }

  std::vector<double> reals(std::string_view key) {
    const auto v = find(key);
    if (!v) return {};
    const auto* arr = v.as_array();
    if (arr == nullptr) {
      bad(key, "expected an array of numbers");
      return {};
    }
    std::vector<double> out;
    for (const auto& el : *arr) {
      if (!(el.is_integer() || el.is_floating_point())) {
        bad(key, "expected an array of numbers");
        return {};
      }
      out.push_back(*el.value<double>());
    }
    return out;
  }

  std::vector<std::size_t> counts(std::string_view key,
                                  std::vector<std::size_t> fallback) {
    const auto v = find(key);
    if (!v) return fallback;
    const auto* arr = v.as_array();
    if (arr == nullptr) {
      bad(key, "expected an array of integers");
      return fallback;
    }
    std::vector<std::size_t> out;
    for (const auto& el : *arr) {
      if (!el.is_integer() || *el.value<std::int64_t>() < 0) {
        bad(key, "expected an array of non-negative integers");
        return fallback;
      }
      out.push_back(static_cast<std::size_t>(*el.value<std::int64_t>()));
    }
    return out;
  }

  void bad(std::string_view key, std::string_view msg) {
    violations_.push_back(std::string(key) + ": " + std::string(msg));
  }

 private:
  const toml::table& base_;
  const toml::table* cell_;
  std::vector<std::string>& violations_;
};

ExperimentConfig read_cell(Reader& r) {
  ExperimentConfig c;
  const auto seed = r.integer("seed", 0);
  c.output_dir = r.text("output_dir", "out");
  c.grid = r.reals("grid");
  c.partition_stats = r.flag("partition_stats", true);

  const std::string kind = r.text("dataset.kind", "synth");
  if (kind == "synth") {
    c.dataset.kind = DatasetConfig::Kind::synth;
  } else if (kind == "mnist_idx") {
    c.dataset.kind = DatasetConfig::Kind::mnist_idx;
  } else {
    r.bad("dataset.kind", "expected \"synth\" or \"mnist_idx\", got \"" + kind + "\"");
  }
  auto& s = c.dataset.synth;
  s.n = r.count("dataset.n", 6000);
  s.n_features = r.count("dataset.n_features", 32);
  s.n_classes = r.count("dataset.n_classes", 10);
  s.margin = r.real("dataset.margin", 3.0);
  s.test_fraction = r.real("dataset.test_fraction", 0.2);
  c.dataset.train_images = r.text("dataset.train_images", "");
  c.dataset.train_labels = r.text("dataset.train_labels", "");
  c.dataset.test_images = r.text("dataset.test_images", "");
  c.dataset.test_labels = r.text("dataset.test_labels", "");

  c.partition.n_clients = r.count("partition.n_clients", 100);
  c.partition.alpha = r.real("partition.alpha", 0.7);

  const std::string model = r.text("model.kind", "mlp");
  if (auto k = parse_model_kind(model)) {
    c.model_kind = *k;
  } else {
    r.bad("model.kind", "expected \"logreg\" or \"mlp\", got \"" + model + "\"");
  }
  c.hidden = r.counts("model.hidden", {128, 64});
  c.l2_reg = r.real("model.l2_reg", 0.0);

  auto& f = c.fed;
  const std::string algo = r.text("fed.algorithm", "fedcomloc");
  if (auto a = parse_algorithm(algo)) {
    f.algorithm = *a;
  } else {
    r.bad("fed.algorithm", "unknown algorithm \"" + algo + "\"");
  }
  const std::string variant = r.text("fed.variant", "com");
  if (auto v = parse_variant(variant)) {
    f.variant = *v;
  } else {
    r.bad("fed.variant", "unknown variant \"" + variant + "\"");
  }
  f.n_clients = c.partition.n_clients;
  f.sample_size = r.count("fed.sample_size", std::min<std::size_t>(10, f.n_clients));
  f.p = r.real("fed.p", 0.1);
  f.gamma = r.real("fed.gamma", 0.05);
  f.T = r.count("fed.T", 5000);
  f.batch_size = r.count("fed.batch_size", 64);
  f.tau = r.real("fed.tau", 0.01);
  const auto default_steps = static_cast<std::size_t>(
      f.p > 0.0 ? std::max(1.0, std::round(1.0 / f.p)) : 1.0);
  f.local_steps_baseline = r.count("fed.local_steps_baseline", default_steps);
  f.eval_every = r.count("fed.eval_every", 1);
  f.workers = r.count("workers", 1);
  f.seed = static_cast<std::uint64_t>(seed);

  const std::string ckind = r.text("fed.compressor.kind", "identity");
  if (auto k = parse_compressor_kind(ckind)) {
    f.compressor.kind = *k;
  } else {
    r.bad("fed.compressor.kind", "unknown compressor \"" + ckind + "\"");
  }
  f.compressor.density = r.real("fed.compressor.density", 1.0);
  const auto bits = r.integer("fed.compressor.bits", 8);
  f.compressor.bits = bits < -1000 || bits > 1000 ? -1 : int(bits);

  std::string default_name(to_string(f.algorithm));
  if (f.algorithm == Algorithm::fedcomloc) {
    default_name += "-" + std::string(to_string(f.variant));
  }
  c.name = r.text("name", default_name);
  return c;
}

}  // namespace

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> v;
  auto fail = [&v](std::string key, std::string msg) {
    v.push_back(std::move(key) + ": " + std::move(msg));
  };

  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
    fail("name", "must be a nonempty file-name-safe string");
  }
  if (c.output_dir.empty()) fail("output_dir", "must not be empty");
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    if (!(c.grid[i] > 0.0)) {
      fail("grid[" + std::to_string(i) + "]", "stepsizes must be positive");
    }
  }

  const auto& d = c.dataset;
  if (d.kind == DatasetConfig::Kind::synth) {
    if (d.synth.n_classes < 2) fail("dataset.n_classes", "must be >= 2");
    if (d.synth.n < d.synth.n_classes) fail("dataset.n", "must be >= n_classes");
    if (d.synth.n_features < 1) fail("dataset.n_features", "must be >= 1");
    if (!(d.synth.margin > 0.0)) fail("dataset.margin", "must be positive");
    if (!(d.synth.test_fraction > 0.0 && d.synth.test_fraction < 1.0)) {
      fail("dataset.test_fraction", "must lie in (0, 1)");
    } else {
      const auto n_test = static_cast<std::size_t>(
          std::floor(d.synth.test_fraction * double(d.synth.n)));
      if (n_test == 0) fail("dataset.test_fraction", "leaves an empty test split");
      if (d.synth.n - n_test < c.partition.n_clients) {
        fail("partition.n_clients", "more clients than training samples");
      }
    }
  } else {
    if (d.train_images.empty()) fail("dataset.train_images", "path required");
    if (d.train_labels.empty()) fail("dataset.train_labels", "path required");
    if (d.test_images.empty()) fail("dataset.test_images", "path required");
    if (d.test_labels.empty()) fail("dataset.test_labels", "path required");
  }

  if (c.partition.n_clients < 1) fail("partition.n_clients", "must be >= 1");
  if (!(c.partition.alpha > 0.0)) fail("partition.alpha", "must be positive");

  if (c.model_kind == ModelKind::mlp) {
    if (c.hidden.empty()) fail("model.hidden", "mlp needs hidden layer sizes");
    for (std::size_t h : c.hidden) {
      if (h == 0) fail("model.hidden", "layer sizes must be positive");
    }
  }
  if (!(c.l2_reg >= 0.0)) fail("model.l2_reg", "must be >= 0");

  const auto& f = c.fed;
  if (f.sample_size < 1) fail("fed.sample_size", "must be >= 1");
  if (f.sample_size > c.partition.n_clients) {
    fail("fed.sample_size", "exceeds partition.n_clients (" +
                                std::to_string(c.partition.n_clients) + ")");
  }
  if (!(f.p > 0.0 && f.p <= 1.0)) fail("fed.p", "must lie in (0, 1]");
  if (!(f.gamma > 0.0)) fail("fed.gamma", "must be positive");
  if (f.T < 1) fail("fed.T", "must be >= 1");
  if (!(f.tau >= 0.0)) fail("fed.tau", "must be >= 0");
  if (f.local_steps_baseline < 1) fail("fed.local_steps_baseline", "must be >= 1");
  if (f.eval_every < 1) fail("fed.eval_every", "must be >= 1");
  if (f.workers < 1) fail("workers", "must be >= 1");
  if (!(f.compressor.density > 0.0 && f.compressor.density <= 1.0)) {
    fail("fed.compressor.density", "must lie in (0, 1]");
  }
  if (f.compressor.bits < 1 || f.compressor.bits > 31) {
    fail("fed.compressor.bits", "must lie in [1, 31]");
  }
  return v;
}

ExperimentPlan parse_experiment(std::string_view toml_text,
                                std::string_view source_name) {
  ExperimentPlan plan;
  toml::table root;
  try {
    root = toml::parse(toml_text, source_name);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source_name << ":" << e.source().begin.line << ": "
        << e.description();
    plan.violations.push_back(msg.str());
    return plan;
  }

  collect_unknown(root, "", plan.violations);

  std::vector<const toml::table*> cells;
  if (const auto node = root["cells"]; node) {
    const auto* arr = node.as_array();
    if (arr == nullptr || !arr->is_array_of_tables()) {
      plan.violations.push_back("cells: expected an array of tables ([[cells]])");
      return plan;
    }
    for (const auto& el : *arr) {
      const auto* t = el.as_table();
      std::vector<std::string> unknown;
      collect_unknown(*t, "", unknown);
      for (auto& u : unknown) {
        plan.violations.push_back("cells[" + std::to_string(cells.size()) +
                                  "]." + u);
      }
      cells.push_back(t);
    }
  }
  if (cells.empty()) cells.push_back(nullptr);

  std::set<std::string> names;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::vector<std::string> problems;
    Reader reader(root, cells[i], problems);
    ExperimentConfig cell = read_cell(reader);
    for (auto& p : validate_config(cell)) problems.push_back(std::move(p));
    if (!names.insert(cell.name).second) {
      problems.push_back("name: duplicate cell name \"" + cell.name + "\"");
    }
    const std::string prefix =
        cells[i] == nullptr ? "" : "cells[" + std::to_string(i) + "] ";
    for (auto& p : problems) plan.violations.push_back(prefix + p);
    plan.cells.push_back(std::move(cell));
  }
  return plan;
}

ExperimentPlan load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment(buf.str(), path.string());
}

}  // namespace fedsim
