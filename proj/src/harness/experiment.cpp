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

#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "fedsim/harness.hpp"

namespace fedsim {

namespace {

using nlohmann::ordered_json;

ordered_json compressor_json(const CompressorSpec& c) {
  return {{"kind", std::string(to_string(c.kind))},
          {"density", c.density},
          {"bits", c.bits}};
}

ordered_json dataset_json(const DatasetConfig& d) {
  if (d.kind == DatasetConfig::Kind::synth) {
    return {{"kind", "synth"},
            {"n", d.synth.n},
            {"n_features", d.synth.n_features},
            {"n_classes", d.synth.n_classes},
            {"margin", d.synth.margin},
            {"test_fraction", d.synth.test_fraction}};
  }
  return {{"kind", "mnist_idx"},
          {"train_images", d.train_images.string()},
          {"train_labels", d.train_labels.string()},
          {"test_images", d.test_images.string()},
          {"test_labels", d.test_labels.string()}};
}

// Datasets are shared by cells with identical data settings and seed.
std::string dataset_key(const ExperimentConfig& c) {
  return dataset_json(c.dataset).dump() + "#" + std::to_string(c.fed.seed);
}

}  // namespace

namespace {

// Train/test splits without a partition.
FederatedDataset load_raw(const ExperimentConfig& config) {
  FederatedDataset data;
  if (config.dataset.kind == DatasetConfig::Kind::synth) {
    RngStream rng = derive_stream(config.fed.seed, server_label("data"));
    data = synth_classification(config.dataset.synth, rng);
  } else {
    for (const auto* p :
         {&config.dataset.train_images, &config.dataset.train_labels,
          &config.dataset.test_images, &config.dataset.test_labels}) {
      if (!std::filesystem::exists(*p)) {
        throw DataError("dataset file not found: " + p->string());
      }
    }
    data.train = load_idx(config.dataset.train_images, config.dataset.train_labels);
    data.test = load_idx(config.dataset.test_images, config.dataset.test_labels);
    const std::size_t classes =
        std::max(data.train.n_classes, data.test.n_classes);
    data.train.n_classes = data.test.n_classes = classes;
    if (data.train.n_features != data.test.n_features) {
      throw DataError("train and test images have different sizes");
    }
  }
  return data;
}

void assign_partition(const ExperimentConfig& config, FederatedDataset& data) {
  RngStream prng = derive_stream(config.fed.seed, server_label("partition"));
  data.partition = dirichlet_partition(data.train.labels, config.partition, prng);
}

}  // namespace

FederatedDataset materialize_dataset(const ExperimentConfig& config) {
  FederatedDataset data = load_raw(config);
  assign_partition(config, data);
  return data;
}

ModelSpec model_spec(const ExperimentConfig& config, std::size_t n_features,
                     std::size_t n_classes) {
  if (config.model_kind == ModelKind::logreg) {
    return ModelSpec::logreg(n_features, n_classes, config.l2_reg);
  }
  return ModelSpec::mlp(n_features, config.hidden, n_classes, config.l2_reg);
}

void apply_options(ExperimentPlan& plan, const RunOptions& options) {
  for (auto& cell : plan.cells) {
    if (options.seed) cell.fed.seed = *options.seed;
    if (options.output_dir) cell.output_dir = *options.output_dir;
    if (options.workers) cell.fed.workers = *options.workers;
  }
}

std::string output_stem(const std::string& cell, double gamma) {
  return cell + "__gamma" + format_double(gamma);
}

std::string run_json(const ExperimentConfig& config, const FedConfig& fed,
                     const ModelSpec& spec, const RunRecord& record) {
  const auto& s = record.summary;
  const auto& last = record.rows.back();
  ordered_json j;
  j["cell"] = config.name;
  j["config"] = {
      {"algorithm", std::string(to_string(fed.algorithm))},
      {"variant", std::string(to_string(fed.variant))},
      {"n_clients", fed.n_clients},
      {"sample_size", fed.sample_size},
      {"p", fed.p},
      {"gamma", fed.gamma},
      {"T", fed.T},
      {"batch_size", fed.batch_size},
      {"tau", fed.tau},
      {"local_steps_baseline", fed.local_steps_baseline},
      {"eval_every", fed.eval_every},
      {"seed", fed.seed},
      {"compressor", compressor_json(fed.compressor)},
      {"model",
       {{"kind", std::string(to_string(spec.kind))},
        {"layer_sizes", spec.layer_sizes},
        {"l2_reg", spec.l2_reg}}},
      {"partition",
       {{"n_clients", config.partition.n_clients},
        {"alpha", config.partition.alpha}}},
      {"dataset", dataset_json(config.dataset)},
  };
  j["summary"] = {
      {"best_accuracy", s.best_accuracy},
      {"final_loss", s.final_loss},
      {"final_test_loss", s.final_test_loss},
      {"final_accuracy", s.final_accuracy},
      {"seed", s.seed},
      {"dimension", s.dimension},
      {"diverged", s.diverged},
      {"max_control_sum", s.max_control_sum},
      {"comm_rounds", last.comm_rounds},
      {"uplink_bits", last.uplink_bits},
      {"downlink_bits", last.downlink_bits},
      {"local_steps", last.local_steps},
      {"total_cost", last.total_cost},
  };
  return j.dump(2) + "\n";
}

bool ExperimentReport::ok() const {
  for (const auto& c : cells) {
    if (!c.ok) return false;
  }
  return true;
}

ExperimentReport run_experiment(const ExperimentPlan& input,
                                const RunOptions& options) {
  ExperimentPlan plan = input;
  apply_options(plan, options);
  if (!plan.violations.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& v : plan.violations) msg += "\n  " + v;
    throw ConfigError(msg);
  }

  ExperimentReport report;
  std::map<std::string, FederatedDataset> datasets;
  for (const auto& cell : plan.cells) {
    std::vector<double> gammas = cell.grid;
    if (gammas.empty()) gammas.push_back(cell.fed.gamma);

    const FederatedDataset* data = nullptr;
    std::string setup_error;
    try {
      std::filesystem::create_directories(cell.output_dir);
      const std::string key = dataset_key(cell);
      auto it = datasets.find(key);
      if (it == datasets.end()) it = datasets.emplace(key, load_raw(cell)).first;
      // Cells sharing raw data may still partition it differently.
      assign_partition(cell, it->second);
      data = &it->second;
      if (cell.partition_stats) {
        const auto path = cell.output_dir / (cell.name + "__partition.csv");
        auto tmp = path;
        tmp += ".tmp";
        write_partition_stats(tmp, data->partition, data->train.labels,
                              data->train.n_classes);
        std::filesystem::rename(tmp, path);
      }
    } catch (const std::exception& e) {
      setup_error = e.what();
    }

    for (double gamma : gammas) {
      CellReport rep;
      rep.name = cell.name;
      rep.gamma = gamma;
      if (!setup_error.empty()) {
        rep.error = setup_error;
        report.cells.push_back(std::move(rep));
        continue;
      }
      try {
        FedConfig fed = cell.fed;
        fed.gamma = gamma;
        const ModelSpec spec = model_spec(cell, data->train.n_features,
                                          data->train.n_classes);
        const RunResult result = run(fed, *data, spec);
        const std::string stem = output_stem(cell.name, gamma);
        rep.csv_path = cell.output_dir / (stem + ".csv");
        rep.json_path = cell.output_dir / (stem + ".json");
        write_file_atomic(rep.csv_path, to_csv(result.record));
        write_file_atomic(rep.json_path,
                          run_json(cell, fed, spec, result.record));
        rep.summary = result.record.summary;
        rep.ok = true;
        if (!options.quiet) {
          std::cerr << "[fedsim] " << stem << ": best_accuracy="
                    << format_double(rep.summary.best_accuracy)
                    << (rep.summary.diverged ? " (diverged)" : "") << "\n";
        }
      } catch (const std::exception& e) {
        rep.error = e.what();
      }
      report.cells.push_back(std::move(rep));
    }
  }
  return report;
}

std::string summary_table(const ExperimentReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %10s %14s %12s  %s\n", "cell",
                "gamma", "best_accuracy", "final_loss", "status");
  out << line;
  for (const auto& c : report.cells) {
    const char* status =
        !c.ok ? "FAILED" : (c.summary.diverged ? "diverged" : "ok");
    std::snprintf(line, sizeof line, "%-28s %10s %14.4f %12.5g  %s\n",
                  c.name.c_str(), format_double(c.gamma).c_str(),
                  c.summary.best_accuracy, c.summary.final_loss, status);
    out << line;
    if (!c.ok) out << "    " << c.error << "\n";
  }
  return out.str();
}

}  // namespace fedsim
