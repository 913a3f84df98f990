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

#include "fedsim/fedsim.h"

#include <cmath>
#include <exception>
#include <algorithm>
#include <memory>
#include <new>
#include <string>

#include "fedsim/compressors.hpp"
#include "fedsim/harness.hpp"
#include "fedsim/metrics.hpp"

struct fedsim_experiment {
  fedsim::ExperimentPlan plan;
  fedsim::RunOptions options;
  fedsim::ExperimentReport report;
  std::vector<std::string> csv_paths;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

fedsim_status set_error(fedsim_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

fedsim_status status_of(fedsim::ErrorKind kind) {
  using fedsim::ErrorKind;
  switch (kind) {
    case ErrorKind::dimension: return FEDSIM_ERR_DIMENSION;
    case ErrorKind::parameter: return FEDSIM_ERR_PARAMETER;
    case ErrorKind::data: return FEDSIM_ERR_DATA;
    case ErrorKind::format: return FEDSIM_ERR_FORMAT;
    case ErrorKind::protocol: return FEDSIM_ERR_PROTOCOL;
    case ErrorKind::config: return FEDSIM_ERR_CONFIG;
    case ErrorKind::io: return FEDSIM_ERR_IO;
    case ErrorKind::numeric: return FEDSIM_ERR_NUMERIC;
  }
  return FEDSIM_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
fedsim_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const fedsim::Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(FEDSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(FEDSIM_ERR_INTERNAL, e.what());
  }
}

bool in_range(const fedsim_experiment* exp, size_t index) {
  return exp != nullptr && index < exp->report.cells.size();
}

fedsim::CompressorSpec make_spec(fedsim_compressor_kind kind, double density,
                                 int bits) {
  fedsim::CompressorSpec spec;
  switch (kind) {
    case FEDSIM_COMPRESSOR_IDENTITY: spec.kind = fedsim::CompressorKind::identity; break;
    case FEDSIM_COMPRESSOR_TOPK: spec.kind = fedsim::CompressorKind::topk; break;
    case FEDSIM_COMPRESSOR_QUANT: spec.kind = fedsim::CompressorKind::quant; break;
    case FEDSIM_COMPRESSOR_TOPK_QUANT: spec.kind = fedsim::CompressorKind::topk_quant; break;
    default: throw fedsim::ParameterError("unknown compressor kind");
  }
  spec.density = density;
  spec.bits = bits;
  spec.validate();
  return spec;
}

}  // namespace

extern "C" {

const char* fedsim_version(void) { return "0.1.0"; }

const char* fedsim_last_error(void) { return g_last_error.c_str(); }

const char* fedsim_status_string(fedsim_status status) {
  switch (status) {
    case FEDSIM_OK: return "ok";
    case FEDSIM_ERR_DIMENSION: return "dimension error";
    case FEDSIM_ERR_PARAMETER: return "parameter error";
    case FEDSIM_ERR_DATA: return "data error";
    case FEDSIM_ERR_FORMAT: return "format error";
    case FEDSIM_ERR_PROTOCOL: return "protocol error";
    case FEDSIM_ERR_CONFIG: return "config error";
    case FEDSIM_ERR_IO: return "io error";
    case FEDSIM_ERR_NUMERIC: return "numeric error";
    case FEDSIM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FEDSIM_ERR_INTERNAL: return "internal error";
    case FEDSIM_ERR_CELL_FAILED: return "one or more cells failed";
  }
  return "unknown status";
}

fedsim_status fedsim_experiment_load(const char* path, fedsim_experiment** out) {
  if (path == nullptr || out == nullptr) {
    return set_error(FEDSIM_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    auto exp = std::make_unique<fedsim_experiment>();
    exp->plan = fedsim::load_experiment(path);
    *out = exp.release();
    return FEDSIM_OK;
  });
}

fedsim_status fedsim_experiment_parse(const char* toml_text,
                                      fedsim_experiment** out) {
  if (toml_text == nullptr || out == nullptr) {
    return set_error(FEDSIM_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    auto exp = std::make_unique<fedsim_experiment>();
    exp->plan = fedsim::parse_experiment(toml_text);
    *out = exp.release();
    return FEDSIM_OK;
  });
}

void fedsim_experiment_free(fedsim_experiment* exp) { delete exp; }

size_t fedsim_experiment_violation_count(const fedsim_experiment* exp) {
  return exp == nullptr ? 0 : exp->plan.violations.size();
}

const char* fedsim_experiment_violation(const fedsim_experiment* exp,
                                        size_t index) {
  if (exp == nullptr || index >= exp->plan.violations.size()) return nullptr;
  return exp->plan.violations[index].c_str();
}

fedsim_status fedsim_experiment_set_seed(fedsim_experiment* exp, uint64_t seed) {
  if (exp == nullptr) return set_error(FEDSIM_ERR_INVALID_ARGUMENT, "null handle");
  exp->options.seed = seed;
  return FEDSIM_OK;
}

fedsim_status fedsim_experiment_set_output_dir(fedsim_experiment* exp,
                                               const char* dir) {
  if (exp == nullptr || dir == nullptr || *dir == '\0') {
    return set_error(FEDSIM_ERR_INVALID_ARGUMENT, "null handle or empty dir");
  }
  exp->options.output_dir = dir;
  return FEDSIM_OK;
}

fedsim_status fedsim_experiment_set_workers(fedsim_experiment* exp,
                                            size_t workers) {
  if (exp == nullptr || workers == 0) {
    return set_error(FEDSIM_ERR_INVALID_ARGUMENT, "workers must be >= 1");
  }
  exp->options.workers = workers;
  return FEDSIM_OK;
}

fedsim_status fedsim_experiment_run(fedsim_experiment* exp, int quiet) {
  if (exp == nullptr) return set_error(FEDSIM_ERR_INVALID_ARGUMENT, "null handle");
  return guarded([&] {
    exp->options.quiet = quiet != 0;
    exp->report = fedsim::run_experiment(exp->plan, exp->options);
    exp->csv_paths.clear();
    for (const auto& c : exp->report.cells) {
      exp->csv_paths.push_back(c.csv_path.string());
    }
    exp->summary = fedsim::summary_table(exp->report);
    if (!exp->report.ok()) {
      std::string msg = "failed cells:";
      for (const auto& c : exp->report.cells) {
        if (!c.ok) msg += " " + fedsim::output_stem(c.name, c.gamma) + " (" + c.error + ")";
      }
      return set_error(FEDSIM_ERR_CELL_FAILED, msg);
    }
    return FEDSIM_OK;
  });
}

size_t fedsim_experiment_result_count(const fedsim_experiment* exp) {
  return exp == nullptr ? 0 : exp->report.cells.size();
}

const char* fedsim_experiment_result_name(const fedsim_experiment* exp,
                                          size_t index) {
  return in_range(exp, index) ? exp->report.cells[index].name.c_str() : nullptr;
}

double fedsim_experiment_result_gamma(const fedsim_experiment* exp, size_t index) {
  return in_range(exp, index) ? exp->report.cells[index].gamma : 0.0;
}

int fedsim_experiment_result_ok(const fedsim_experiment* exp, size_t index) {
  return in_range(exp, index) && exp->report.cells[index].ok ? 1 : 0;
}

double fedsim_experiment_result_best_accuracy(const fedsim_experiment* exp,
                                              size_t index) {
  return in_range(exp, index) ? exp->report.cells[index].summary.best_accuracy
                              : 0.0;
}

double fedsim_experiment_result_final_loss(const fedsim_experiment* exp,
                                           size_t index) {
  return in_range(exp, index) ? exp->report.cells[index].summary.final_loss : 0.0;
}

const char* fedsim_experiment_result_error(const fedsim_experiment* exp,
                                           size_t index) {
  return in_range(exp, index) ? exp->report.cells[index].error.c_str() : nullptr;
}

const char* fedsim_experiment_result_csv_path(const fedsim_experiment* exp,
                                              size_t index) {
  return in_range(exp, index) ? exp->csv_paths[index].c_str() : nullptr;
}

const char* fedsim_experiment_summary(const fedsim_experiment* exp) {
  return exp == nullptr ? "" : exp->summary.c_str();
}

fedsim_status fedsim_bit_cost(fedsim_compressor_kind kind, double density,
                              int bits, size_t d, uint64_t* out_bits) {
  if (out_bits == nullptr || d == 0) {
    return set_error(FEDSIM_ERR_INVALID_ARGUMENT, "null output or d == 0");
  }
  return guarded([&] {
    *out_bits = fedsim::bit_cost(make_spec(kind, density, bits), d);
    return FEDSIM_OK;
  });
}

fedsim_status fedsim_compress(fedsim_compressor_kind kind, double density,
                              int bits, const double* x, size_t d,
                              uint64_t seed, const char* label, double* out) {
  if (x == nullptr || out == nullptr || d == 0) {
    return set_error(FEDSIM_ERR_INVALID_ARGUMENT, "null buffer or d == 0");
  }
  return guarded([&] {
    const auto spec = make_spec(kind, density, bits);
    fedsim::RngStream rng =
        fedsim::derive_stream(seed, label == nullptr ? "compress/server" : label);
    const fedsim::ParamVector in(std::vector<double>(x, x + d));
    const auto result = fedsim::compress(spec, in, rng);
    std::copy(result.begin(), result.end(), out);
    return FEDSIM_OK;
  });
}

double fedsim_total_cost(uint64_t comm_rounds, uint64_t local_steps, double tau) {
  if (!(tau >= 0.0)) return std::nan("");
  return fedsim::total_cost(comm_rounds, local_steps, tau);
}

}  // extern "C"
