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

/* C interface to the fedsim federated-training simulator.
 *
 * All functions returning fedsim_status report failures through the status
 * code; fedsim_last_error() then holds a message for the calling thread.
 * Handles are opaque and must be released with the matching _free call.
 */
#ifndef FEDSIM_FEDSIM_H_
#define FEDSIM_FEDSIM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(FEDSIM_BUILDING_LIBRARY)
#define FEDSIM_API __declspec(dllexport)
#else
#define FEDSIM_API __declspec(dllimport)
#endif
#else
#define FEDSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fedsim_status {
  FEDSIM_OK = 0,
  FEDSIM_ERR_DIMENSION = 1,
  FEDSIM_ERR_PARAMETER = 2,
  FEDSIM_ERR_DATA = 3,
  FEDSIM_ERR_FORMAT = 4,
  FEDSIM_ERR_PROTOCOL = 5,
  FEDSIM_ERR_CONFIG = 6,
  FEDSIM_ERR_IO = 7,
  FEDSIM_ERR_NUMERIC = 8,
  FEDSIM_ERR_INVALID_ARGUMENT = 9,
  FEDSIM_ERR_INTERNAL = 10,
  /* run completed but at least one cell failed */
  FEDSIM_ERR_CELL_FAILED = 11
} fedsim_status;

typedef enum fedsim_compressor_kind {
  FEDSIM_COMPRESSOR_IDENTITY = 0,
  FEDSIM_COMPRESSOR_TOPK = 1,
  FEDSIM_COMPRESSOR_QUANT = 2,
  FEDSIM_COMPRESSOR_TOPK_QUANT = 3
} fedsim_compressor_kind;

typedef struct fedsim_experiment fedsim_experiment;

FEDSIM_API const char* fedsim_version(void);
FEDSIM_API const char* fedsim_last_error(void);
FEDSIM_API const char* fedsim_status_string(fedsim_status status);

/* Experiments ----------------------------------------------------------- */

/* Parses a TOML config file. Content problems do not fail the load; inspect
 * them with fedsim_experiment_violation_count/_violation. */
FEDSIM_API fedsim_status fedsim_experiment_load(const char* path,
                                                fedsim_experiment** out);
FEDSIM_API fedsim_status fedsim_experiment_parse(const char* toml_text,
                                                 fedsim_experiment** out);
FEDSIM_API void fedsim_experiment_free(fedsim_experiment* exp);

FEDSIM_API size_t fedsim_experiment_violation_count(const fedsim_experiment* exp);
FEDSIM_API const char* fedsim_experiment_violation(const fedsim_experiment* exp,
                                                   size_t index);

FEDSIM_API fedsim_status fedsim_experiment_set_seed(fedsim_experiment* exp,
                                                    uint64_t seed);
FEDSIM_API fedsim_status fedsim_experiment_set_output_dir(fedsim_experiment* exp,
                                                          const char* dir);
FEDSIM_API fedsim_status fedsim_experiment_set_workers(fedsim_experiment* exp,
                                                       size_t workers);

/* Runs every (cell, gamma) pair. Returns FEDSIM_ERR_CONFIG if violations are
 * pending, FEDSIM_ERR_CELL_FAILED if any cell failed (others still ran). */
FEDSIM_API fedsim_status fedsim_experiment_run(fedsim_experiment* exp, int quiet);

/* Results of the last run, one entry per (cell, gamma). */
FEDSIM_API size_t fedsim_experiment_result_count(const fedsim_experiment* exp);
FEDSIM_API const char* fedsim_experiment_result_name(const fedsim_experiment* exp,
                                                     size_t index);
FEDSIM_API double fedsim_experiment_result_gamma(const fedsim_experiment* exp,
                                                 size_t index);
FEDSIM_API int fedsim_experiment_result_ok(const fedsim_experiment* exp,
                                           size_t index);
FEDSIM_API double fedsim_experiment_result_best_accuracy(
    const fedsim_experiment* exp, size_t index);
FEDSIM_API double fedsim_experiment_result_final_loss(
    const fedsim_experiment* exp, size_t index);
FEDSIM_API const char* fedsim_experiment_result_error(
    const fedsim_experiment* exp, size_t index);
FEDSIM_API const char* fedsim_experiment_result_csv_path(
    const fedsim_experiment* exp, size_t index);
/* Printable summary table of the last run. */
FEDSIM_API const char* fedsim_experiment_summary(const fedsim_experiment* exp);

/* Compressors and costs ------------------------------------------------- */

/* Wire cost in bits of one compressed d-vector. */
FEDSIM_API fedsim_status fedsim_bit_cost(fedsim_compressor_kind kind,
                                         double density, int bits, size_t d,
                                         uint64_t* out_bits);

/* Applies a compressor to x[0..d) writing out[0..d). Quantizing kinds draw
 * from the stream (seed, label). */
FEDSIM_API fedsim_status fedsim_compress(fedsim_compressor_kind kind,
                                         double density, int bits,
                                         const double* x, size_t d,
                                         uint64_t seed, const char* label,
                                         double* out);

FEDSIM_API double fedsim_total_cost(uint64_t comm_rounds, uint64_t local_steps,
                                    double tau);

#ifdef __cplusplus
}
#endif

#endif /* FEDSIM_FEDSIM_H_ */
