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
#include <filesystem>
#include <string>
#include <vector>

namespace fedsim {

/// Cost in "communication-round units": rounds have unit cost, each local
/// training round costs tau.
double total_cost(std::uint64_t comm_rounds, std::uint64_t local_steps,
                  double tau);

/// Running counters for one run. Bits only grow on communication rounds.
class BitLedger {
 public:
  void add_communication(std::uint64_t uplink_bits,
                         std::uint64_t downlink_bits);
  void add_local_steps(std::uint64_t steps);

  std::uint64_t uplink_bits() const noexcept { return uplink_bits_; }
  std::uint64_t downlink_bits() const noexcept { return downlink_bits_; }
  std::uint64_t comm_rounds() const noexcept { return comm_rounds_; }
  std::uint64_t local_steps() const noexcept { return local_steps_; }

 private:
  std::uint64_t uplink_bits_ = 0;
  std::uint64_t downlink_bits_ = 0;
  std::uint64_t comm_rounds_ = 0;
  std::uint64_t local_steps_ = 0;
};

struct RecordRow {
  std::uint64_t t = 0;
  std::uint64_t comm_rounds = 0;
  std::uint64_t uplink_bits = 0;
  std::uint64_t downlink_bits = 0;
  std::uint64_t local_steps = 0;
  double total_cost = 0.0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double test_accuracy = 0.0;

  friend bool operator==(const RecordRow&, const RecordRow&) = default;
};

struct RunSummary {
  double best_accuracy = 0.0;
  double final_loss = 0.0;
  double final_test_loss = 0.0;
  double final_accuracy = 0.0;
  std::uint64_t seed = 0;
  std::size_t dimension = 0;
  bool diverged = false;
  /// Largest |sum_i h_i|_inf seen over the run (FedComLoc only).
  double max_control_sum = 0.0;
};

struct RunRecord {
  std::vector<RecordRow> rows;
  RunSummary summary;
};

/// Appends a row snapshotting the ledger. t counts completed iterations and
/// must strictly increase; otherwise throws ProtocolError.
void record_eval(RunRecord& record, const BitLedger& ledger, double tau,
                 std::uint64_t t, double train_loss, double test_loss,
                 double test_accuracy);

/// Fills best/final fields of the summary from the rows.
void finalize_summary(RunRecord& record);

inline constexpr const char* kRunCsvHeader =
    "t,comm_rounds,uplink_bits,downlink_bits,local_steps,total_cost,"
    "train_loss,test_loss,test_accuracy";

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

std::string to_csv(const RunRecord& record);

/// Writes `content` to a sibling temp file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace fedsim
