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

#include "fedsim/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fedsim/error.hpp"

namespace fedsim {

double total_cost(std::uint64_t comm_rounds, std::uint64_t local_steps,
                  double tau) {
  if (!(tau >= 0.0)) throw ParameterError("total_cost: tau must be >= 0");
  return double(comm_rounds) + double(local_steps) * tau;
}

void BitLedger::add_communication(std::uint64_t uplink_bits,
                                  std::uint64_t downlink_bits) {
  uplink_bits_ += uplink_bits;
  downlink_bits_ += downlink_bits;
  ++comm_rounds_;
}

void BitLedger::add_local_steps(std::uint64_t steps) { local_steps_ += steps; }

void record_eval(RunRecord& record, const BitLedger& ledger, double tau,
                 std::uint64_t t, double train_loss, double test_loss,
                 double test_accuracy) {
  if (!record.rows.empty() && t <= record.rows.back().t) {
    throw ProtocolError("record_eval: t=" + std::to_string(t) +
                        " does not follow t=" +
                        std::to_string(record.rows.back().t));
  }
  RecordRow row;
  row.t = t;
  row.comm_rounds = ledger.comm_rounds();
  row.uplink_bits = ledger.uplink_bits();
  row.downlink_bits = ledger.downlink_bits();
  row.local_steps = ledger.local_steps();
  row.total_cost = total_cost(row.comm_rounds, row.local_steps, tau);
  row.train_loss = train_loss;
  row.test_loss = test_loss;
  row.test_accuracy = test_accuracy;
  record.rows.push_back(row);
}

void finalize_summary(RunRecord& record) {
  auto& s = record.summary;
  if (record.rows.empty()) return;
  s.best_accuracy = 0.0;
  for (const auto& row : record.rows) {
    s.best_accuracy = std::max(s.best_accuracy, row.test_accuracy);
  }
  s.final_loss = record.rows.back().train_loss;
  s.final_test_loss = record.rows.back().test_loss;
  s.final_accuracy = record.rows.back().test_accuracy;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const RunRecord& record) {
  std::ostringstream out;
  out << kRunCsvHeader << '\n';
  for (const auto& r : record.rows) {
    out << r.t << ',' << r.comm_rounds << ',' << r.uplink_bits << ','
        << r.downlink_bits << ',' << r.local_steps << ','
        << format_double(r.total_cost) << ',' << format_double(r.train_loss)
        << ',' << format_double(r.test_loss) << ','
        << format_double(r.test_accuracy) << '\n';
  }
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw IoError("cannot rename " + tmp.string() + " -> " + path.string() +
                  ": " + ec.message());
  }
}

}  // namespace fedsim
