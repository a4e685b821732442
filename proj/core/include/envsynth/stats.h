// Copyright 2026 The Envsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Campaign statistics files under <root>/stats:
//
//   plot_data.csv   one row per status tick, append-only
//   operators.csv   retained environments per operator, rewritten in place
//   fuzzer_stats    "key : value" summary, rewritten in place
#ifndef ENVSYNTH_STATS_H_
#define ENVSYNTH_STATS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "envsynth/corpus.h"
#include "envsynth/corpus_store.h"

namespace envsynth {

inline constexpr char kPlotDataFile[] = "plot_data.csv";
inline constexpr char kOperatorsFile[] = "operators.csv";
inline constexpr char kFuzzerStatsFile[] = "fuzzer_stats";

inline constexpr char kPlotDataHeader[] =
    "unix_time,elapsed_s,execs,execs_per_sec,environments,inputs,crashes,"
    "bitmap_cells";
inline constexpr char kOperatorsHeader[] = "operator,retained";

struct StatsSample {
  int64_t unix_time = 0;
  double elapsed_s = 0;
  uint64_t execs = 0;
  // Over the interval since the previous sample.
  double execs_per_sec = 0;
  size_t environments = 0;
  size_t inputs = 0;
  size_t crashes = 0;
  size_t bitmap_cells = 0;
};

std::string FormatPlotRow(const StatsSample &sample);
absl::StatusOr<StatsSample> ParsePlotRow(std::string_view row);

// Operators listed in operators.csv, in order.
const std::vector<Operator> &ReportedOperators();
std::string FormatOperatorsCsv(const std::map<Operator, size_t> &retained);
absl::StatusOr<std::map<Operator, size_t>> ParseOperatorsCsv(
    std::string_view text);

class StatsWriter {
 public:
  explicit StatsWriter(const OutputLayout &layout);

  // Creates plot_data.csv with its header unless `append` and it exists.
  absl::Status Start(bool append);
  absl::Status AppendSample(const StatsSample &sample);
  absl::Status WriteOperators(const std::map<Operator, size_t> &retained);
  absl::Status WriteFuzzerStats(
      const std::vector<std::pair<std::string, std::string>> &fields);

 private:
  std::filesystem::path dir_;
};

}  // namespace envsynth

#endif  // ENVSYNTH_STATS_H_
