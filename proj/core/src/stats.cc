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

#include "envsynth/stats.h"

#include <cinttypes>
#include <cstdio>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "envsynth/util.h"

namespace envsynth {

namespace fs = std::filesystem;

std::string FormatPlotRow(const StatsSample &s) {
  return absl::StrFormat("%d,%.3f,%d,%.1f,%d,%d,%d,%d", s.unix_time,
                         s.elapsed_s, s.execs, s.execs_per_sec, s.environments,
                         s.inputs, s.crashes, s.bitmap_cells);
}

absl::StatusOr<StatsSample> ParsePlotRow(std::string_view row) {
  std::vector<std::string_view> f = Split(row, ',');
  if (f.size() != 8) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected 8 fields, got ", f.size()));
  }
  StatsSample s;
  bool ok = absl::SimpleAtoi(AbslView(f[0]), &s.unix_time) &&
            absl::SimpleAtod(AbslView(f[1]), &s.elapsed_s) &&
            absl::SimpleAtoi(AbslView(f[2]), &s.execs) &&
            absl::SimpleAtod(AbslView(f[3]), &s.execs_per_sec) &&
            absl::SimpleAtoi(AbslView(f[4]), &s.environments) &&
            absl::SimpleAtoi(AbslView(f[5]), &s.inputs) &&
            absl::SimpleAtoi(AbslView(f[6]), &s.crashes) &&
            absl::SimpleAtoi(AbslView(f[7]), &s.bitmap_cells);
  if (!ok) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad plot row '", AbslView(row), "'"));
  }
  return s;
}

const std::vector<Operator> &ReportedOperators() {
  static const std::vector<Operator> ops = {
      Operator::kFuzzResource, Operator::kSwitchResource,
      Operator::kSwitchInput, Operator::kFuzzInput};
  return ops;
}

std::string FormatOperatorsCsv(const std::map<Operator, size_t> &retained) {
  std::string out = absl::StrCat(kOperatorsHeader, "\n");
  for (Operator op : ReportedOperators()) {
    auto it = retained.find(op);
    absl::StrAppend(&out, AbslView(OperatorName(op)), ",",
                    it == retained.end() ? 0 : it->second, "\n");
  }
  return out;
}

absl::StatusOr<std::map<Operator, size_t>> ParseOperatorsCsv(
    std::string_view text) {
  std::vector<std::string_view> lines = Split(text, '\n');
  if (lines.empty() || lines[0] != kOperatorsHeader) {
    return absl::InvalidArgumentError("operators.csv: missing header");
  }
  std::map<Operator, size_t> retained;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string_view> f = Split(lines[i], ',');
    std::optional<Operator> op =
        f.size() == 2 ? ParseOperatorName(f[0]) : std::nullopt;
    size_t n = 0;
    if (!op || !absl::SimpleAtoi(AbslView(f[1]), &n)) {
      return absl::InvalidArgumentError(
          absl::StrCat("operators.csv line ", i + 1, ": bad row"));
    }
    retained[*op] = n;
  }
  return retained;
}

StatsWriter::StatsWriter(const OutputLayout &layout)
    : dir_(layout.stats_dir()) {}

absl::Status StatsWriter::Start(bool append) {
  const fs::path plot = dir_ / kPlotDataFile;
  std::error_code ec;
  if (append && fs::exists(plot, ec)) return absl::OkStatus();
  return WriteFileAtomic(plot, absl::StrCat(kPlotDataHeader, "\n"));
}

absl::Status StatsWriter::AppendSample(const StatsSample &sample) {
  return AppendLineAtomic(dir_ / kPlotDataFile,
                          absl::StrCat(FormatPlotRow(sample), "\n"));
}

absl::Status StatsWriter::WriteOperators(
    const std::map<Operator, size_t> &retained) {
  return WriteFileAtomic(dir_ / kOperatorsFile, FormatOperatorsCsv(retained));
}

absl::Status StatsWriter::WriteFuzzerStats(
    const std::vector<std::pair<std::string, std::string>> &fields) {
  std::string out;
  for (const auto &[key, value] : fields) {
    absl::StrAppend(&out, absl::StrFormat("%-20s: %s\n", key, value));
  }
  return WriteFileAtomic(dir_ / kFuzzerStatsFile, out);
}

}  // namespace envsynth
