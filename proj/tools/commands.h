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

// The envsynth subcommands, callable without the argument parser.
#ifndef ENVSYNTH_TOOLS_COMMANDS_H_
#define ENVSYNTH_TOOLS_COMMANDS_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "envsynth/executor.h"
#include "envsynth/fixtures.h"

namespace envsynth::cli {

// Exit codes shared by the subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitHang = 124;
// A crash with signal s exits with kExitSignalBase + s.
inline constexpr int kExitSignalBase = 128;

inline constexpr char kSimulatedPrefix[] = "sim:";

struct TargetOptions {
  // "sim:<fixture>" or a command line; "@@" stands for the input file.
  std::string target;
  // Root directory of a simulated fixture's files.
  std::filesystem::path sim_root;
  std::optional<std::filesystem::path> interposer;
  bool forward_output = false;
};

struct Target {
  std::unique_ptr<TargetAdapter> adapter;
  // Set for simulated targets.
  std::shared_ptr<const fixtures::FixtureTarget> fixture;
};

// Builds the adapter. Simulated fixtures get their original files written
// under sim_root if missing.
absl::StatusOr<Target> MakeTarget(const TargetOptions &options);

struct FuzzOptions {
  TargetOptions target;
  std::optional<std::filesystem::path> in_dir;
  std::filesystem::path out_dir;
  // Seconds; nullopt runs until interrupted.
  std::optional<double> time_s;
  double exec_timeout_s = 1.0;
  std::optional<std::filesystem::path> sync_dir;
  double sync_interval_s = 1.0;
  std::vector<std::string> block;
  std::string weights = "0.8,0.1,0.1";
  size_t energy_base = 32;
  size_t energy_cap = 512;
  uint64_t seed = 0;
  std::optional<uint64_t> max_execs;
  bool resume = false;
  bool input_only = false;
  std::filesystem::path session_dir;
  bool quiet = false;
};

int CmdFuzz(const FuzzOptions &options, std::ostream &out, std::ostream &err,
            const std::atomic<bool> *abort);

struct ReplayOptions {
  TargetOptions target;
  std::filesystem::path env_file;
  // Campaign root; found by walking up from env_file when empty.
  std::filesystem::path root;
  double exec_timeout_s = 1.0;
};

int CmdReplay(const ReplayOptions &options, std::ostream &out,
              std::ostream &err);
int CmdTriage(const ReplayOptions &options, std::ostream &out,
              std::ostream &err);

struct StatsOptions {
  std::vector<std::filesystem::path> dirs;
  // Writes operators.csv, execs_per_sec.csv and coverage.csv here instead
  // of printing them.
  std::optional<std::filesystem::path> csv_dir;
};

int CmdStats(const StatsOptions &options, std::ostream &out,
             std::ostream &err);

// Writes a fixture's original files under `root` and its seed inputs into
// `seeds_dir` (if given).
int CmdFixtures(const std::string &name, const std::filesystem::path &root,
                const std::optional<std::filesystem::path> &seeds_dir,
                std::ostream &out, std::ostream &err);

// Directory containing system-level-seeds above `file`, if any.
std::optional<std::filesystem::path> FindCampaignRoot(
    const std::filesystem::path &file);

}  // namespace envsynth::cli

#endif  // ENVSYNTH_TOOLS_COMMANDS_H_
