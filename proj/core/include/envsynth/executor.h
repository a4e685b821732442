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

#ifndef ENVSYNTH_EXECUTOR_H_
#define ENVSYNTH_EXECUTOR_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "envsynth/corpus.h"
#include "envsynth/defs.h"
#include "envsynth/execution.h"
#include "envsynth/manifest.h"

namespace envsynth {

// Runs the target once under a staged manifest. Implementations: the
// process adapter (real binary + preloaded runtime) and the simulated
// adapter (in-process deterministic target).
class TargetAdapter {
 public:
  virtual ~TargetAdapter() = default;

  // The manifest file at SessionPaths{manifest.session_dir}.manifest() has
  // been written. Must not populate `accessed`; CaptureRun reads the access
  // log.
  virtual ExecutionOutcome Run(const SessionManifest &manifest, ByteSpan input,
                               Duration timeout) = 0;
  virtual std::string Describe() const = 0;
};

// Materializes every resource copy as a fresh file under
// <session_dir>/staged, clears scratch writes of the previous execution and
// writes the fuzzing-mode manifest.
absl::StatusOr<SessionManifest> StageEnvironment(
    const ResolvedEnvironment &env, const std::filesystem::path &session_dir,
    const std::vector<std::string> &blocklist = {});

ExecutionOutcome RunTarget(TargetAdapter &adapter,
                           const SessionManifest &manifest, ByteSpan input,
                           Duration timeout);

// Executes `input` in capture mode. `accessed` lists each distinct,
// non-blocklisted resource in first-access order with its captured copy.
ExecutionOutcome CaptureRun(TargetAdapter &adapter, ByteSpan input,
                            const std::filesystem::path &session_dir,
                            const std::vector<std::string> &blocklist,
                            Duration timeout);

// Bytes of host files before a campaign; nullopt for absent files.
struct HostSnapshot {
  std::map<std::filesystem::path, std::optional<ByteArray>> files;
};
HostSnapshot TakeSnapshot(const std::vector<std::filesystem::path> &files);
// True iff every snapshotted file outside `session_dir` is unchanged.
bool RestoreCheck(const HostSnapshot &snapshot,
                  const std::filesystem::path &session_dir);

struct ExecutorOptions {
  std::filesystem::path session_dir;
  Duration timeout = std::chrono::seconds(1);
  std::vector<std::string> blocklist;
};

// One execution in flight at a time; owns its session directory.
class Executor {
 public:
  Executor(TargetAdapter &adapter, ExecutorOptions options);

  // Stage + run in fuzzing mode. Staging failures become kSetupError.
  ExecutionOutcome Execute(const ResolvedEnvironment &env);
  ExecutionOutcome Capture(ByteSpan input);

  const ExecutorOptions &options() const { return options_; }
  TargetAdapter &adapter() { return adapter_; }
  size_t executions() const { return executions_; }

 private:
  TargetAdapter &adapter_;
  ExecutorOptions options_;
  size_t executions_ = 0;
};

}  // namespace envsynth

#endif  // ENVSYNTH_EXECUTOR_H_
