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

#include "envsynth/executor.h"

#include <set>
#include <system_error>
#include <utility>

#include "absl/strings/str_cat.h"
#include "envsynth/util.h"
#include "glog/logging.h"

namespace envsynth {

namespace fs = std::filesystem;

namespace {

absl::Status EnsureDir(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::InternalError(
        absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
  }
  return absl::OkStatus();
}

// Prepares a session directory for the next execution: the scratch copies
// and access log of the previous one are discarded.
absl::Status ResetSession(const SessionPaths &paths, bool clear_captured) {
  for (const fs::path &dir :
       {paths.staged_dir(), paths.scratch_dir(), paths.captured_dir()}) {
    if (absl::Status s = EnsureDir(dir); !s.ok()) return s;
  }
  std::error_code ec;
  if (!fs::is_empty(paths.scratch_dir(), ec)) {
    if (absl::Status s = ClearDirectory(paths.scratch_dir()); !s.ok()) return s;
  }
  if (clear_captured && !fs::is_empty(paths.captured_dir(), ec)) {
    if (absl::Status s = ClearDirectory(paths.captured_dir()); !s.ok()) return s;
  }
  fs::remove(paths.access_log(), ec);
  return absl::OkStatus();
}

ExecutionOutcome SetupError(std::string diagnostic) {
  ExecutionOutcome outcome;
  outcome.status = ExecutionStatus::kSetupError;
  outcome.diagnostic = std::move(diagnostic);
  return outcome;
}

}  // namespace

absl::StatusOr<SessionManifest> StageEnvironment(
    const ResolvedEnvironment &env, const fs::path &session_dir,
    const std::vector<std::string> &blocklist) {
  const SessionPaths paths{session_dir};
  if (absl::Status s = ResetSession(paths, /*clear_captured=*/false); !s.ok()) {
    return s;
  }
  SessionManifest manifest;
  manifest.mode = RuntimeMode::kFuzzing;
  manifest.session_dir = session_dir;
  manifest.blocklist = blocklist;
  std::set<std::string> names;
  for (const auto &[id, content] : env.resources) {
    std::string name = id.id_tag_hex();
    while (!names.insert(name).second) name += "+";  // id_tag collision
    const fs::path staged = paths.staged_dir() / name;
    if (absl::Status s = WriteFileBytes(staged, *content); !s.ok()) return s;
    manifest.substitutions.push_back(
        {id.id_tag(), id.canonical_path(), staged.string()});
  }
  if (absl::Status s = WriteFileBytes(paths.manifest(),
                                      AsBytes(FormatManifest(manifest)));
      !s.ok()) {
    return s;
  }
  return manifest;
}

ExecutionOutcome RunTarget(TargetAdapter &adapter,
                           const SessionManifest &manifest, ByteSpan input,
                           Duration timeout) {
  ExecutionOutcome outcome = adapter.Run(manifest, input, timeout);
  outcome.accessed.clear();
  return outcome;
}

ExecutionOutcome CaptureRun(TargetAdapter &adapter, ByteSpan input,
                            const fs::path &session_dir,
                            const std::vector<std::string> &blocklist,
                            Duration timeout) {
  const SessionPaths paths{session_dir};
  if (absl::Status s = ResetSession(paths, /*clear_captured=*/true); !s.ok()) {
    return SetupError(std::string(s.message()));
  }
  SessionManifest manifest;
  manifest.mode = RuntimeMode::kCapture;
  manifest.session_dir = session_dir;
  manifest.blocklist = blocklist;
  if (absl::Status s = WriteFileBytes(paths.manifest(),
                                      AsBytes(FormatManifest(manifest)));
      !s.ok()) {
    return SetupError(std::string(s.message()));
  }

  ExecutionOutcome outcome = adapter.Run(manifest, input, timeout);
  outcome.accessed.clear();
  if (outcome.status == ExecutionStatus::kSetupError) return outcome;

  absl::StatusOr<ByteArray> log = ReadFileBytes(paths.access_log());
  if (!log.ok()) return outcome;  // nothing accessed
  std::set<ResourceId> seen;
  const std::string text = AsString(*log);
  for (std::string_view line : Split(text, '\n')) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields = Split(line, '\t');
    if (fields.size() != 3 || fields[1].empty()) {
      LOG(WARNING) << "malformed access log line: " << line;
      continue;
    }
    if (fields[2] == kCaptureFailedMarker) {
      LOG(WARNING) << "runtime failed to capture " << fields[1];
      continue;
    }
    ResourceId id = ResourceId::FromCanonicalPath(std::string(fields[1]));
    if (MatchesAnyGlob(blocklist, id.canonical_path())) continue;
    if (!seen.insert(id).second) continue;
    std::error_code ec;
    fs::path copy(fields[2]);
    if (!fs::is_regular_file(copy, ec)) {
      LOG(WARNING) << "captured copy missing: " << copy;
      continue;
    }
    outcome.accessed.push_back({std::move(id), std::move(copy)});
  }
  return outcome;
}

HostSnapshot TakeSnapshot(const std::vector<fs::path> &files) {
  HostSnapshot snapshot;
  for (const fs::path &file : files) {
    absl::StatusOr<ByteArray> bytes = ReadFileBytes(file);
    snapshot.files[file] =
        bytes.ok() ? std::optional<ByteArray>(std::move(*bytes)) : std::nullopt;
  }
  return snapshot;
}

bool RestoreCheck(const HostSnapshot &snapshot, const fs::path &session_dir) {
  const fs::path session = session_dir.lexically_normal();
  for (const auto &[file, before] : snapshot.files) {
    fs::path rel = file.lexically_normal().lexically_relative(session);
    if (!rel.empty() && *rel.begin() != "..") continue;  // inside the session
    absl::StatusOr<ByteArray> now = ReadFileBytes(file);
    if (before.has_value() != now.ok()) return false;
    if (before.has_value() && *before != *now) return false;
  }
  return true;
}

Executor::Executor(TargetAdapter &adapter, ExecutorOptions options)
    : adapter_(adapter), options_(std::move(options)) {
  CHECK(!options_.session_dir.empty()) << "executor needs a session directory";
}

ExecutionOutcome Executor::Execute(const ResolvedEnvironment &env) {
  ++executions_;
  absl::StatusOr<SessionManifest> manifest =
      StageEnvironment(env, options_.session_dir, options_.blocklist);
  if (!manifest.ok()) return SetupError(std::string(manifest.status().message()));
  return RunTarget(adapter_, *manifest, *env.input, options_.timeout);
}

ExecutionOutcome Executor::Capture(ByteSpan input) {
  ++executions_;
  return CaptureRun(adapter_, input, options_.session_dir, options_.blocklist,
                    options_.timeout);
}

}  // namespace envsynth
