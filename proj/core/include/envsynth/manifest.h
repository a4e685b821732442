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

// Session manifest: the only channel from the fuzzer to the runtime loaded
// into the target. Plain text, every line '\n'-terminated:
//
//   mode <capture|fuzzing>
//   count <n>
//   <id_tag>\t<canonical_path>\t<substitute_path>     (n lines)
//   block <glob>                                       (zero or more)
#ifndef ENVSYNTH_MANIFEST_H_
#define ENVSYNTH_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace envsynth {

// Environment variables understood by the runtime.
inline constexpr char kManifestEnvVar[] = "ENVSYNTH_MANIFEST";
inline constexpr char kSessionDirEnvVar[] = "ENVSYNTH_SESSION_DIR";
// AFL's coverage region convention: a SysV shared memory id.
inline constexpr char kCoverageShmEnvVar[] = "__AFL_SHM_ID";

enum class RuntimeMode { kCapture, kFuzzing };

struct Substitution {
  uint64_t id_tag = 0;
  std::string canonical_path;
  std::string substitute_path;
  friend bool operator==(const Substitution &, const Substitution &) = default;
};

struct SessionManifest {
  RuntimeMode mode = RuntimeMode::kFuzzing;
  std::filesystem::path session_dir;
  std::vector<Substitution> substitutions;
  std::vector<std::string> blocklist;
};

std::string FormatManifest(const SessionManifest &manifest);
// `session_dir` is not part of the text and is left empty.
absl::StatusOr<SessionManifest> ParseManifest(std::string_view text);

// Files the executor and runtime share inside a session directory.
struct SessionPaths {
  std::filesystem::path dir;

  std::filesystem::path manifest() const { return dir / "manifest"; }
  std::filesystem::path staged_dir() const { return dir / "staged"; }
  std::filesystem::path captured_dir() const { return dir / "captured"; }
  std::filesystem::path scratch_dir() const { return dir / "scratch"; }
  std::filesystem::path access_log() const { return dir / "access.log"; }
  std::filesystem::path input() const { return dir / "input"; }
};

// Access log line written in capture mode. A captured path of "-" marks a
// failed copy.
std::string FormatAccessLogLine(uint64_t id_tag, std::string_view canonical_path,
                                std::string_view captured_path);
inline constexpr char kCaptureFailedMarker[] = "-";

}  // namespace envsynth

#endif  // ENVSYNTH_MANIFEST_H_
