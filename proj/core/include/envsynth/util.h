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

#ifndef ENVSYNTH_UTIL_H_
#define ENVSYNTH_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "envsynth/defs.h"

namespace envsynth {

// 64-bit FNV-1a. Stable across processes and builds, which is what on-disk
// identifiers need.
uint64_t Fnv1a64(std::string_view data);
uint64_t Fnv1a64(ByteSpan data);

absl::StatusOr<ByteArray> ReadFileBytes(const std::filesystem::path &path);

// Plain overwrite. Used for per-execution staging where no reader can observe
// a partial file.
absl::Status WriteFileBytes(const std::filesystem::path &path, ByteSpan data);

// Writes to a sibling temp file and renames it into place, so concurrent
// readers see either the old or the new content.
absl::Status WriteFileAtomic(const std::filesystem::path &path,
                             ByteSpan data);
absl::Status WriteFileAtomic(const std::filesystem::path &path,
                             std::string_view text);

// Appends `line` (which must end in '\n') with a single write(2) call.
absl::Status AppendLineAtomic(const std::filesystem::path &path,
                              std::string_view line);

// Shell-style glob match (fnmatch(3) without FNM_PATHNAME, so `*` also
// matches '/').
bool GlobMatch(std::string_view pattern, std::string_view path);
bool MatchesAnyGlob(const std::vector<std::string> &patterns,
                    std::string_view path);

// Removes every entry inside `dir` but keeps the directory itself.
absl::Status ClearDirectory(const std::filesystem::path &dir);

// Regular, non-hidden files directly inside `dir`, sorted by name.
std::vector<std::filesystem::path> ListFilesSorted(
    const std::filesystem::path &dir);

std::string ZeroPad(uint64_t value, int width);

// The installed absl has its own string_view type rather than an alias of
// std::string_view.
inline absl::string_view AbslView(std::string_view s) {
  return {s.data(), s.size()};
}
inline std::string_view StdView(absl::string_view s) {
  return {s.data(), s.size()};
}
// absl::StrSplit with std::string_view pieces. Keeps empty pieces.
std::vector<std::string_view> Split(std::string_view text, char sep);
// The pieces would dangle.
std::vector<std::string_view> Split(std::string &&text, char sep) = delete;

}  // namespace envsynth

#endif  // ENVSYNTH_UTIL_H_
