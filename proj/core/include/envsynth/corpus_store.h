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

// On-disk campaign layout:
//
//   <root>/replayable-queue/            input seeds, one file each
//   <root>/Resources/<id_tag>/<n>       copy n of a resource (0 = captured)
//   <root>/Resources/<id_tag>/.path     canonical path of that resource
//   <root>/system-level-seeds/          environment files
//   <root>/system-level-seeds/crashes/  crashing environment files
//   <root>/stats/                       plot data and counters
//
// Environment file format (bit-exact, '\n' line endings, final newline):
//
//   <m>                         decimal resource count
//   <id_tag> <resource-path>    m lines, ascending id_tag, one space
//   <input-path>
//
// Paths are relative to <root> when they live under it.
#ifndef ENVSYNTH_CORPUS_STORE_H_
#define ENVSYNTH_CORPUS_STORE_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "envsynth/corpus.h"

namespace envsynth {

class OutputLayout {
 public:
  explicit OutputLayout(std::filesystem::path root);

  // Creates every fixed directory.
  absl::Status Initialize() const;

  const std::filesystem::path &root() const { return root_; }
  std::filesystem::path input_dir() const { return root_ / "replayable-queue"; }
  std::filesystem::path resources_dir() const { return root_ / "Resources"; }
  std::filesystem::path environment_dir() const {
    return root_ / "system-level-seeds";
  }
  std::filesystem::path crash_dir() const {
    return environment_dir() / "crashes";
  }
  std::filesystem::path stats_dir() const { return root_ / "stats"; }
  std::filesystem::path default_session_dir() const {
    return root_ / ".session";
  }

  std::filesystem::path resource_dir(const ResourceId &id) const;
  std::filesystem::path resource_copy_path(const ResourceId &id,
                                           size_t seed_index) const;
  std::filesystem::path input_path(const InputSeed &seed) const;
  std::filesystem::path environment_path(const EnvironmentSeed &env) const;
  std::filesystem::path crash_path(const CrashRecord &crash) const;

  // Relative to root when `path` is under it, absolute otherwise.
  std::string Reference(const std::filesystem::path &path) const;
  std::filesystem::path Resolve(std::string_view reference) const;

 private:
  std::filesystem::path root_;
};

std::string InputFileName(const InputSeed &seed);
// File-name-safe form of an input's source name, as stored in its file name.
std::string SanitizeSourceName(std::string_view name);
std::string EnvironmentFileName(const EnvironmentSeed &env);
std::string CrashFileName(const CrashRecord &crash);

// Fields recovered from an environment or crash file name.
struct EnvironmentFileInfo {
  size_t id = 0;
  std::optional<size_t> source;
  Operator op = Operator::kCapture;
  int signal = 0;
  uint64_t coverage_hash = 0;
};
std::optional<EnvironmentFileInfo> ParseEnvironmentFileName(
    std::string_view name);

absl::StatusOr<std::filesystem::path> PersistInput(const OutputLayout &layout,
                                                   const InputSeed &seed);

// Writes Resources/<id_tag>/<seed_index> (and the .path record).
absl::StatusOr<std::filesystem::path> PersistResourceCopy(
    const OutputLayout &layout, const ResourceCopy &copy);

// Serialized environment file body. Fails if a referenced seed is not
// persisted.
absl::StatusOr<std::string> FormatEnvironmentSeed(const OutputLayout &layout,
                                                  const CorpusSet &corpora,
                                                  const EnvironmentSeed &env);

absl::StatusOr<std::filesystem::path> WriteEnvironmentSeed(
    const OutputLayout &layout, const CorpusSet &corpora,
    const EnvironmentSeed &env, const std::filesystem::path &dest);

// Parses an environment file and matches every referenced file against
// `corpora`, inserting copies or inputs that are not present yet. Errors name
// the offending line. `corpora` is left untouched on error.
absl::StatusOr<EnvironmentSeed> ParseEnvironmentText(
    std::string_view text, const OutputLayout &layout, CorpusSet &corpora);
absl::StatusOr<EnvironmentSeed> ParseEnvironmentSeed(
    const std::filesystem::path &src, const OutputLayout &layout,
    CorpusSet &corpora);

struct LoadedCampaign {
  CorpusSet corpora;
  std::vector<std::string> warnings;
  // Environments that came from capture runs (no lineage).
  size_t capture_environments = 0;
};

// Reloads a campaign directory. Environments whose references dangle are
// skipped with a warning; the returned corpora satisfy referential closure.
absl::StatusOr<LoadedCampaign> LoadCampaign(const std::filesystem::path &root);

}  // namespace envsynth

#endif  // ENVSYNTH_CORPUS_STORE_H_
