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

#include "envsynth/manifest.h"

#include <charconv>

#include "absl/strings/str_cat.h"
#include "envsynth/resource_id.h"
#include "envsynth/util.h"

namespace envsynth {

namespace {

absl::Status ManifestError(size_t line, std::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat("manifest line ", line, ": ", AbslView(what)));
}

}  // namespace

std::string FormatManifest(const SessionManifest &manifest) {
  std::string text = absl::StrCat(
      "mode ", manifest.mode == RuntimeMode::kCapture ? "capture" : "fuzzing",
      "\ncount ", manifest.substitutions.size(), "\n");
  for (const Substitution &s : manifest.substitutions) {
    absl::StrAppend(&text, FormatIdTag(s.id_tag), "\t", s.canonical_path, "\t",
                    s.substitute_path, "\n");
  }
  for (const std::string &glob : manifest.blocklist) {
    absl::StrAppend(&text, "block ", glob, "\n");
  }
  return text;
}

absl::StatusOr<SessionManifest> ParseManifest(std::string_view text) {
  std::vector<std::string_view> lines = Split(text, '\n');
  if (lines.empty() || !lines.back().empty()) {
    return ManifestError(lines.size(), "missing trailing newline");
  }
  lines.pop_back();
  SessionManifest manifest;
  if (lines.empty()) return ManifestError(1, "missing mode line");
  if (lines[0] == "mode capture") {
    manifest.mode = RuntimeMode::kCapture;
  } else if (lines[0] == "mode fuzzing") {
    manifest.mode = RuntimeMode::kFuzzing;
  } else {
    return ManifestError(1, "expected 'mode <capture|fuzzing>'");
  }
  if (lines.size() < 2 || !lines[1].starts_with("count ")) {
    return ManifestError(2, "expected 'count <n>'");
  }
  std::string_view count_text = lines[1].substr(6);
  size_t count = 0;
  auto [ptr, ec] = std::from_chars(
      count_text.data(), count_text.data() + count_text.size(), count);
  if (ec != std::errc() || ptr != count_text.data() + count_text.size() ||
      count_text.empty()) {
    return ManifestError(2, "malformed count");
  }
  size_t line = 2;
  for (size_t i = 0; i < count; ++i, ++line) {
    if (line >= lines.size()) return ManifestError(line + 1, "missing substitution");
    std::vector<std::string_view> fields = Split(lines[line], '\t');
    if (fields.size() != 3 || fields[1].empty() || fields[2].empty()) {
      return ManifestError(line + 1, "expected three tab-separated fields");
    }
    std::optional<uint64_t> tag = ParseIdTag(fields[0]);
    if (!tag) return ManifestError(line + 1, "malformed id_tag");
    manifest.substitutions.push_back(
        {*tag, std::string(fields[1]), std::string(fields[2])});
  }
  for (; line < lines.size(); ++line) {
    if (!lines[line].starts_with("block ") || lines[line].size() == 6) {
      return ManifestError(line + 1, "expected 'block <glob>'");
    }
    manifest.blocklist.emplace_back(lines[line].substr(6));
  }
  return manifest;
}

std::string FormatAccessLogLine(uint64_t id_tag, std::string_view canonical_path,
                                std::string_view captured_path) {
  return absl::StrCat(FormatIdTag(id_tag), "\t", AbslView(canonical_path), "\t",
                      AbslView(captured_path), "\n");
}

}  // namespace envsynth
