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

#ifndef ENVSYNTH_RESOURCE_ID_H_
#define ENVSYNTH_RESOURCE_ID_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace envsynth {

using PathHashFn = uint64_t (*)(std::string_view);

// Identity of an environment resource. The canonical path is the identity;
// `id_tag` is a filename-safe digest of it used for on-disk naming. Two ids
// whose tags collide still compare unequal.
class ResourceId {
 public:
  ResourceId() = default;

  // Trusts `canonical_path` as already canonical (e.g. read back from a
  // campaign directory).
  static ResourceId FromCanonicalPath(std::string canonical_path,
                                      PathHashFn hash = nullptr);

  const std::string &canonical_path() const { return canonical_path_; }
  uint64_t id_tag() const { return id_tag_; }
  std::string id_tag_hex() const;
  // False when the path could not be resolved on disk and only lexical
  // normalization was applied.
  bool canonical() const { return canonical_; }

  friend bool operator==(const ResourceId &a, const ResourceId &b) {
    return a.canonical_path_ == b.canonical_path_;
  }
  friend std::strong_ordering operator<=>(const ResourceId &a,
                                          const ResourceId &b) {
    return a.canonical_path_ <=> b.canonical_path_;
  }

 private:
  friend ResourceId MakeResourceId(std::string_view raw_path, PathHashFn hash);

  std::string canonical_path_;
  uint64_t id_tag_ = 0;
  bool canonical_ = true;
};

// Canonicalizes `raw_path` (absolute, symlinks and "."/".." resolved). A path
// that cannot be resolved (e.g. dangling) falls back to lexical normalization
// and is flagged non-canonical. `raw_path` must be non-empty.
ResourceId MakeResourceId(std::string_view raw_path,
                          PathHashFn hash = nullptr);

// 16 lowercase hex digits.
std::string FormatIdTag(uint64_t id_tag);
std::optional<uint64_t> ParseIdTag(std::string_view text);

// Orders by id_tag first (serialization order), then by path.
struct IdTagOrder {
  bool operator()(const ResourceId &a, const ResourceId &b) const {
    if (a.id_tag() != b.id_tag()) return a.id_tag() < b.id_tag();
    return a.canonical_path() < b.canonical_path();
  }
};

}  // namespace envsynth

#endif  // ENVSYNTH_RESOURCE_ID_H_
