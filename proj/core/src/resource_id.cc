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

#include "envsynth/resource_id.h"

#include <cstdio>
#include <filesystem>
#include <system_error>

#include "envsynth/util.h"
#include "glog/logging.h"

namespace envsynth {

namespace fs = std::filesystem;

namespace {

uint64_t DefaultPathHash(std::string_view path) { return Fnv1a64(path); }

}  // namespace

ResourceId ResourceId::FromCanonicalPath(std::string canonical_path,
                                         PathHashFn hash) {
  ResourceId id;
  id.id_tag_ = (hash ? hash : DefaultPathHash)(canonical_path);
  id.canonical_path_ = std::move(canonical_path);
  return id;
}

std::string ResourceId::id_tag_hex() const { return FormatIdTag(id_tag_); }

ResourceId MakeResourceId(std::string_view raw_path, PathHashFn hash) {
  CHECK(!raw_path.empty()) << "empty resource path";
  std::error_code ec;
  fs::path path(raw_path);
  if (!path.is_absolute()) path = fs::absolute(path, ec);

  ResourceId id;
  fs::path resolved = fs::canonical(path, ec);
  if (!ec) {
    id.canonical_path_ = resolved.string();
  } else {
    std::string lexical = path.lexically_normal().string();
    while (lexical.size() > 1 && lexical.back() == '/') lexical.pop_back();
    id.canonical_path_ = std::move(lexical);
    id.canonical_ = false;
  }
  id.id_tag_ = (hash ? hash : DefaultPathHash)(id.canonical_path_);
  return id;
}

std::string FormatIdTag(uint64_t id_tag) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(id_tag));
  return buf;
}

std::optional<uint64_t> ParseIdTag(std::string_view text) {
  if (text.size() != 16) return std::nullopt;
  uint64_t value = 0;
  for (char c : text) {
    value <<= 4;
    if (c >= '0' && c <= '9') {
      value |= static_cast<uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      value |= static_cast<uint64_t>(c - 'a' + 10);
    } else {
      return std::nullopt;
    }
  }
  return value;
}

}  // namespace envsynth
