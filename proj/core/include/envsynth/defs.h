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

#ifndef ENVSYNTH_DEFS_H_
#define ENVSYNTH_DEFS_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace envsynth {

using ByteArray = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;
// Immutable shared content. Seeds hand these around instead of copying bytes.
using SharedBytes = std::shared_ptr<const ByteArray>;

using Clock = std::chrono::steady_clock;
using Duration = Clock::duration;

inline SharedBytes ShareBytes(ByteArray bytes) {
  return std::make_shared<const ByteArray>(std::move(bytes));
}

inline ByteArray AsBytes(std::string_view s) {
  return ByteArray(s.begin(), s.end());
}

inline std::string AsString(ByteSpan bytes) {
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace envsynth

#endif  // ENVSYNTH_DEFS_H_
