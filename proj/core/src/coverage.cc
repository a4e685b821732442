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

#include "envsynth/coverage.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>

namespace envsynth {

namespace {

constexpr std::array<uint8_t, 256> MakeClassTable() {
  std::array<uint8_t, 256> table{};
  for (int i = 0; i < 256; ++i) {
    uint8_t c = 0;
    if (i == 0) c = 0;
    else if (i == 1) c = 1;
    else if (i == 2) c = 2;
    else if (i == 3) c = 3;
    else if (i <= 7) c = 4;
    else if (i <= 15) c = 5;
    else if (i <= 31) c = 6;
    else if (i <= 127) c = 7;
    else c = 8;
    table[i] = c;
  }
  return table;
}

constexpr std::array<uint8_t, 256> kClass = MakeClassTable();

// Bit in the virgin map for a non-zero class.
constexpr uint8_t ClassBit(uint8_t cls) {
  return cls == 0 ? 0 : static_cast<uint8_t>(1u << (cls - 1));
}

}  // namespace

int BucketClass(uint8_t raw_count) { return kClass[raw_count]; }

void CoverageBitmap::Clear() { std::fill(cells_.begin(), cells_.end(), 0); }

size_t CoverageBitmap::CountNonZero() const {
  return static_cast<size_t>(
      std::count_if(cells_.begin(), cells_.end(), [](uint8_t c) { return c; }));
}

uint64_t CoverageBitmap::BucketHash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i] == 0) continue;
    uint64_t v = (static_cast<uint64_t>(i) << 8) | kClass[cells_[i]];
    for (int b = 0; b < 3; ++b) {
      h ^= (v >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

size_t VirginMap::CountCovered() const {
  return static_cast<size_t>(
      std::count_if(seen_.begin(), seen_.end(), [](uint8_t c) { return c; }));
}

size_t VirginMap::CountMarks() const {
  size_t n = 0;
  for (uint8_t s : seen_) n += static_cast<size_t>(std::popcount(s));
  return n;
}

bool VirginMap::IsSubsetOf(const VirginMap &other) const {
  for (size_t i = 0; i < seen_.size(); ++i) {
    if ((seen_[i] & ~other.seen_[i]) != 0) return false;
  }
  return true;
}

bool HasNewCoverage(const CoverageBitmap &run, VirginMap &virgin) {
  const uint8_t *cells = run.data();
  uint8_t *seen = virgin.seen_.data();
  const size_t n = run.size();
  bool novel = false;
  // Skip zero words quickly; most of the map is untouched.
  for (size_t i = 0; i < n; i += 8) {
    uint64_t word;
    std::memcpy(&word, cells + i, sizeof(word));
    if (word == 0) continue;
    for (size_t j = i; j < i + 8; ++j) {
      const uint8_t bit = ClassBit(kClass[cells[j]]);
      if (bit != 0 && (seen[j] & bit) == 0) {
        seen[j] |= bit;
        novel = true;
      }
    }
  }
  return novel;
}

}  // namespace envsynth
