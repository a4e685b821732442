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

#ifndef ENVSYNTH_COVERAGE_H_
#define ENVSYNTH_COVERAGE_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace envsynth {

// Number of edge cells in the shared coverage region.
inline constexpr size_t kCoverageMapSize = size_t{1} << 16;
// Hit-count classes: {0, 1, 2, 3, 4-7, 8-15, 16-31, 32-127, 128-255}.
inline constexpr int kNumBucketClasses = 9;

// Maps a raw 8-bit hit count onto its class index in [0, 8].
int BucketClass(uint8_t raw_count);

// Edge-hit counters as written by an instrumented target. Counters saturate
// at 255.
class CoverageBitmap {
 public:
  CoverageBitmap() : cells_(kCoverageMapSize, 0) {}

  void Hit(size_t cell) {
    uint8_t &c = cells_[cell % kCoverageMapSize];
    if (c != 0xFF) ++c;
  }
  void Clear();

  uint8_t *data() { return cells_.data(); }
  const uint8_t *data() const { return cells_.data(); }
  size_t size() const { return cells_.size(); }
  uint8_t operator[](size_t i) const { return cells_[i]; }

  size_t CountNonZero() const;
  // Hash over the bucketized cells; used to key crash deduplication.
  uint64_t BucketHash() const;

  friend bool operator==(const CoverageBitmap &,
                         const CoverageBitmap &) = default;

 private:
  std::vector<uint8_t> cells_;
};

// Per cell, the set of bucket classes ever observed (bit k-1 for class k).
// Only gains marks.
class VirginMap {
 public:
  VirginMap() : seen_(kCoverageMapSize, 0) {}

  uint8_t seen(size_t cell) const { return seen_[cell]; }
  bool Covered(size_t cell) const { return seen_[cell] != 0; }
  size_t CountCovered() const;
  size_t CountMarks() const;
  // True if every mark in *this is also in `other`.
  bool IsSubsetOf(const VirginMap &other) const;

 private:
  friend bool HasNewCoverage(const CoverageBitmap &run, VirginMap &virgin);
  std::vector<uint8_t> seen_;
};

// True iff some cell of `run` falls in a bucket class not yet marked in
// `virgin`. All buckets of `run` are marked on return.
bool HasNewCoverage(const CoverageBitmap &run, VirginMap &virgin);

}  // namespace envsynth

#endif  // ENVSYNTH_COVERAGE_H_
