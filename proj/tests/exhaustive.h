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

#ifndef ENVSYNTH_TESTS_EXHAUSTIVE_H_
#define ENVSYNTH_TESTS_EXHAUSTIVE_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <set>

#include "envsynth/coverage.h"
#include "envsynth/executor.h"

namespace envsynth::testing {

struct ExhaustiveResult {
  std::set<size_t> cells;
  size_t runs = 0;
  size_t crashes = 0;
  size_t other = 0;  // hangs and setup errors
};

// Runs every byte string of length <= max_len against the unmodified host
// resources: the reachable set of any input-only fuzzer at that bound.
inline ExhaustiveResult RunExhaustive(TargetAdapter &adapter,
                                      const std::filesystem::path &session,
                                      size_t max_len) {
  ExhaustiveResult result;
  ResolvedEnvironment env;
  env.input = ShareBytes({});
  absl::StatusOr<SessionManifest> manifest = StageEnvironment(env, session);
  if (!manifest.ok()) return result;
  ByteArray input;
  auto run = [&] {
    ExecutionOutcome out =
        RunTarget(adapter, *manifest, input, std::chrono::seconds(1));
    ++result.runs;
    if (out.status == ExecutionStatus::kCrash) ++result.crashes;
    if (out.status == ExecutionStatus::kHang ||
        out.status == ExecutionStatus::kSetupError) {
      ++result.other;
    }
    const uint8_t *cells = out.coverage.data();
    for (size_t w = 0; w < out.coverage.size(); w += 8) {
      uint64_t word;
      std::memcpy(&word, cells + w, 8);
      if (word == 0) continue;
      for (size_t i = w; i < w + 8; ++i) {
        if (cells[i] != 0) result.cells.insert(i);
      }
    }
  };
  // Odometer over lengths 0..max_len.
  for (size_t len = 0; len <= max_len; ++len) {
    input.assign(len, 0);
    while (true) {
      run();
      size_t pos = 0;
      while (pos < len && ++input[pos] == 0) ++pos;
      if (pos == len) break;
    }
  }
  return result;
}

}  // namespace envsynth::testing

#endif  // ENVSYNTH_TESTS_EXHAUSTIVE_H_
