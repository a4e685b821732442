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

#ifndef ENVSYNTH_EXECUTION_H_
#define ENVSYNTH_EXECUTION_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "envsynth/coverage.h"
#include "envsynth/defs.h"
#include "envsynth/resource_id.h"

namespace envsynth {

enum class ExecutionStatus { kOk, kCrash, kHang, kSetupError };
std::string_view StatusName(ExecutionStatus status);

struct AccessRecord {
  ResourceId resource;
  std::filesystem::path captured_copy;
};

struct ExecutionOutcome {
  ExecutionStatus status = ExecutionStatus::kOk;
  // Fatal signal number when status == kCrash.
  int signal = 0;
  CoverageBitmap coverage;
  // First-access order, one entry per resource. Capture mode only.
  std::vector<AccessRecord> accessed;
  Duration elapsed{};
  std::string diagnostic;

  bool crashed() const { return status == ExecutionStatus::kCrash; }
};

// Signals that classify an exit as a crash.
bool IsCrashSignal(int signal);

}  // namespace envsynth

#endif  // ENVSYNTH_EXECUTION_H_
