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

#include "envsynth/execution.h"

#include <csignal>

namespace envsynth {

std::string_view StatusName(ExecutionStatus status) {
  switch (status) {
    case ExecutionStatus::kOk:
      return "ok";
    case ExecutionStatus::kCrash:
      return "crash";
    case ExecutionStatus::kHang:
      return "hang";
    case ExecutionStatus::kSetupError:
      return "setup-error";
  }
  return "unknown";
}

bool IsCrashSignal(int signal) {
  switch (signal) {
    case SIGSEGV:
    case SIGABRT:
    case SIGILL:
    case SIGBUS:
    case SIGFPE:
      return true;
    default:
      return false;
  }
}

}  // namespace envsynth
