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

#ifndef ENVSYNTH_PROCESS_ADAPTER_H_
#define ENVSYNTH_PROCESS_ADAPTER_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "envsynth/executor.h"

namespace envsynth {

struct ProcessAdapterOptions {
  // Target command line. An "@@" argument is replaced by the path of the
  // input file; without one the input is fed on stdin.
  std::vector<std::string> argv;
  // Runtime library to preload, if any.
  std::optional<std::filesystem::path> interposer;
  // Keep the target's stdout/stderr instead of discarding them.
  bool forward_output = false;
};

// Spawns the target per execution with the manifest, session directory and
// coverage region passed through the environment.
class ProcessAdapter : public TargetAdapter {
 public:
  static absl::StatusOr<std::unique_ptr<ProcessAdapter>> Create(
      ProcessAdapterOptions options);
  ~ProcessAdapter() override;

  ProcessAdapter(const ProcessAdapter &) = delete;
  ProcessAdapter &operator=(const ProcessAdapter &) = delete;

  ExecutionOutcome Run(const SessionManifest &manifest, ByteSpan input,
                       Duration timeout) override;
  std::string Describe() const override;

  int shm_id() const { return shm_id_; }

 private:
  ProcessAdapter(ProcessAdapterOptions options, int shm_id, uint8_t *shm);

  ProcessAdapterOptions options_;
  int shm_id_;
  uint8_t *shm_;
};

}  // namespace envsynth

#endif  // ENVSYNTH_PROCESS_ADAPTER_H_
