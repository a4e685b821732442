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

#ifndef ENVSYNTH_SIMULATED_H_
#define ENVSYNTH_SIMULATED_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>

#include "envsynth/coverage.h"
#include "envsynth/defs.h"
#include "envsynth/executor.h"
#include "envsynth/manifest.h"
#include "envsynth/resource_id.h"

namespace envsynth {

// What a simulated target sees of the world. File access goes through the
// same capture/fuzzing rules as the preloaded runtime; coverage cells are set
// explicitly.
class TargetContext {
 public:
  TargetContext(const SessionManifest &manifest, ByteSpan input,
                CoverageBitmap &coverage, Duration timeout,
                bool redirect_writes);

  ByteSpan input() const { return input_; }

  // open(O_RDONLY) + read everything. nullopt if the file is absent.
  std::optional<ByteArray> ReadFile(std::string_view path);
  // open(O_WRONLY|O_TRUNC) + write.
  bool WriteFile(std::string_view path, ByteSpan data);

  void Hit(size_t cell) { coverage_.Hit(cell); }
  // Terminates the run as if by `signal`.
  [[noreturn]] void Crash(int signal);
  // Blocks; terminates the run as a hang once the timeout is exceeded.
  void Sleep(Duration duration);

 private:
  std::filesystem::path ScratchPath(const ResourceId &id) const;

  const SessionManifest &manifest_;
  SessionPaths paths_;
  ByteSpan input_;
  CoverageBitmap &coverage_;
  Clock::time_point deadline_;
  bool redirect_writes_;
  std::unordered_map<std::string, const Substitution *> substitutions_;
  std::set<std::string> captured_;
  std::set<std::string> written_;
};

class SimulatedTarget {
 public:
  virtual ~SimulatedTarget() = default;
  virtual std::string name() const = 0;
  virtual void Run(TargetContext &ctx) const = 0;
};

class SimulatedAdapter : public TargetAdapter {
 public:
  explicit SimulatedAdapter(std::shared_ptr<const SimulatedTarget> target);

  ExecutionOutcome Run(const SessionManifest &manifest, ByteSpan input,
                       Duration timeout) override;
  std::string Describe() const override;

  // Test hook: when false, target writes land on the original files.
  void set_redirect_writes(bool redirect) { redirect_writes_ = redirect; }

 private:
  std::shared_ptr<const SimulatedTarget> target_;
  bool redirect_writes_ = true;
};

}  // namespace envsynth

#endif  // ENVSYNTH_SIMULATED_H_
