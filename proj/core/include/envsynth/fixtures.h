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

// In-process fixture targets with planted, environment-induced bugs. Each
// reads its resources at fixed paths below a root directory and takes a
// short command as program input. No input can trigger the planted crash
// while the resources hold their original bytes.
//
//   config-parser   <root>/etc/app.conf             key longer than the
//                                                   16-byte key buffer: SIGSEGV
//   db-reader       <root>/var/lib/app/records.db   record count 0: SIGFPE
//   key-parser      <root>/etc/ssl/server.key       END label differs from
//                                                   BEGIN label: SIGABRT
//   media-streamer  <root>/srv/media/stream.bin     frames exceed payload:
//                                                   SIGSEGV
//   server          etc/hosts, etc/app.conf, var/lib/app/records.db; also
//                   rewrites records.db on every run
#ifndef ENVSYNTH_FIXTURES_H_
#define ENVSYNTH_FIXTURES_H_

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "envsynth/defs.h"
#include "envsynth/simulated.h"

namespace envsynth::fixtures {

struct FixtureFile {
  std::string relative_path;
  ByteArray content;
};

class FixtureTarget : public SimulatedTarget {
 public:
  explicit FixtureTarget(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path &root() const { return root_; }
  std::filesystem::path ResourcePath(std::string_view relative) const {
    return root_ / relative;
  }

  // Original resource files, relative to root.
  virtual std::vector<FixtureFile> ResourceFiles() const = 0;
  virtual std::vector<ByteArray> SeedInputs() const = 0;
  // Cells whose only guard is resource content: unreachable while the
  // resources are original, whatever the input.
  virtual std::vector<size_t> ResourceGuardedCells() const = 0;
  // Signal of the planted bug.
  virtual int PlantedSignal() const = 0;

  // Writes the original resource files under root.
  absl::Status Materialize() const;

 private:
  std::filesystem::path root_;
};

std::vector<std::string> FixtureNames();
// The four planted-bug fixtures (excludes "server").
std::vector<std::string> PlantedBugFixtureNames();

absl::StatusOr<std::shared_ptr<const FixtureTarget>> MakeFixture(
    std::string_view name, std::filesystem::path root);

}  // namespace envsynth::fixtures

#endif  // ENVSYNTH_FIXTURES_H_
