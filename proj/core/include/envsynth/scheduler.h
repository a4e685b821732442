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

#ifndef ENVSYNTH_SCHEDULER_H_
#define ENVSYNTH_SCHEDULER_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "envsynth/corpus.h"
#include "envsynth/defs.h"

namespace envsynth {

struct EnergyPolicy {
  size_t base = 32;
  size_t cap = 512;

  absl::Status Validate() const;
};

// e = min(cap, base * (1 + |R|)).
size_t AssignEnergy(size_t num_resources, const EnergyPolicy &policy);
size_t AssignEnergy(const EnvironmentSeed &seed, const EnergyPolicy &policy);

// Round-robin over C_Env in insertion order. Each cycle covers the corpus as
// it was when the cycle began; seeds appended meanwhile are picked up after
// the wrap.
class RoundRobinSelector {
 public:
  // nullopt iff corpus_size == 0.
  std::optional<size_t> Next(size_t corpus_size);
  size_t cycles_done() const { return cycles_done_; }

 private:
  size_t cursor_ = 0;
  size_t cycle_end_ = 0;
  size_t cycles_done_ = 0;
};

// A file picked up from the watched queue.
struct SyncedFile {
  std::string name;
  ByteArray content;
};

// Polls another fuzzer's queue directory for input files not seen before.
class SyncSource {
 public:
  SyncSource(std::filesystem::path watch_dir, Duration poll_interval);

  const std::filesystem::path &watch_dir() const { return watch_dir_; }
  const std::set<std::string> &seen() const { return seen_; }
  // Names already ingested, e.g. when resuming.
  void MarkSeen(const std::string &name) { seen_.insert(name); }

  // Unseen, readable files in name order. Does nothing until the poll
  // interval has elapsed since the previous poll, unless `force`. Files
  // that cannot be read stay unseen and are retried on the next poll.
  std::vector<SyncedFile> Poll(Clock::time_point now, bool force = false);

 private:
  std::filesystem::path watch_dir_;
  Duration poll_interval_;
  std::optional<Clock::time_point> last_poll_;
  std::set<std::string> seen_;
};

}  // namespace envsynth

#endif  // ENVSYNTH_SCHEDULER_H_
