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

#include "envsynth/scheduler.h"

#include <algorithm>
#include <limits>

#include "absl/strings/str_cat.h"
#include "envsynth/util.h"

namespace envsynth {

namespace fs = std::filesystem;

absl::Status EnergyPolicy::Validate() const {
  if (base < 1 || base > cap) {
    return absl::InvalidArgumentError(absl::StrCat(
        "energy policy needs 1 <= base <= cap, got base=", base,
        " cap=", cap));
  }
  return absl::OkStatus();
}

size_t AssignEnergy(size_t num_resources, const EnergyPolicy &policy) {
  const size_t factor = num_resources + 1;
  if (factor == 0 || policy.base > policy.cap / factor) return policy.cap;
  return std::min(policy.cap, policy.base * factor);
}

size_t AssignEnergy(const EnvironmentSeed &seed, const EnergyPolicy &policy) {
  return AssignEnergy(seed.resources.size(), policy);
}

std::optional<size_t> RoundRobinSelector::Next(size_t corpus_size) {
  if (corpus_size == 0) return std::nullopt;
  if (cursor_ >= cycle_end_) {
    if (cycle_end_ != 0) ++cycles_done_;
    cursor_ = 0;
    cycle_end_ = corpus_size;
  }
  return cursor_++;
}

SyncSource::SyncSource(fs::path watch_dir, Duration poll_interval)
    : watch_dir_(std::move(watch_dir)), poll_interval_(poll_interval) {}

std::vector<SyncedFile> SyncSource::Poll(Clock::time_point now, bool force) {
  std::vector<SyncedFile> fresh;
  if (!force && last_poll_ && now - *last_poll_ < poll_interval_) return fresh;
  last_poll_ = now;
  for (const fs::path &file : ListFilesSorted(watch_dir_)) {
    std::string name = file.filename().string();
    if (seen_.contains(name)) continue;
    absl::StatusOr<ByteArray> content = ReadFileBytes(file);
    if (!content.ok()) continue;
    seen_.insert(name);
    fresh.push_back({std::move(name), std::move(*content)});
  }
  return fresh;
}

}  // namespace envsynth
