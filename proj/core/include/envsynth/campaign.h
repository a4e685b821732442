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

#ifndef ENVSYNTH_CAMPAIGN_H_
#define ENVSYNTH_CAMPAIGN_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "envsynth/corpus.h"
#include "envsynth/corpus_store.h"
#include "envsynth/coverage.h"
#include "envsynth/executor.h"
#include "envsynth/mutation.h"
#include "envsynth/rng.h"
#include "envsynth/scheduler.h"
#include "envsynth/stats.h"

namespace envsynth {

struct InitialInput {
  std::string name;
  ByteArray content;
};

struct CampaignConfig {
  std::filesystem::path out_dir;
  std::vector<InitialInput> inputs;
  // Replayable queue of an input fuzzer to pull new inputs from.
  std::optional<std::filesystem::path> sync_dir;
  Duration sync_interval = std::chrono::seconds(1);
  // Wall-clock budget for the fuzzing loop; zero means initialization only,
  // nullopt means until aborted.
  std::optional<Duration> time_limit;
  // Execution budget, capture runs included.
  std::optional<uint64_t> max_execs;
  Duration exec_timeout = std::chrono::seconds(1);
  std::vector<std::string> blocklist;
  OperatorWeights weights;
  HavocBudget havoc;
  EnergyPolicy energy;
  uint64_t seed = 0;
  // False runs the input-only baseline: havoc on the program input with
  // every resource left at its captured copy.
  bool mutate_environment = true;
  bool stop_on_first_crash = false;
  // Defaults to <out_dir>/.session.
  std::filesystem::path session_dir;
  // Continue the campaign stored in out_dir instead of starting fresh.
  bool resume = false;
  Duration status_interval = std::chrono::seconds(1);
};

absl::Status ValidateConfig(const CampaignConfig &config);

struct CampaignSummary {
  uint64_t execs = 0;
  Duration elapsed{};
  size_t inputs = 0;
  size_t environments = 0;
  size_t capture_environments = 0;
  size_t crashes = 0;
  // Crashing executions, duplicates included.
  uint64_t crash_hits = 0;
  uint64_t hangs = 0;
  uint64_t setup_errors = 0;
  // Retained environments by the operator that produced them.
  std::map<Operator, size_t> retained_by_op;
  // Coverage-increasing environments that introduced no new resource copy.
  uint64_t promotion_events = 0;
  std::optional<uint64_t> execs_to_first_crash;
  size_t bitmap_cells = 0;
  size_t rounds = 0;
};

using StatusCallback = std::function<void(const CampaignSummary &)>;

// Algorithm 2. One coordinator owns the corpora and the virgin map; the
// executor runs one environment at a time.
class Campaign {
 public:
  Campaign(CampaignConfig config, TargetAdapter &adapter);

  // Lines 1-9: seeds C_Inp from the configured inputs (or reloads out_dir
  // when resuming) and runs buildEnvirons on them.
  absl::Status Initialize();

  // Algorithm 3 on the given members of C_Inp.
  absl::Status BuildEnvirons(const std::vector<size_t> &inputs);
  // Pulls unseen files from the sync directory into C_Inp and builds their
  // environments.
  absl::Status SyncInputs(bool force = false);
  // `energy` iterations of mutate, execute, and corpus update on C_Env
  // member `env_index`. Stops early when the campaign should stop.
  absl::Status FuzzRound(size_t env_index, size_t energy);

  // Initialize (if needed), then sync/select/energy/fuzz_round until the
  // budget is spent or `abort` is set. Statistics are flushed on return.
  absl::StatusOr<CampaignSummary> Run(const std::atomic<bool> *abort = nullptr);

  void set_status_callback(StatusCallback cb) { on_status_ = std::move(cb); }
  // Plugs in a structure-aware mutator for one resource.
  void RegisterMutator(const ResourceId &resource,
                       std::shared_ptr<const ResourceMutator> mutator) {
    mutators_.Register(resource, std::move(mutator));
  }

  const CampaignConfig &config() const { return config_; }
  const OutputLayout &layout() const { return layout_; }
  const CorpusSet &corpora() const { return corpora_; }
  const VirginMap &virgin() const { return virgin_; }
  const CampaignSummary &summary();
  Executor &executor() { return executor_; }
  // Non-fatal problems seen so far (skipped inputs, unreadable copies).
  const std::vector<std::string> &warnings() const { return warnings_; }

 private:
  bool ShouldStop() const;
  void Tick(bool force);
  void Warn(std::string message);
  absl::Status Retain(MutationResult &m);
  absl::Status RecordCrash(MutationResult &m, const ExecutionOutcome &outcome);
  absl::Status ConsumePending(MutationResult &m);
  absl::Status PersistEnvironment(const EnvironmentSeed &env);
  absl::Status Resume();
  absl::Status FlushStats();

  CampaignConfig config_;
  OutputLayout layout_;
  Executor executor_;
  MutatorRegistry mutators_;
  Rng rng_;
  CorpusSet corpora_;
  VirginMap virgin_;
  RoundRobinSelector selector_;
  std::optional<SyncSource> sync_;
  StatsWriter stats_;
  CampaignSummary summary_;
  std::vector<std::string> warnings_;
  StatusCallback on_status_;
  const std::atomic<bool> *abort_ = nullptr;
  bool initialized_ = false;
  Clock::time_point start_;
  Clock::time_point last_tick_;
  uint64_t execs_at_last_tick_ = 0;
};

// Convenience wrapper: constructs, runs and returns the summary.
absl::StatusOr<CampaignSummary> RunCampaign(
    const CampaignConfig &config, TargetAdapter &adapter,
    const std::atomic<bool> *abort = nullptr,
    StatusCallback on_status = nullptr);

}  // namespace envsynth

#endif  // ENVSYNTH_CAMPAIGN_H_
