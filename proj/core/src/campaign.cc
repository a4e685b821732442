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

#include "envsynth/campaign.h"

#include <chrono>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "envsynth/util.h"
#include "glog/logging.h"

namespace envsynth {

namespace fs = std::filesystem;

namespace {

ExecutorOptions MakeExecutorOptions(const CampaignConfig &config,
                                    const OutputLayout &layout) {
  ExecutorOptions options;
  options.session_dir = config.session_dir.empty()
                            ? layout.default_session_dir()
                            : config.session_dir;
  options.timeout = config.exec_timeout;
  options.blocklist = config.blocklist;
  return options;
}

double Seconds(Duration d) {
  return std::chrono::duration<double>(d).count();
}

}  // namespace

absl::Status ValidateConfig(const CampaignConfig &config) {
  if (config.out_dir.empty()) {
    return absl::InvalidArgumentError("no output directory");
  }
  if (absl::Status s = config.weights.Validate(); !s.ok()) return s;
  if (absl::Status s = config.havoc.Validate(); !s.ok()) return s;
  if (absl::Status s = config.energy.Validate(); !s.ok()) return s;
  if (config.exec_timeout <= Duration::zero()) {
    return absl::InvalidArgumentError("execution timeout must be positive");
  }
  if (config.time_limit && *config.time_limit < Duration::zero()) {
    return absl::InvalidArgumentError("negative time limit");
  }
  if (!config.resume && config.inputs.empty() && !config.sync_dir) {
    return absl::InvalidArgumentError("no initial inputs");
  }
  return absl::OkStatus();
}

Campaign::Campaign(CampaignConfig config, TargetAdapter &adapter)
    : config_(std::move(config)),
      layout_(config_.out_dir),
      executor_(adapter, MakeExecutorOptions(config_, layout_)),
      mutators_(config_.havoc),
      rng_(config_.seed),
      stats_(layout_) {
  if (config_.sync_dir) sync_.emplace(*config_.sync_dir, config_.sync_interval);
}

void Campaign::Warn(std::string message) {
  LOG(WARNING) << message;
  warnings_.push_back(std::move(message));
}

const CampaignSummary &Campaign::summary() {
  summary_.inputs = corpora_.inputs().size();
  summary_.environments = corpora_.environments().size();
  summary_.crashes = corpora_.crashes().size();
  summary_.bitmap_cells = virgin_.CountCovered();
  if (initialized_) summary_.elapsed = Clock::now() - start_;
  return summary_;
}

absl::Status Campaign::Initialize() {
  if (initialized_) return absl::OkStatus();
  if (absl::Status s = ValidateConfig(config_); !s.ok()) return s;
  if (absl::Status s = layout_.Initialize(); !s.ok()) return s;
  start_ = last_tick_ = Clock::now();

  if (config_.resume) {
    if (absl::Status s = Resume(); !s.ok()) return s;
  } else {
    if (!ListFilesSorted(layout_.environment_dir()).empty() ||
        !ListFilesSorted(layout_.input_dir()).empty()) {
      return absl::FailedPreconditionError(absl::StrCat(
          layout_.root().string(),
          " already holds a campaign; resume it or use a fresh directory"));
    }
    if (absl::Status s = stats_.Start(/*append=*/false); !s.ok()) return s;
    std::vector<size_t> added;
    for (const InitialInput &input : config_.inputs) {
      const size_t index = corpora_.AddInput(ShareBytes(input.content),
                                             InputProvenance::kInitial,
                                             input.name);
      absl::StatusOr<fs::path> path =
          PersistInput(layout_, corpora_.inputs()[index]);
      if (!path.ok()) return path.status();
      added.push_back(index);
    }
    initialized_ = true;
    if (absl::Status s = BuildEnvirons(added); !s.ok()) return s;
  }
  initialized_ = true;
  if (sync_) {
    if (absl::Status s = SyncInputs(/*force=*/true); !s.ok()) return s;
  }
  if (corpora_.environments().empty()) {
    return absl::FailedPreconditionError(
        "no environment could be built from the initial inputs");
  }
  Tick(/*force=*/true);
  return absl::OkStatus();
}

absl::Status Campaign::Resume() {
  absl::StatusOr<LoadedCampaign> loaded = LoadCampaign(layout_.root());
  if (!loaded.ok()) return loaded.status();
  for (std::string &w : loaded->warnings) Warn(std::move(w));
  corpora_ = std::move(loaded->corpora);
  summary_.capture_environments = loaded->capture_environments;
  for (const EnvironmentSeed &env : corpora_.environments()) {
    if (env.lineage) ++summary_.retained_by_op[env.op()];
  }
  if (sync_) {
    // Stored names are sanitized; map them back onto the queue's files.
    std::set<std::string> synced;
    for (const InputSeed &input : corpora_.inputs()) {
      if (input.provenance == InputProvenance::kSynced) {
        synced.insert(input.source_name);
      }
    }
    for (const fs::path &file : ListFilesSorted(sync_->watch_dir())) {
      const std::string name = file.filename().string();
      if (synced.contains(SanitizeSourceName(name))) sync_->MarkSeen(name);
    }
  }
  if (absl::Status s = stats_.Start(/*append=*/true); !s.ok()) return s;
  // Rebuild the virgin map by replaying every environment once.
  for (const EnvironmentSeed &env : corpora_.environments()) {
    ExecutionOutcome outcome = executor_.Execute(corpora_.Resolve(env));
    ++summary_.execs;
    if (outcome.status != ExecutionStatus::kSetupError) {
      HasNewCoverage(outcome.coverage, virgin_);
    }
  }
  return absl::OkStatus();
}

absl::Status Campaign::PersistEnvironment(const EnvironmentSeed &env) {
  absl::StatusOr<fs::path> path = WriteEnvironmentSeed(
      layout_, corpora_, env, layout_.environment_path(env));
  return path.status();
}

absl::Status Campaign::BuildEnvirons(const std::vector<size_t> &inputs) {
  for (size_t index : inputs) {
    CHECK_LT(index, corpora_.inputs().size());
    const SharedBytes content = corpora_.inputs()[index].content;
    ExecutionOutcome outcome = executor_.Capture(*content);
    ++summary_.execs;
    if (outcome.status == ExecutionStatus::kSetupError) {
      ++summary_.setup_errors;
      Warn(absl::StrCat("capture run for input ", index,
                        " failed to set up: ", outcome.diagnostic));
      continue;
    }
    EnvironmentSeed env;
    env.input = index;
    for (const AccessRecord &access : outcome.accessed) {
      if (MatchesAnyGlob(config_.blocklist, access.resource.canonical_path())) {
        continue;
      }
      if (!corpora_.HasResourceCorpus(access.resource)) {
        absl::StatusOr<ByteArray> bytes = ReadFileBytes(access.captured_copy);
        if (!bytes.ok()) {
          Warn(absl::StrCat("dropping resource ",
                            access.resource.canonical_path(), ": ",
                            bytes.status().message()));
          continue;
        }
        const ResourceCopy &copy = corpora_.CreateResourceCorpus(
            access.resource, ShareBytes(std::move(*bytes)));
        absl::StatusOr<fs::path> path = PersistResourceCopy(layout_, copy);
        if (!path.ok()) return path.status();
      }
      env.resources[access.resource] = 0;
    }
    const EnvironmentSeed &added = corpora_.AddEnvironment(std::move(env));
    ++summary_.capture_environments;
    if (absl::Status s = PersistEnvironment(added); !s.ok()) return s;
    HasNewCoverage(outcome.coverage, virgin_);
    if (outcome.status == ExecutionStatus::kHang) ++summary_.hangs;
    if (outcome.crashed()) {
      LOG(INFO) << "capture run of input " << index << " crashed with signal "
                << outcome.signal;
      MutationResult m;
      m.op = Operator::kCapture;
      m.seed = corpora_.environments().back();
      if (absl::Status s = RecordCrash(m, outcome); !s.ok()) return s;
    }
  }
  return absl::OkStatus();
}

absl::Status Campaign::SyncInputs(bool force) {
  if (!sync_) return absl::OkStatus();
  std::vector<SyncedFile> files = sync_->Poll(Clock::now(), force);
  if (files.empty()) return absl::OkStatus();
  std::vector<size_t> added;
  for (SyncedFile &file : files) {
    const size_t index = corpora_.AddInput(ShareBytes(std::move(file.content)),
                                           InputProvenance::kSynced, file.name);
    absl::StatusOr<fs::path> path =
        PersistInput(layout_, corpora_.inputs()[index]);
    if (!path.ok()) return path.status();
    added.push_back(index);
  }
  return BuildEnvirons(added);
}

// Moves a pending r' or t' into its corpus.
absl::Status Campaign::ConsumePending(MutationResult &m) {
  if (m.fresh_copy) {
    const ResourceCopy &copy = corpora_.AddResourceCopy(
        m.fresh_copy->resource, m.fresh_copy->content, CopyOrigin::kFuzzed);
    CHECK_EQ(copy.seed_index, m.fresh_copy->seed_index);
    m.fresh_copy.reset();
    absl::StatusOr<fs::path> path = PersistResourceCopy(layout_, copy);
    if (!path.ok()) return path.status();
  }
  if (m.fresh_input) {
    const size_t index = corpora_.AddInput(std::move(m.fresh_input),
                                           InputProvenance::kPromoted);
    CHECK_EQ(index, m.seed.input);
    m.fresh_input = nullptr;
    absl::StatusOr<fs::path> path =
        PersistInput(layout_, corpora_.inputs()[index]);
    if (!path.ok()) return path.status();
  }
  return absl::OkStatus();
}

absl::Status Campaign::Retain(MutationResult &m) {
  const bool new_resource = m.fresh_copy.has_value();
  if (absl::Status s = ConsumePending(m); !s.ok()) return s;
  if (!new_resource) ++summary_.promotion_events;
  const EnvironmentSeed &added = corpora_.AddEnvironment(m.seed);
  ++summary_.retained_by_op[m.op];
  return PersistEnvironment(added);
}

absl::Status Campaign::RecordCrash(MutationResult &m,
                                   const ExecutionOutcome &outcome) {
  ++summary_.crash_hits;
  if (!summary_.execs_to_first_crash) {
    summary_.execs_to_first_crash = summary_.execs;
  }
  const uint64_t hash = outcome.coverage.BucketHash();
  if (CrashRecord *known = corpora_.FindCrash(outcome.signal, hash)) {
    ++known->hits;
    return absl::OkStatus();
  }
  if (absl::Status s = ConsumePending(m); !s.ok()) return s;
  const CrashRecord &crash = corpora_.AddCrash(m.seed, outcome.signal, hash);
  LOG(INFO) << "new crash " << crash.crash_index << ": signal "
            << outcome.signal << " after " << summary_.execs << " execs";
  absl::StatusOr<fs::path> path = WriteEnvironmentSeed(
      layout_, corpora_, crash.env, layout_.crash_path(crash));
  return path.status();
}

bool Campaign::ShouldStop() const {
  if (abort_ && abort_->load(std::memory_order_relaxed)) return true;
  if (config_.max_execs && summary_.execs >= *config_.max_execs) return true;
  if (config_.stop_on_first_crash && !corpora_.crashes().empty()) return true;
  if (config_.time_limit && Clock::now() - start_ >= *config_.time_limit) {
    return true;
  }
  return false;
}

absl::Status Campaign::FuzzRound(size_t env_index, size_t energy) {
  CHECK_LT(env_index, corpora_.environments().size());
  // C_Env may grow during the round.
  const EnvironmentSeed parent = corpora_.environments()[env_index];
  for (size_t i = 0; i < energy && !ShouldStop(); ++i) {
    MutationResult m =
        config_.mutate_environment
            ? MutateEnviron(parent, corpora_, config_.weights, mutators_, rng_)
            : MutateInput(parent, corpora_, config_.havoc, rng_);
    ExecutionOutcome outcome = executor_.Execute(corpora_.Resolve(
        m.seed, m.fresh_copy ? &*m.fresh_copy : nullptr, m.fresh_input));
    ++summary_.execs;
    switch (outcome.status) {
      case ExecutionStatus::kSetupError:
        ++summary_.setup_errors;
        VLOG(1) << "setup error: " << outcome.diagnostic;
        break;
      case ExecutionStatus::kHang:
        ++summary_.hangs;
        break;
      case ExecutionStatus::kOk:
      case ExecutionStatus::kCrash:
        if (HasNewCoverage(outcome.coverage, virgin_)) {
          if (absl::Status s = Retain(m); !s.ok()) return s;
        }
        if (outcome.crashed()) {
          if (absl::Status s = RecordCrash(m, outcome); !s.ok()) return s;
        }
        break;
    }
    Tick(/*force=*/false);
  }
  return absl::OkStatus();
}

void Campaign::Tick(bool force) {
  const Clock::time_point now = Clock::now();
  if (!force && now - last_tick_ < config_.status_interval) return;
  const double interval = Seconds(now - last_tick_);
  StatsSample sample;
  sample.unix_time = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
  sample.elapsed_s = Seconds(now - start_);
  sample.execs = summary_.execs;
  sample.execs_per_sec =
      interval > 0 ? (summary_.execs - execs_at_last_tick_) / interval : 0;
  sample.environments = corpora_.environments().size();
  sample.inputs = corpora_.inputs().size();
  sample.crashes = corpora_.crashes().size();
  sample.bitmap_cells = virgin_.CountCovered();
  if (absl::Status s = stats_.AppendSample(sample); !s.ok()) {
    LOG(WARNING) << "cannot write plot data: " << s;
  }
  last_tick_ = now;
  execs_at_last_tick_ = summary_.execs;
  if (on_status_) on_status_(summary());
}

absl::Status Campaign::FlushStats() {
  Tick(/*force=*/true);
  const CampaignSummary &s = summary();
  if (absl::Status st = stats_.WriteOperators(s.retained_by_op); !st.ok()) {
    return st;
  }
  const double elapsed = Seconds(s.elapsed);
  return stats_.WriteFuzzerStats({
      {"execs_done", absl::StrCat(s.execs)},
      {"run_time_s", absl::StrFormat("%.3f", elapsed)},
      {"execs_per_sec",
       absl::StrFormat("%.1f", elapsed > 0 ? s.execs / elapsed : 0.0)},
      {"inputs", absl::StrCat(s.inputs)},
      {"environments", absl::StrCat(s.environments)},
      {"capture_environments", absl::StrCat(s.capture_environments)},
      {"promotion_events", absl::StrCat(s.promotion_events)},
      {"unique_crashes", absl::StrCat(s.crashes)},
      {"crash_hits", absl::StrCat(s.crash_hits)},
      {"hangs", absl::StrCat(s.hangs)},
      {"setup_errors", absl::StrCat(s.setup_errors)},
      {"bitmap_cells", absl::StrCat(s.bitmap_cells)},
      {"mode", config_.mutate_environment ? "environment" : "input-only"},
      {"target", executor_.adapter().Describe()},
  });
}

absl::StatusOr<CampaignSummary> Campaign::Run(const std::atomic<bool> *abort) {
  abort_ = abort;
  if (absl::Status s = Initialize(); !s.ok()) return s;
  absl::Status status;
  while (!ShouldStop()) {
    status = SyncInputs();
    if (!status.ok()) break;
    std::optional<size_t> next = selector_.Next(corpora_.environments().size());
    CHECK(next.has_value());
    status = FuzzRound(*next,
                       AssignEnergy(corpora_.environments()[*next],
                                    config_.energy));
    if (!status.ok()) break;
    ++summary_.rounds;
  }
  absl::Status flushed = FlushStats();
  abort_ = nullptr;
  if (!status.ok()) return status;
  if (!flushed.ok()) return flushed;
  return summary();
}

absl::StatusOr<CampaignSummary> RunCampaign(const CampaignConfig &config,
                                            TargetAdapter &adapter,
                                            const std::atomic<bool> *abort,
                                            StatusCallback on_status) {
  Campaign campaign(config, adapter);
  campaign.set_status_callback(std::move(on_status));
  return campaign.Run(abort);
}

}  // namespace envsynth
