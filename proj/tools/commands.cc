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

#include "./commands.h"

#include <stdlib.h>

#include <chrono>
#include <cmath>
#include <map>
#include <system_error>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "envsynth/campaign.h"
#include "envsynth/corpus_store.h"
#include "envsynth/mutation.h"
#include "envsynth/process_adapter.h"
#include "envsynth/simulated.h"
#include "envsynth/stats.h"
#include "envsynth/triage.h"
#include "envsynth/util.h"

namespace envsynth::cli {

namespace fs = std::filesystem;

namespace {

Duration SecondsToDuration(double s) {
  return std::chrono::duration_cast<Duration>(
      std::chrono::duration<double>(s));
}

// Session directory for one-off executions; removed on destruction.
class TempSession {
 public:
  TempSession() {
    std::string tmpl =
        (fs::temp_directory_path() / "envsynth-replay-XXXXXX").string();
    if (mkdtemp(tmpl.data()) != nullptr) path_ = tmpl;
  }
  ~TempSession() {
    std::error_code ec;
    if (!path_.empty()) fs::remove_all(path_, ec);
  }
  TempSession(const TempSession &) = delete;
  TempSession &operator=(const TempSession &) = delete;

  const fs::path &path() const { return path_; }

 private:
  fs::path path_;
};

std::vector<std::string> SplitCommandLine(std::string_view text) {
  std::vector<std::string> argv;
  for (std::string_view piece : Split(text, ' ')) {
    if (!piece.empty()) argv.emplace_back(piece);
  }
  return argv;
}

// A loaded environment plus the corpora that resolve it.
struct ReplaySetup {
  fs::path root;
  CorpusSet corpora;
  EnvironmentSeed env;
};

absl::StatusOr<ReplaySetup> LoadForReplay(const ReplayOptions &options,
                                          std::ostream &err) {
  ReplaySetup setup;
  if (!options.root.empty()) {
    setup.root = options.root;
  } else if (auto found = FindCampaignRoot(options.env_file)) {
    setup.root = *found;
  } else {
    setup.root = fs::absolute(options.env_file).parent_path();
  }
  OutputLayout layout(setup.root);
  std::error_code ec;
  if (fs::is_directory(layout.environment_dir(), ec)) {
    absl::StatusOr<LoadedCampaign> loaded = LoadCampaign(setup.root);
    if (!loaded.ok()) return loaded.status();
    for (const std::string &w : loaded->warnings) {
      err << "warning: " << w << "\n";
    }
    setup.corpora = std::move(loaded->corpora);
  }
  absl::StatusOr<EnvironmentSeed> env =
      ParseEnvironmentSeed(options.env_file, layout, setup.corpora);
  if (!env.ok()) return env.status();
  setup.env = std::move(*env);
  return setup;
}

TargetOptions WithDefaultSimRoot(TargetOptions target, const fs::path &root) {
  if (target.sim_root.empty()) target.sim_root = root / "sim-root";
  return target;
}

int ExitCodeFor(const ExecutionOutcome &outcome) {
  switch (outcome.status) {
    case ExecutionStatus::kOk:
      return kExitOk;
    case ExecutionStatus::kCrash:
      return kExitSignalBase + outcome.signal;
    case ExecutionStatus::kHang:
      return kExitHang;
    case ExecutionStatus::kSetupError:
      return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace

std::optional<fs::path> FindCampaignRoot(const fs::path &file) {
  std::error_code ec;
  fs::path dir = fs::absolute(file, ec).lexically_normal().parent_path();
  while (!dir.empty()) {
    if (fs::is_directory(dir / "system-level-seeds", ec)) return dir;
    if (dir == dir.root_path()) break;
    dir = dir.parent_path();
  }
  return std::nullopt;
}

absl::StatusOr<Target> MakeTarget(const TargetOptions &options) {
  Target target;
  std::string_view spec = options.target;
  if (spec.empty()) return absl::InvalidArgumentError("no target given");
  if (spec.starts_with(kSimulatedPrefix)) {
    spec.remove_prefix(std::string_view(kSimulatedPrefix).size());
    if (options.sim_root.empty()) {
      return absl::InvalidArgumentError("simulated target needs a root");
    }
    absl::StatusOr<std::shared_ptr<const fixtures::FixtureTarget>> fixture =
        fixtures::MakeFixture(spec, options.sim_root);
    if (!fixture.ok()) return fixture.status();
    for (const fixtures::FixtureFile &file : (*fixture)->ResourceFiles()) {
      std::error_code ec;
      if (!fs::exists((*fixture)->ResourcePath(file.relative_path), ec)) {
        if (absl::Status s = (*fixture)->Materialize(); !s.ok()) return s;
        break;
      }
    }
    target.fixture = *fixture;
    target.adapter = std::make_unique<SimulatedAdapter>(*fixture);
    return target;
  }
  ProcessAdapterOptions process;
  process.argv = SplitCommandLine(spec);
  process.interposer = options.interposer;
  process.forward_output = options.forward_output;
  absl::StatusOr<std::unique_ptr<ProcessAdapter>> adapter =
      ProcessAdapter::Create(std::move(process));
  if (!adapter.ok()) return adapter.status();
  target.adapter = std::move(*adapter);
  return target;
}

int CmdFuzz(const FuzzOptions &options, std::ostream &out, std::ostream &err,
            const std::atomic<bool> *abort) {
  CampaignConfig config;
  config.out_dir = options.out_dir;
  absl::StatusOr<OperatorWeights> weights =
      ParseOperatorWeights(options.weights);
  if (!weights.ok()) {
    err << "error: " << weights.status().message() << "\n";
    return kExitUsage;
  }
  config.weights = *weights;
  config.energy.base = options.energy_base;
  config.energy.cap = options.energy_cap;
  config.seed = options.seed;
  config.blocklist = options.block;
  config.sync_dir = options.sync_dir;
  config.sync_interval = SecondsToDuration(options.sync_interval_s);
  config.exec_timeout = SecondsToDuration(options.exec_timeout_s);
  if (options.time_s) {
    if (*options.time_s < 0) {
      err << "error: --time must not be negative\n";
      return kExitUsage;
    }
    config.time_limit = SecondsToDuration(*options.time_s);
  }
  config.max_execs = options.max_execs;
  config.resume = options.resume;
  config.mutate_environment = !options.input_only;
  config.session_dir = options.session_dir;

  absl::StatusOr<Target> target = MakeTarget(
      WithDefaultSimRoot(options.target, fs::absolute(options.out_dir)));
  if (!target.ok()) {
    err << "error: " << target.status().message() << "\n";
    return kExitUsage;
  }
  if (!options.resume) {
    if (options.in_dir) {
      std::error_code ec;
      if (!fs::is_directory(*options.in_dir, ec)) {
        err << "error: input directory " << options.in_dir->string()
            << " does not exist\n";
        return kExitUsage;
      }
      for (const fs::path &file : ListFilesSorted(*options.in_dir)) {
        absl::StatusOr<ByteArray> bytes = ReadFileBytes(file);
        if (!bytes.ok()) {
          err << "warning: " << bytes.status().message() << "\n";
          continue;
        }
        config.inputs.push_back({file.filename().string(), std::move(*bytes)});
      }
    } else if (target->fixture) {
      std::vector<ByteArray> seeds = target->fixture->SeedInputs();
      for (size_t i = 0; i < seeds.size(); ++i) {
        config.inputs.push_back({absl::StrCat("seed-", i), seeds[i]});
      }
    }
  }
  if (absl::Status s = ValidateConfig(config); !s.ok()) {
    err << "error: " << s.message() << "\n";
    return kExitUsage;
  }

  Campaign campaign(config, *target->adapter);
  if (!options.quiet) {
    campaign.set_status_callback([&out](const CampaignSummary &s) {
      const double elapsed = std::chrono::duration<double>(s.elapsed).count();
      out << absl::StrFormat(
                 "[%7.1fs] execs %d (%.0f/s) envs %d inputs %d crashes %d "
                 "cells %d (%.2f%%)",
                 elapsed, s.execs, elapsed > 0 ? s.execs / elapsed : 0.0,
                 s.environments, s.inputs, s.crashes, s.bitmap_cells,
                 100.0 * s.bitmap_cells / kCoverageMapSize)
          << std::endl;
    });
  }
  absl::StatusOr<CampaignSummary> summary = campaign.Run(abort);
  if (!summary.ok()) {
    err << "error: " << summary.status().message() << "\n";
    return summary.status().code() == absl::StatusCode::kInvalidArgument
               ? kExitUsage
               : kExitFailure;
  }
  out << absl::StrFormat(
      "done: execs %d, environments %d (%d from capture), crashes %d\n",
      summary->execs, summary->environments, summary->capture_environments,
      summary->crashes);
  for (const auto &[op, n] : summary->retained_by_op) {
    out << "  " << OperatorName(op) << ": " << n << "\n";
  }
  if (abort && abort->load()) {
    err << "aborted\n";
    return kExitFailure;
  }
  return kExitOk;
}

int CmdReplay(const ReplayOptions &options, std::ostream &out,
              std::ostream &err) {
  absl::StatusOr<ReplaySetup> setup = LoadForReplay(options, err);
  if (!setup.ok()) {
    err << "error: " << setup.status().message() << "\n";
    return kExitUsage;
  }
  absl::StatusOr<Target> target =
      MakeTarget(WithDefaultSimRoot(options.target, setup->root));
  if (!target.ok()) {
    err << "error: " << target.status().message() << "\n";
    return kExitUsage;
  }
  TempSession session;
  Executor executor(*target->adapter,
                    {session.path(), SecondsToDuration(options.exec_timeout_s),
                     {}});
  ExecutionOutcome outcome =
      executor.Execute(setup->corpora.Resolve(setup->env));
  out << "status: " << StatusName(outcome.status);
  if (outcome.crashed()) out << " signal: " << outcome.signal;
  out << "\n";
  if (!outcome.diagnostic.empty()) err << outcome.diagnostic << "\n";
  return ExitCodeFor(outcome);
}

int CmdTriage(const ReplayOptions &options, std::ostream &out,
              std::ostream &err) {
  absl::StatusOr<ReplaySetup> setup = LoadForReplay(options, err);
  if (!setup.ok()) {
    err << "error: " << setup.status().message() << "\n";
    return kExitUsage;
  }
  absl::StatusOr<Target> target =
      MakeTarget(WithDefaultSimRoot(options.target, setup->root));
  if (!target.ok()) {
    err << "error: " << target.status().message() << "\n";
    return kExitUsage;
  }
  TempSession session;
  Executor executor(*target->adapter,
                    {session.path(), SecondsToDuration(options.exec_timeout_s),
                     {}});
  absl::StatusOr<TriageReport> report =
      TriageCrash(setup->env, setup->corpora, executor);
  if (!report.ok()) {
    err << "error: " << report.status().message() << "\n";
    return kExitFailure;
  }
  out << FormatTriageReport(*report);
  return kExitOk;
}

int CmdStats(const StatsOptions &options, std::ostream &out,
             std::ostream &err) {
  if (options.dirs.size() != 1) {
    err << "error: stats takes exactly one campaign directory\n";
    return kExitUsage;
  }
  OutputLayout layout(options.dirs[0]);
  std::error_code ec;
  if (!fs::is_directory(layout.environment_dir(), ec)) {
    err << "error: " << layout.root().string()
        << " is not a campaign directory\n";
    return kExitUsage;
  }

  // Operator attribution from the environment file names.
  std::map<Operator, size_t> retained;
  size_t environments = 0;
  size_t captured = 0;
  for (const fs::path &file : ListFilesSorted(layout.environment_dir())) {
    auto info = ParseEnvironmentFileName(file.filename().string());
    if (!info) {
      err << "warning: skipping " << file.string() << "\n";
      continue;
    }
    ++environments;
    if (info->op == Operator::kCapture) {
      ++captured;
    } else {
      ++retained[info->op];
    }
  }
  const fs::path recorded_path = layout.stats_dir() / kOperatorsFile;
  if (absl::StatusOr<ByteArray> recorded = ReadFileBytes(recorded_path);
      recorded.ok()) {
    absl::StatusOr<std::map<Operator, size_t>> parsed =
        ParseOperatorsCsv(AsString(*recorded));
    if (!parsed.ok()) {
      err << "warning: " << parsed.status().message() << "\n";
    } else {
      for (Operator op : ReportedOperators()) {
        const size_t a = retained.contains(op) ? retained.at(op) : 0;
        const size_t b = parsed->contains(op) ? parsed->at(op) : 0;
        if (a != b) {
          err << "warning: " << OperatorName(op) << ": " << a
              << " environment files but " << b << " recorded\n";
        }
      }
    }
  } else if (environments > 0) {
    err << "warning: no " << recorded_path.string() << "\n";
  }

  std::string operators = absl::StrCat(kOperatorsHeader, "\n");
  if (environments > 0) {
    absl::StrAppend(&operators, "capture,", captured, "\n");
    for (Operator op : ReportedOperators()) {
      absl::StrAppend(&operators, AbslView(OperatorName(op)), ",",
                      retained.contains(op) ? retained.at(op) : 0, "\n");
    }
  }

  std::string rate = "elapsed_s,execs,execs_per_sec\n";
  std::string coverage = "elapsed_s,bitmap_cells\n";
  const fs::path plot_path = layout.stats_dir() / kPlotDataFile;
  absl::StatusOr<ByteArray> plot = ReadFileBytes(plot_path);
  if (!plot.ok()) {
    err << "warning: no " << plot_path.string() << "\n";
  } else {
    const std::string text = AsString(*plot);
    std::vector<std::string_view> rows = Split(text, '\n');
    for (size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].empty()) continue;
      absl::StatusOr<StatsSample> s = ParsePlotRow(rows[i]);
      if (!s.ok()) {
        err << "warning: plot_data.csv line " << i + 1 << ": "
            << s.status().message() << "\n";
        continue;
      }
      absl::StrAppend(&rate, absl::StrFormat("%.3f,%d,%.1f\n", s->elapsed_s,
                                             s->execs, s->execs_per_sec));
      absl::StrAppend(&coverage, absl::StrFormat("%.3f,%d\n", s->elapsed_s,
                                                 s->bitmap_cells));
    }
  }

  const std::vector<std::pair<std::string, std::string>> tables = {
      {"operators.csv", operators},
      {"execs_per_sec.csv", rate},
      {"coverage.csv", coverage}};
  if (options.csv_dir) {
    fs::create_directories(*options.csv_dir, ec);
    for (const auto &[name, body] : tables) {
      if (absl::Status s = WriteFileAtomic(*options.csv_dir / name, body);
          !s.ok()) {
        err << "error: " << s.message() << "\n";
        return kExitFailure;
      }
    }
  } else {
    for (size_t i = 0; i < tables.size(); ++i) {
      if (i > 0) out << "\n";
      out << "# " << tables[i].first << "\n" << tables[i].second;
    }
  }
  return kExitOk;
}

int CmdFixtures(const std::string &name, const fs::path &root,
                const std::optional<fs::path> &seeds_dir, std::ostream &out,
                std::ostream &err) {
  absl::StatusOr<std::shared_ptr<const fixtures::FixtureTarget>> fixture =
      fixtures::MakeFixture(name, root);
  if (!fixture.ok()) {
    err << "error: " << fixture.status().message() << "\n";
    return kExitUsage;
  }
  if (absl::Status s = (*fixture)->Materialize(); !s.ok()) {
    err << "error: " << s.message() << "\n";
    return kExitFailure;
  }
  for (const fixtures::FixtureFile &file : (*fixture)->ResourceFiles()) {
    out << (*fixture)->ResourcePath(file.relative_path).string() << "\n";
  }
  if (seeds_dir) {
    std::error_code ec;
    fs::create_directories(*seeds_dir, ec);
    std::vector<ByteArray> seeds = (*fixture)->SeedInputs();
    for (size_t i = 0; i < seeds.size(); ++i) {
      const fs::path path = *seeds_dir / absl::StrCat("seed-", i);
      if (absl::Status s = WriteFileAtomic(path, ByteSpan(seeds[i])); !s.ok()) {
        err << "error: " << s.message() << "\n";
        return kExitFailure;
      }
      out << path.string() << "\n";
    }
  }
  return kExitOk;
}

}  // namespace envsynth::cli
