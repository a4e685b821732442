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

#include <csignal>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "./commands.h"
#include "glog/logging.h"

namespace {

std::atomic<bool> abort_requested{false};

void RequestAbort(int) { abort_requested.store(true); }

void AddTargetFlags(CLI::App *cmd, envsynth::cli::TargetOptions &target,
                    bool required) {
  cmd->add_option("--target", target.target,
                  "sim:<fixture> or a command line (\"@@\" = input file)")
      ->required(required);
  cmd->add_option("--sim-root", target.sim_root,
                  "root directory of a simulated fixture's files");
  cmd->add_option("--interposer", target.interposer,
                  "runtime library to preload into the target");
  cmd->add_flag("--show-output", target.forward_output,
                "keep the target's stdout and stderr");
}

}  // namespace

int main(int argc, char **argv) {
  google::InitGoogleLogging(argv[0]);
  FLAGS_logtostderr = true;
  FLAGS_minloglevel = google::WARNING;

  CLI::App app{"Coverage-guided environment synthesis fuzzer"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "log informational messages");

  namespace cli = envsynth::cli;

  cli::FuzzOptions fuzz;
  CLI::App *fuzz_cmd = app.add_subcommand("fuzz", "run a campaign");
  fuzz_cmd->set_config("--config", "", "key = value file with flag defaults");
  AddTargetFlags(fuzz_cmd, fuzz.target, /*required=*/true);
  fuzz_cmd->add_option("--in", fuzz.in_dir, "directory of initial inputs");
  fuzz_cmd->add_option("--out", fuzz.out_dir, "campaign output directory")
      ->required();
  fuzz_cmd->add_option("--time", fuzz.time_s,
                       "campaign budget in seconds (0 = capture only)");
  fuzz_cmd->add_option("--exec-timeout", fuzz.exec_timeout_s,
                       "per-execution timeout in seconds")
      ->check(CLI::PositiveNumber);
  fuzz_cmd->add_option("--sync-dir", fuzz.sync_dir,
                       "queue directory of an input fuzzer to import from");
  fuzz_cmd->add_option("--sync-interval", fuzz.sync_interval_s,
                       "seconds between sync polls");
  fuzz_cmd->add_option("--block", fuzz.block,
                       "glob of resource paths never to fuzz (repeatable)");
  fuzz_cmd->add_option("--weights", fuzz.weights,
                       "fuzz-resource,switch-resource,switch-input "
                       "probabilities");
  fuzz_cmd->add_option("--energy-base", fuzz.energy_base,
                       "executions per selected seed before scaling");
  fuzz_cmd->add_option("--energy-cap", fuzz.energy_cap,
                       "maximum executions per selected seed");
  fuzz_cmd->add_option("--seed", fuzz.seed, "random seed");
  fuzz_cmd->add_option("--max-execs", fuzz.max_execs, "execution budget");
  fuzz_cmd->add_option("--session-dir", fuzz.session_dir,
                       "scratch directory for staged resources");
  fuzz_cmd->add_flag("--resume", fuzz.resume, "continue the campaign in --out");
  fuzz_cmd->add_flag("--input-only", fuzz.input_only,
                     "mutate only program inputs (baseline)");
  fuzz_cmd->add_flag("-q,--quiet", fuzz.quiet, "no status lines");

  cli::ReplayOptions replay;
  CLI::App *replay_cmd =
      app.add_subcommand("replay", "run one environment file once");
  AddTargetFlags(replay_cmd, replay.target, /*required=*/true);
  replay_cmd->add_option("env_file", replay.env_file, "environment file")
      ->required();
  replay_cmd->add_option("--root", replay.root, "campaign directory");
  replay_cmd->add_option("--exec-timeout", replay.exec_timeout_s,
                         "timeout in seconds")
      ->check(CLI::PositiveNumber);

  cli::ReplayOptions triage;
  CLI::App *triage_cmd = app.add_subcommand(
      "triage", "find the resources a crashing environment depends on");
  AddTargetFlags(triage_cmd, triage.target, /*required=*/true);
  triage_cmd->add_option("env_file", triage.env_file, "crashing environment")
      ->required();
  triage_cmd->add_option("--root", triage.root, "campaign directory");
  triage_cmd->add_option("--exec-timeout", triage.exec_timeout_s,
                         "timeout in seconds")
      ->check(CLI::PositiveNumber);

  cli::StatsOptions stats;
  CLI::App *stats_cmd =
      app.add_subcommand("stats", "print campaign statistics as CSV");
  stats_cmd->add_option("out_dir", stats.dirs, "campaign directory")
      ->required();
  stats_cmd->add_option("--csv-dir", stats.csv_dir,
                        "write the CSV files here instead of stdout");

  std::string fixture_name;
  std::string fixture_root;
  std::optional<std::string> fixture_seeds;
  CLI::App *fixtures_cmd = app.add_subcommand(
      "fixtures", "write a simulated fixture's files and seed inputs");
  fixtures_cmd->add_option("name", fixture_name, "fixture name")->required();
  fixtures_cmd->add_option("--root", fixture_root, "root directory")
      ->required();
  fixtures_cmd->add_option("--seeds", fixture_seeds,
                           "directory for the seed inputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitUsage;
  }
  if (verbose) FLAGS_minloglevel = google::INFO;

  if (fuzz_cmd->parsed()) {
    std::signal(SIGINT, RequestAbort);
    std::signal(SIGTERM, RequestAbort);
    return cli::CmdFuzz(fuzz, std::cout, std::cerr, &abort_requested);
  }
  if (replay_cmd->parsed()) return cli::CmdReplay(replay, std::cout, std::cerr);
  if (triage_cmd->parsed()) return cli::CmdTriage(triage, std::cout, std::cerr);
  if (stats_cmd->parsed()) return cli::CmdStats(stats, std::cout, std::cerr);
  if (fixtures_cmd->parsed()) {
    std::optional<std::filesystem::path> seeds;
    if (fixture_seeds) seeds = *fixture_seeds;
    return cli::CmdFixtures(fixture_name, fixture_root, seeds, std::cout,
                            std::cerr);
  }
  return cli::kExitUsage;
}
