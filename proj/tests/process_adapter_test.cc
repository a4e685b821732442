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

#include "envsynth/process_adapter.h"

#include <stdlib.h>

#include <chrono>
#include <csignal>
#include <filesystem>
#include <string>

#include "envsynth/executor.h"
#include "envsynth/util.h"
#include "gtest/gtest.h"
#include "./test_util.h"

namespace envsynth {
namespace {

namespace fs = std::filesystem;
using namespace std::chrono_literals;
using testing::ReadText;
using testing::TempDir;
using testing::WriteText;

class ProcessAdapterTest : public ::testing::Test {
 protected:
  std::unique_ptr<ProcessAdapter> Adapter(bool input_file = false) {
    ProcessAdapterOptions o;
    o.argv = {PROCESS_FIXTURE};
    if (input_file) o.argv.push_back("@@");
    auto a = ProcessAdapter::Create(o);
    EXPECT_TRUE(a.ok()) << a.status();
    return std::move(*a);
  }
  Executor MakeExecutor(TargetAdapter &adapter, Duration timeout = 5s) {
    ExecutorOptions o;
    o.session_dir = dir_ / "session";
    o.timeout = timeout;
    o.blocklist = {"*/etc/hosts"};
    return Executor(adapter, o);
  }
  ResolvedEnvironment Env(std::string program) {
    ResolvedEnvironment env;
    env.input = ShareBytes(AsBytes(program));
    return env;
  }

  TempDir dir_;
};

TEST_F(ProcessAdapterTest, NormalExitHasCoverage) {
  auto adapter = Adapter();
  Executor ex = MakeExecutor(*adapter);
  ExecutionOutcome out = ex.Execute(Env("exit 0\n"));
  EXPECT_EQ(out.status, ExecutionStatus::kOk);
  EXPECT_EQ(out.coverage[1], 1);
  EXPECT_EQ(out.coverage.CountNonZero(), 1u);
  // A nonzero exit code is not a crash.
  EXPECT_EQ(ex.Execute(Env("exit 3\n")).status, ExecutionStatus::kOk);
}

TEST_F(ProcessAdapterTest, CoverageIsZeroedBetweenRuns) {
  auto adapter = Adapter();
  Executor ex = MakeExecutor(*adapter);
  ExecutionOutcome a = ex.Execute(Env("write /dev/null x\n"));
  EXPECT_EQ(a.coverage[3], 1);
  ExecutionOutcome b = ex.Execute(Env(""));
  EXPECT_EQ(b.coverage[3], 0);
  EXPECT_EQ(b.coverage[1], 1);
}

TEST_F(ProcessAdapterTest, FatalSignalsAreCrashes) {
  auto adapter = Adapter();
  Executor ex = MakeExecutor(*adapter);
  for (int sig : {SIGSEGV, SIGABRT, SIGFPE, SIGILL, SIGBUS}) {
    ExecutionOutcome out = ex.Execute(Env("crash " + std::to_string(sig) + "\n"));
    EXPECT_EQ(out.status, ExecutionStatus::kCrash) << sig;
    EXPECT_EQ(out.signal, sig);
    EXPECT_EQ(out.coverage[4], 1);
  }
  // SIGTERM is not a crash signal.
  EXPECT_EQ(ex.Execute(Env("crash 15\n")).status, ExecutionStatus::kOk);
}

TEST_F(ProcessAdapterTest, HangIsKilledAfterTimeout) {
  auto adapter = Adapter();
  Executor ex = MakeExecutor(*adapter, 200ms);
  ExecutionOutcome out = ex.Execute(Env("hang\n"));
  EXPECT_EQ(out.status, ExecutionStatus::kHang);
  EXPECT_GE(out.elapsed, Duration(200ms));
  EXPECT_LT(out.elapsed, Duration(5s));
}

TEST_F(ProcessAdapterTest, SpawnFailureIsSetupError) {
  ProcessAdapterOptions o;
  o.argv = {(dir_ / "missing-binary").string()};
  auto adapter = ProcessAdapter::Create(o);
  ASSERT_TRUE(adapter.ok());
  Executor ex = MakeExecutor(**adapter);
  EXPECT_EQ(ex.Execute(Env("")).status, ExecutionStatus::kSetupError);
  EXPECT_FALSE(ProcessAdapter::Create(ProcessAdapterOptions{}).ok());
}

TEST_F(ProcessAdapterTest, InputFileArgument) {
  auto adapter = Adapter(/*input_file=*/true);
  Executor ex = MakeExecutor(*adapter);
  EXPECT_EQ(ex.Execute(Env("crash 11\n")).signal, SIGSEGV);
}

TEST_F(ProcessAdapterTest, FuzzingModeSubstitutesAndRedirectsWrites) {
  const fs::path conf = dir_ / "host" / "app.conf";
  WriteText(conf, "original");
  auto adapter = Adapter();
  Executor ex = MakeExecutor(*adapter);
  ResolvedEnvironment env = Env("read " + conf.string() + "\nwrite " +
                                conf.string() + " clobbered\nread " +
                                conf.string() + "\n");
  env.resources.emplace_back(MakeResourceId(conf.string()),
                             ShareBytes(AsBytes("fuzzed")));
  ExecutionOutcome out = ex.Execute(env);
  ASSERT_EQ(out.status, ExecutionStatus::kOk);
  EXPECT_EQ(ReadText(dir_ / "session" / "observed"), "fuzzed\nclobbered\n");
  EXPECT_EQ(ReadText(conf), "original");
  // Different resource bytes, different coverage.
  fs::remove(dir_ / "session" / "observed");
  env.resources[0].second = ShareBytes(AsBytes("other"));
  ExecutionOutcome other = ex.Execute(env);
  EXPECT_FALSE(other.coverage == out.coverage);
  // And the same bytes reproduce it exactly.
  env.resources[0].second = ShareBytes(AsBytes("fuzzed"));
  EXPECT_TRUE(ex.Execute(env).coverage == out.coverage);
}

TEST_F(ProcessAdapterTest, CaptureModeThroughAccessLog) {
  const fs::path a = dir_ / "host" / "a.cfg";
  const fs::path b = dir_ / "host" / "b.db";
  const fs::path hosts = dir_ / "host" / "etc" / "hosts";
  WriteText(a, "alpha");
  WriteText(b, std::string("be\0ta", 5));
  WriteText(hosts, "127.0.0.1 localhost\n");
  // Reached through a symlink the first time.
  fs::create_symlink(a, dir_ / "host" / "link");
  auto adapter = Adapter();
  Executor ex = MakeExecutor(*adapter);
  ExecutionOutcome out = ex.Capture(AsBytes(
      "read " + (dir_ / "host" / "link").string() + "\nread " + b.string() +
      "\nread " + a.string() + "\nread " + hosts.string() + "\n"));
  ASSERT_EQ(out.status, ExecutionStatus::kOk);
  ASSERT_EQ(out.accessed.size(), 2u);
  EXPECT_EQ(out.accessed[0].resource.canonical_path(), a.string());
  EXPECT_EQ(out.accessed[1].resource.canonical_path(), b.string());
  EXPECT_EQ(ReadText(out.accessed[0].captured_copy), "alpha");
  EXPECT_EQ(ReadText(out.accessed[1].captured_copy), std::string("be\0ta", 5));
  // The runtime's id tags agree with ours.
  const std::string log = ReadText(dir_ / "session" / "access.log");
  EXPECT_EQ(log, FormatAccessLogLine(out.accessed[0].resource.id_tag(),
                                     a.string(),
                                     out.accessed[0].captured_copy.string()) +
                     FormatAccessLogLine(out.accessed[1].resource.id_tag(),
                                         b.string(),
                                         out.accessed[1].captured_copy.string()));
}

TEST_F(ProcessAdapterTest, OverridesInheritedVariables) {
  setenv(kManifestEnvVar, "/nonexistent/manifest", 1);
  const fs::path conf = dir_ / "host" / "c";
  WriteText(conf, "orig");
  auto adapter = Adapter();
  Executor ex = MakeExecutor(*adapter);
  ResolvedEnvironment env = Env("read " + conf.string() + "\n");
  env.resources.emplace_back(MakeResourceId(conf.string()),
                             ShareBytes(AsBytes("subst")));
  ASSERT_EQ(ex.Execute(env).status, ExecutionStatus::kOk);
  EXPECT_EQ(ReadText(dir_ / "session" / "observed"), "subst\n");
  unsetenv(kManifestEnvVar);
}

}  // namespace
}  // namespace envsynth
