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

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <csignal>
#include <filesystem>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "envsynth/corpus_store.h"
#include "envsynth/fixtures.h"
#include "envsynth/simulated.h"
#include "gtest/gtest.h"
#include "./discipline.h"
#include "./test_util.h"

namespace envsynth {
namespace {

namespace fs = std::filesystem;
using namespace std::chrono_literals;
using testing::TempDir;

class LambdaTarget : public SimulatedTarget {
 public:
  explicit LambdaTarget(std::function<void(TargetContext &)> fn)
      : fn_(std::move(fn)) {}
  std::string name() const override { return "lambda"; }
  void Run(TargetContext &ctx) const override { fn_(ctx); }

 private:
  std::function<void(TargetContext &)> fn_;
};

class CampaignTest : public ::testing::Test {
 protected:
  std::shared_ptr<const fixtures::FixtureTarget> Fixture(std::string_view name) {
    auto f = fixtures::MakeFixture(name, dir_ / "host");
    EXPECT_TRUE(f.ok());
    EXPECT_TRUE((*f)->Materialize().ok());
    return *f;
  }

  CampaignConfig Config(const fixtures::FixtureTarget *fixture = nullptr) {
    CampaignConfig c;
    c.out_dir = dir_ / "out";
    c.seed = 1;
    if (fixture != nullptr) {
      int i = 0;
      for (const ByteArray &in : fixture->SeedInputs()) {
        c.inputs.push_back({"seed-" + std::to_string(i++), in});
      }
    } else {
      c.inputs.push_back({"seed", AsBytes("x")});
    }
    return c;
  }

  static size_t RetainedTotal(const CampaignSummary &s) {
    size_t n = 0;
    for (const auto &[op, k] : s.retained_by_op) n += k;
    return n;
  }

  TempDir dir_;
};

TEST_F(CampaignTest, ZeroFileTarget) {
  SimulatedAdapter adapter(
      std::make_shared<LambdaTarget>([](TargetContext &ctx) { ctx.Hit(1); }));
  CampaignConfig c = Config();
  c.time_limit = Duration::zero();
  Campaign campaign(c, adapter);
  ASSERT_TRUE(campaign.Run().ok());
  ASSERT_EQ(campaign.corpora().environments().size(), 1u);
  EXPECT_TRUE(campaign.corpora().environments()[0].resources.empty());
  EXPECT_TRUE(campaign.corpora().resource_corpora().empty());
  EXPECT_EQ(testing::Slurp(dir_ / "out/system-level-seeds/id:000000,op:capture"),
            "0\nreplayable-queue/id:000000,orig:seed\n");
}

TEST_F(CampaignTest, TwoInputsShareOneResourceCorpus) {
  auto fixture = Fixture("config-parser");
  SimulatedAdapter adapter(fixture);
  CampaignConfig c = Config(fixture.get());
  c.time_limit = Duration::zero();
  Campaign campaign(c, adapter);
  absl::StatusOr<CampaignSummary> s = campaign.Run();
  ASSERT_TRUE(s.ok()) << s.status();
  EXPECT_EQ(s->execs, 2u);  // capture runs only
  EXPECT_EQ(s->capture_environments, 2u);
  ASSERT_EQ(campaign.corpora().resource_corpora().size(), 1u);
  const auto &[id, corpus] = *campaign.corpora().resource_corpora().begin();
  EXPECT_EQ(id.canonical_path(), fixture->ResourcePath("etc/app.conf").string());
  EXPECT_EQ(corpus.size(), 1u);
  ASSERT_EQ(campaign.corpora().environments().size(), 2u);
  for (size_t i = 0; i < 2; ++i) {
    const EnvironmentSeed &env = campaign.corpora().environments()[i];
    EXPECT_EQ(env.input, i);
    ASSERT_EQ(env.resources.size(), 1u);
    EXPECT_EQ(env.resources.at(id), 0u);
  }
}

TEST_F(CampaignTest, BlocklistAndEnvFileWithTwoResources) {
  auto fixture = Fixture("server");
  SimulatedAdapter adapter(fixture);
  CampaignConfig c = Config(fixture.get());
  c.blocklist = {"*/etc/hosts"};
  c.max_execs = 3000;
  c.time_limit = 60s;
  Campaign campaign(c, adapter);
  ASSERT_TRUE(campaign.Run().ok());
  std::string text =
      testing::Slurp(dir_ / "out/system-level-seeds/id:000000,op:capture");
  EXPECT_TRUE(text.starts_with("2\n")) << text;
  EXPECT_GT(campaign.corpora().environments().size(), 2u);
  for (const EnvironmentSeed &env : campaign.corpora().environments()) {
    EXPECT_EQ(env.resources.size(), 2u);
    for (const auto &[id, n] : env.resources) {
      EXPECT_FALSE(id.canonical_path().ends_with("/etc/hosts"));
    }
  }
  for (const auto &[id, corpus] : campaign.corpora().resource_corpora()) {
    EXPECT_FALSE(id.canonical_path().ends_with("/etc/hosts"));
  }
  EXPECT_TRUE(testing::ClosureViolations(dir_ / "out").empty());
}

TEST_F(CampaignTest, FuzzResourceMutantRetained) {
  auto fixture = Fixture("db-reader");
  SimulatedAdapter adapter(fixture);
  CampaignConfig c = Config(fixture.get());
  c.time_limit = 60s;
  Campaign campaign(c, adapter);
  ASSERT_TRUE(campaign.Initialize().ok());
  const ResourceId db = MakeResourceId(
      fixture->ResourcePath("var/lib/app/records.db").string());
  ASSERT_EQ(campaign.corpora().resource_corpus(db).size(), 1u);
  ASSERT_TRUE(campaign.FuzzRound(0, AssignEnergy(1, EnergyPolicy{})).ok());
  const CampaignSummary &s = campaign.summary();
  EXPECT_GT(s.retained_by_op.at(Operator::kFuzzResource), 0u);
  EXPECT_GT(campaign.corpora().resource_corpus(db).size(), 1u);
  for (size_t i = 2; i < campaign.corpora().environments().size(); ++i) {
    const EnvironmentSeed &env = campaign.corpora().environments()[i];
    ASSERT_TRUE(env.lineage.has_value());
    EXPECT_EQ(env.lineage->parent, 0u);
  }
}

TEST_F(CampaignTest, ResourceBlindTargetRetainsNothing) {
  const fs::path file = dir_ / "host" / "ignored";
  testing::WriteText(file, "content");
  SimulatedAdapter adapter(std::make_shared<LambdaTarget>(
      [file](TargetContext &ctx) {
        ctx.ReadFile(file.string());
        ctx.Hit(ctx.input().empty() ? 10 : 11 + ctx.input()[0] % 4);
      }));
  CampaignConfig c = Config();
  c.max_execs = 2000;
  c.time_limit = 60s;
  Campaign campaign(c, adapter);
  absl::StatusOr<CampaignSummary> s = campaign.Run();
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->execs, 2000u);
  EXPECT_EQ(s->environments, 1u);
  EXPECT_EQ(RetainedTotal(*s), 0u);
}

TEST_F(CampaignTest, CrashPersistedAndReplays) {
  auto fixture = Fixture("db-reader");
  SimulatedAdapter adapter(fixture);
  CampaignConfig c = Config(fixture.get());
  c.stop_on_first_crash = true;
  c.max_execs = 200000;
  c.time_limit = 120s;
  Campaign campaign(c, adapter);
  absl::StatusOr<CampaignSummary> s = campaign.Run();
  ASSERT_TRUE(s.ok());
  ASSERT_EQ(s->crashes, 1u);
  ASSERT_TRUE(s->execs_to_first_crash.has_value());
  std::vector<fs::path> files = ListFilesSorted(dir_ / "out/system-level-seeds/crashes");
  ASSERT_EQ(files.size(), 1u);
  EXPECT_NE(files[0].filename().string().find(",sig:08,"), std::string::npos)
      << files[0];
  EXPECT_TRUE(testing::CheckEnvironmentFile(dir_ / "out",
                                            testing::Slurp(files[0]))
                  .empty());

  absl::StatusOr<LoadedCampaign> loaded = LoadCampaign(dir_ / "out");
  ASSERT_TRUE(loaded.ok());
  absl::StatusOr<EnvironmentSeed> env =
      ParseEnvironmentSeed(files[0], OutputLayout(dir_ / "out"), loaded->corpora);
  ASSERT_TRUE(env.ok()) << env.status();
  Executor executor(adapter, ExecutorOptions{dir_ / "replay", 1s, {}});
  ExecutionOutcome out = executor.Execute(loaded->corpora.Resolve(*env));
  EXPECT_EQ(out.status, ExecutionStatus::kCrash);
  EXPECT_EQ(out.signal, SIGFPE);
}

TEST_F(CampaignTest, InitOnlyWithZeroTime) {
  auto fixture = Fixture("key-parser");
  SimulatedAdapter adapter(fixture);
  CampaignConfig c = Config(fixture.get());
  c.time_limit = Duration::zero();
  absl::StatusOr<CampaignSummary> s = RunCampaign(c, adapter);
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->execs, 2u);
  EXPECT_EQ(s->rounds, 0u);
  EXPECT_EQ(s->environments, 2u);
  EXPECT_EQ(ListFilesSorted(dir_ / "out/system-level-seeds").size(), 2u);
  EXPECT_TRUE(fs::exists(dir_ / "out/stats/plot_data.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out/stats/operators.csv"));
}

TEST_F(CampaignTest, RefusesNonEmptyOutDirUnlessResuming) {
  auto fixture = Fixture("db-reader");
  SimulatedAdapter adapter(fixture);
  CampaignConfig c = Config(fixture.get());
  c.time_limit = Duration::zero();
  ASSERT_TRUE(RunCampaign(c, adapter).ok());
  EXPECT_FALSE(RunCampaign(c, adapter).ok());
  c.resume = true;
  EXPECT_TRUE(RunCampaign(c, adapter).ok());
}

TEST_F(CampaignTest, InvalidConfig) {
  CampaignConfig c;
  EXPECT_FALSE(ValidateConfig(c).ok());
  c = Config();
  EXPECT_TRUE(ValidateConfig(c).ok());
  c.weights = OperatorWeights{0, 0, 0};
  EXPECT_FALSE(ValidateConfig(c).ok());
  c = Config();
  c.inputs.clear();
  EXPECT_FALSE(ValidateConfig(c).ok());
  c = Config();
  c.exec_timeout = Duration::zero();
  EXPECT_FALSE(ValidateConfig(c).ok());
}

TEST_F(CampaignTest, AbortLeavesClosedCorpus) {
  auto fixture = Fixture("server");
  SimulatedAdapter adapter(fixture);
  CampaignConfig c = Config(fixture.get());
  c.session_dir = dir_ / "session";
  std::atomic<bool> abort{false};
  Campaign campaign(c, adapter);
  std::thread stopper([&] {
    std::this_thread::sleep_for(300ms);
    abort = true;
  });
  absl::StatusOr<CampaignSummary> s = campaign.Run(&abort);
  stopper.join();
  ASSERT_TRUE(s.ok());
  EXPECT_GT(s->execs, 10u);
  EXPECT_TRUE(testing::ClosureViolations(dir_ / "out").empty());
  absl::StatusOr<LoadedCampaign> loaded = LoadCampaign(dir_ / "out");
  ASSERT_TRUE(loaded.ok());
  EXPECT_TRUE(loaded->warnings.empty());
  EXPECT_EQ(loaded->corpora.environments().size(), s->environments);
}

// SIGKILL at random points: whatever is on disk must load and be closed.
TEST_F(CampaignTest, KilledCampaignStaysLoadable) {
  for (int delay_ms : {50, 170, 400}) {
    const fs::path out = dir_ / ("kill-" + std::to_string(delay_ms));
    pid_t pid = fork();
    ASSERT_GE(pid, 0);
    if (pid == 0) {
      auto f = fixtures::MakeFixture("server", dir_ / "host");
      if (!f.ok() || !(*f)->Materialize().ok()) _exit(3);
      SimulatedAdapter adapter(*f);
      CampaignConfig c;
      c.out_dir = out;
      c.inputs = {{"a", AsBytes("Gport")}, {"b", AsBytes("A")}};
      c.seed = delay_ms;
      (void)RunCampaign(c, adapter);
      _exit(0);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    kill(pid, SIGKILL);
    int status = 0;
    waitpid(pid, &status, 0);
    if (!fs::exists(out / "system-level-seeds")) continue;
    std::vector<std::string> bad = testing::ClosureViolations(out);
    EXPECT_TRUE(bad.empty()) << bad.front();
    absl::StatusOr<LoadedCampaign> loaded = LoadCampaign(out);
    EXPECT_TRUE(loaded.ok()) << loaded.status();
  }
}

TEST_F(CampaignTest, ResumeIsAppendOnlyAndKeepsCoverage) {
  auto fixture = Fixture("server");
  SimulatedAdapter adapter(fixture);
  CampaignConfig c = Config(fixture.get());
  c.max_execs = 4000;
  c.time_limit = 60s;
  Campaign first(c, adapter);
  absl::StatusOr<CampaignSummary> s1 = first.Run();
  ASSERT_TRUE(s1.ok());
  const VirginMap virgin1 = first.virgin();
  testing::DirSnapshot before = testing::SnapshotCorpus(dir_ / "out");

  c.resume = true;
  c.seed = 2;
  Campaign second(c, adapter);
  ASSERT_TRUE(second.Initialize().ok());
  EXPECT_TRUE(virgin1.IsSubsetOf(second.virgin()));
  EXPECT_EQ(second.corpora().environments().size(), s1->environments);
  absl::StatusOr<CampaignSummary> s2 = second.Run();
  ASSERT_TRUE(s2.ok());
  EXPECT_GE(s2->environments, s1->environments);
  EXPECT_EQ(RetainedTotal(*s2), s2->environments - s2->capture_environments);
  EXPECT_TRUE(testing::AppendOnlyViolations(
                  before, testing::SnapshotCorpus(dir_ / "out"))
                  .empty());
  EXPECT_TRUE(testing::ClosureViolations(dir_ / "out").empty());
}

TEST_F(CampaignTest, SyncedInputGetsEnvironment) {
  auto fixture = Fixture("db-reader");
  SimulatedAdapter adapter(fixture);
  CampaignConfig c = Config(fixture.get());
  c.sync_dir = dir_ / "queue";
  c.time_limit = Duration::zero();
  Campaign campaign(c, adapter);
  ASSERT_TRUE(campaign.Initialize().ok());
  ASSERT_TRUE(campaign.SyncInputs(true).ok());
  EXPECT_EQ(campaign.corpora().inputs().size(), 2u);
  testing::WriteText(dir_ / "queue" / "id:000007,src:000001", "S");
  ASSERT_TRUE(campaign.SyncInputs(true).ok());
  ASSERT_TRUE(campaign.SyncInputs(true).ok());
  EXPECT_EQ(campaign.corpora().inputs().size(), 3u);
  EXPECT_EQ(campaign.corpora().environments().size(), 3u);
  EXPECT_EQ(campaign.corpora().inputs()[2].provenance, InputProvenance::kSynced);
}

TEST_F(CampaignTest, OperatorTotalsMatchFilesAndCsv) {
  auto fixture = Fixture("server");
  SimulatedAdapter adapter(fixture);
  CampaignConfig c = Config(fixture.get());
  c.max_execs = 5000;
  c.time_limit = 60s;
  absl::StatusOr<CampaignSummary> s = RunCampaign(c, adapter);
  ASSERT_TRUE(s.ok());
  std::map<std::string, size_t> names =
      testing::OperatorCountsFromNames(dir_ / "out");
  EXPECT_EQ(names["capture"], s->capture_environments);
  for (Operator op : {Operator::kFuzzResource, Operator::kSwitchResource,
                      Operator::kSwitchInput}) {
    const size_t want =
        s->retained_by_op.contains(op) ? s->retained_by_op.at(op) : 0;
    EXPECT_EQ(names[std::string(OperatorName(op))], want);
  }
  EXPECT_EQ(RetainedTotal(*s), s->environments - s->capture_environments);
  const std::string csv = testing::Slurp(dir_ / "out/stats/operators.csv");
  EXPECT_NE(csv.find("fuzz-resource," +
                     std::to_string(names["fuzz-resource"]) + "\n"),
            std::string::npos)
      << csv;
}

TEST_F(CampaignTest, InputOnlyControlNeverMutatesResources) {
  auto fixture = Fixture("db-reader");
  SimulatedAdapter adapter(fixture);
  CampaignConfig c = Config(fixture.get());
  c.mutate_environment = false;
  c.max_execs = 5000;
  c.time_limit = 60s;
  Campaign campaign(c, adapter);
  absl::StatusOr<CampaignSummary> s = campaign.Run();
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->crashes, 0u);
  for (const auto &[id, corpus] : campaign.corpora().resource_corpora()) {
    EXPECT_EQ(corpus.size(), 1u);
  }
  for (const EnvironmentSeed &env : campaign.corpora().environments()) {
    EXPECT_TRUE(env.op() == Operator::kCapture ||
                env.op() == Operator::kFuzzInput);
  }
}

}  // namespace
}  // namespace envsynth
