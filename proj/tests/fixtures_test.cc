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

#include "envsynth/fixtures.h"

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "envsynth/executor.h"
#include "envsynth/simulated.h"
#include "gtest/gtest.h"
#include "./exhaustive.h"
#include "./test_util.h"

namespace envsynth {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

std::string Le32(uint32_t v) {
  std::string s;
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>(v >> (8 * i)));
  return s;
}
std::string Le16(uint16_t v) {
  return {static_cast<char>(v), static_cast<char>(v >> 8)};
}
std::string Db(uint32_t count, std::vector<uint32_t> values) {
  std::string s = "EDB1" + Le32(count);
  for (uint32_t v : values) s += Le32(v);
  return s;
}
std::string Media(uint16_t version, uint16_t frames, uint16_t size,
                  size_t payload) {
  return "MSTR" + Le16(version) + Le16(frames) + Le16(size) +
         std::string(payload, 'p');
}
const std::string kB64(32, 'A');
std::string Key(std::string begin, std::vector<std::string> body,
                std::string end) {
  std::string s = "-----BEGIN " + begin + "-----\n";
  for (const std::string &l : body) s += l + "\n";
  if (!end.empty()) s += end + "\n";
  return s;
}

// Hand-written resource variants: together they reach every guarded cell.
struct Variant {
  std::string file;
  std::string content;
};
std::vector<Variant> GuardVariants(std::string_view fixture) {
  std::vector<Variant> conf = {
      {"etc/app.conf", "noequals\n"},
      {"etc/app.conf", "port=abc\n"},
      {"etc/app.conf", "port=70000\n"},
      {"etc/app.conf", "max_clients=0\n"},
      {"etc/app.conf", "other=1\n"},
      {"etc/app.conf", std::string(15, 'k') + "=1\n"},
      {"etc/app.conf", std::string(16, 'k') + "=1\n"},
  };
  const std::string db = "var/lib/app/records.db";
  std::vector<Variant> dbs = {
      {db, "EDB"},
      {db, "XDB1" + Le32(1) + Le32(1)},
      {db, Db(5, {1, 2, 3})},
      {db, Db(1, {1, 2})},
      {db, Db(1, {2000})},
      {db, Db(4, {1, 2, 3, 4})},
  };
  if (fixture == "config-parser") return conf;
  if (fixture == "db-reader") return dbs;
  if (fixture == "server") {
    conf.insert(conf.end(), dbs.begin(), dbs.end());
    return conf;
  }
  const std::string key = "etc/ssl/server.key";
  if (fixture == "key-parser") {
    return {
        {key, "garbage\n"},
        {key, Key("K", {"short"}, "-----END K-----")},
        {key, Key("K", {std::string(31, 'A') + "!"}, "-----END K-----")},
        {key, Key("K", {kB64, kB64, kB64}, "-----END K-----")},
        {key, Key("K", {kB64}, "")},
        {key, Key("K", {kB64}, "-----END K")},
        {key, Key("K", {kB64}, "-----END K-----") + "trailer\n"},
    };
  }
  const std::string media = "srv/media/stream.bin";
  return {
      {media, "MSTR"},
      {media, "XXXX" + std::string(8, '\0')},
      {media, Media(2, 1, 1, 1)},
      {media, Media(1, 0, 1, 1)},
      {media, Media(1, 1, 65, 65)},
      {media, Media(1, 1, 1, 5)},
  };
}

// A resource that triggers the planted bug.
Variant CrashVariant(std::string_view fixture) {
  if (fixture == "config-parser") {
    return {"etc/app.conf", std::string(17, 'k') + "=1\n"};
  }
  if (fixture == "db-reader" || fixture == "server") {
    return {"var/lib/app/records.db", Db(0, {})};
  }
  if (fixture == "key-parser") {
    return {"etc/ssl/server.key", Key("A", {kB64}, "-----END B-----")};
  }
  return {"srv/media/stream.bin", Media(1, 4, 8, 31)};
}

class FixturesTest : public ::testing::TestWithParam<std::string> {
 protected:
  void SetUp() override {
    auto f = fixtures::MakeFixture(GetParam(), dir_ / "host");
    ASSERT_TRUE(f.ok());
    fixture_ = *f;
    ASSERT_TRUE(fixture_->Materialize().ok());
    adapter_ = std::make_unique<SimulatedAdapter>(fixture_);
  }

  ExecutionOutcome RunWith(const Variant &v, std::string_view input) {
    ResolvedEnvironment env;
    env.input = ShareBytes(AsBytes(input));
    env.resources.emplace_back(
        MakeResourceId(fixture_->ResourcePath(v.file).string()),
        ShareBytes(AsBytes(v.content)));
    Executor executor(*adapter_, SessionOptions());
    return executor.Execute(env);
  }

  ExecutorOptions SessionOptions() const {
    ExecutorOptions o;
    o.session_dir = dir_ / "session";
    return o;
  }

  TempDir dir_;
  std::shared_ptr<const fixtures::FixtureTarget> fixture_;
  std::unique_ptr<SimulatedAdapter> adapter_;
};

TEST_P(FixturesTest, OriginalsNeverCrashAndGuardsStayShut) {
  testing::ExhaustiveResult r =
      testing::RunExhaustive(*adapter_, dir_ / "session", 2);
  EXPECT_EQ(r.runs, 1u + 256u + 65536u);
  EXPECT_EQ(r.crashes, 0u);
  EXPECT_EQ(r.other, 0u);
  for (size_t cell : fixture_->ResourceGuardedCells()) {
    EXPECT_FALSE(r.cells.contains(cell)) << "cell 0x" << std::hex << cell;
  }
  EXPECT_GT(r.cells.size(), 3u);
}

TEST_P(FixturesTest, VariantsReachEveryGuardedCell) {
  std::set<size_t> reached;
  for (const Variant &v : GuardVariants(GetParam())) {
    ExecutionOutcome out = RunWith(v, "");
    ASSERT_EQ(out.status, ExecutionStatus::kOk) << v.content;
    for (size_t i = 0; i < out.coverage.size(); ++i) {
      if (out.coverage[i] != 0) reached.insert(i);
    }
  }
  for (size_t cell : fixture_->ResourceGuardedCells()) {
    EXPECT_TRUE(reached.contains(cell)) << "cell 0x" << std::hex << cell;
  }
}

TEST_P(FixturesTest, CraftedResourceTriggersPlantedBug) {
  for (const auto &input : fixture_->SeedInputs()) {
    ExecutionOutcome out = RunWith(CrashVariant(GetParam()), AsString(input));
    EXPECT_EQ(out.status, ExecutionStatus::kCrash);
    EXPECT_EQ(out.signal, fixture_->PlantedSignal());
  }
}

TEST_P(FixturesTest, SeedsRunCleanAndReadEveryResource) {
  for (const auto &input : fixture_->SeedInputs()) {
    ExecutionOutcome out =
        CaptureRun(*adapter_, input, dir_ / "session", {}, std::chrono::seconds(1));
    EXPECT_EQ(out.status, ExecutionStatus::kOk);
    EXPECT_EQ(out.accessed.size(), fixture_->ResourceFiles().size());
  }
}

INSTANTIATE_TEST_SUITE_P(All, FixturesTest,
                         ::testing::ValuesIn(fixtures::FixtureNames()),
                         [](const auto &info) {
                           std::string n = info.param;
                           std::replace(n.begin(), n.end(), '-', '_');
                           return n;
                         });

TEST(FixtureNamesTest, PlantedSubset) {
  EXPECT_EQ(fixtures::PlantedBugFixtureNames().size(), 4u);
  for (const std::string &n : fixtures::PlantedBugFixtureNames()) {
    EXPECT_TRUE(fixtures::MakeFixture(n, "/tmp").ok());
  }
  EXPECT_FALSE(fixtures::MakeFixture("nope", "/tmp").ok());
}

}  // namespace
}  // namespace envsynth
