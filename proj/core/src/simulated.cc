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

#include "envsynth/simulated.h"

#include <exception>
#include <thread>
#include <utility>

#include "absl/strings/str_cat.h"
#include "envsynth/util.h"
#include "glog/logging.h"

namespace envsynth {

namespace {

struct CrashUnwind {
  int signal;
};
struct HangUnwind {};

}  // namespace

TargetContext::TargetContext(const SessionManifest &manifest, ByteSpan input,
                             CoverageBitmap &coverage, Duration timeout,
                             bool redirect_writes)
    : manifest_(manifest),
      paths_{manifest.session_dir},
      input_(input),
      coverage_(coverage),
      deadline_(Clock::now() + timeout),
      redirect_writes_(redirect_writes) {
  for (const Substitution &s : manifest_.substitutions) {
    substitutions_.emplace(s.canonical_path, &s);
  }
}

std::filesystem::path TargetContext::ScratchPath(const ResourceId &id) const {
  return paths_.scratch_dir() / id.id_tag_hex();
}

std::optional<ByteArray> TargetContext::ReadFile(std::string_view path) {
  if (path.empty()) return std::nullopt;
  const ResourceId id = MakeResourceId(path);
  const std::string &canonical = id.canonical_path();

  // The target's own writes of this execution take precedence.
  if (written_.contains(canonical)) {
    absl::StatusOr<ByteArray> bytes = ReadFileBytes(ScratchPath(id));
    if (bytes.ok()) return std::move(*bytes);
    return std::nullopt;
  }
  if (MatchesAnyGlob(manifest_.blocklist, canonical)) {
    absl::StatusOr<ByteArray> bytes = ReadFileBytes(canonical);
    if (bytes.ok()) return std::move(*bytes);
    return std::nullopt;
  }

  if (manifest_.mode == RuntimeMode::kFuzzing) {
    auto it = substitutions_.find(canonical);
    const std::string &source =
        it == substitutions_.end() ? canonical : it->second->substitute_path;
    absl::StatusOr<ByteArray> bytes = ReadFileBytes(source);
    if (bytes.ok()) return std::move(*bytes);
    return std::nullopt;
  }

  // Capture mode: copy the original once, hand back the original.
  absl::StatusOr<ByteArray> bytes = ReadFileBytes(canonical);
  if (!bytes.ok()) return std::nullopt;
  if (captured_.insert(canonical).second) {
    const std::filesystem::path copy = paths_.captured_dir() / id.id_tag_hex();
    const bool copied = WriteFileBytes(copy, *bytes).ok();
    absl::Status s = AppendLineAtomic(
        paths_.access_log(),
        FormatAccessLogLine(id.id_tag(), canonical,
                            copied ? copy.string() : kCaptureFailedMarker));
    if (!s.ok()) LOG(WARNING) << s;
  }
  return std::move(*bytes);
}

bool TargetContext::WriteFile(std::string_view path, ByteSpan data) {
  if (path.empty()) return false;
  const ResourceId id = MakeResourceId(path);
  if (!redirect_writes_) {
    return WriteFileBytes(id.canonical_path(), data).ok();
  }
  if (!WriteFileBytes(ScratchPath(id), data).ok()) return false;
  written_.insert(id.canonical_path());
  return true;
}

void TargetContext::Crash(int signal) { throw CrashUnwind{signal}; }

void TargetContext::Sleep(Duration duration) {
  const auto now = Clock::now();
  if (now + duration >= deadline_) {
    std::this_thread::sleep_until(deadline_);
    throw HangUnwind{};
  }
  std::this_thread::sleep_for(duration);
}

SimulatedAdapter::SimulatedAdapter(std::shared_ptr<const SimulatedTarget> target)
    : target_(std::move(target)) {
  CHECK(target_ != nullptr);
}

ExecutionOutcome SimulatedAdapter::Run(const SessionManifest &manifest,
                                       ByteSpan input, Duration timeout) {
  ExecutionOutcome outcome;
  const auto start = Clock::now();
  TargetContext ctx(manifest, input, outcome.coverage, timeout,
                    redirect_writes_);
  try {
    target_->Run(ctx);
    outcome.status = ExecutionStatus::kOk;
  } catch (const CrashUnwind &crash) {
    outcome.status = ExecutionStatus::kCrash;
    outcome.signal = crash.signal;
  } catch (const HangUnwind &) {
    outcome.status = ExecutionStatus::kHang;
  } catch (const std::exception &e) {
    outcome.status = ExecutionStatus::kSetupError;
    outcome.diagnostic = absl::StrCat("simulated target threw: ", e.what());
  }
  outcome.elapsed = Clock::now() - start;
  return outcome;
}

std::string SimulatedAdapter::Describe() const {
  return absl::StrCat("sim:", target_->name());
}

}  // namespace envsynth
