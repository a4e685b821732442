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

#ifndef ENVSYNTH_TRIAGE_H_
#define ENVSYNTH_TRIAGE_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "envsynth/corpus.h"
#include "envsynth/executor.h"

namespace envsynth {

struct SubstitutionTrial {
  ResourceId resource;
  ExecutionStatus status = ExecutionStatus::kOk;
  int signal = 0;
};

struct TriageReport {
  int signal = 0;
  // Resources whose copy differs from the captured original.
  std::vector<ResourceId> mutated;
  // One trial per mutated resource, original copy substituted.
  std::vector<SubstitutionTrial> trials;
  // Resources whose substitution alone turns the crash into a clean run.
  std::vector<ResourceId> implicated;
  // No single substitution helps but restoring all mutated resources does.
  bool interacting = false;
  // Still crashing with every resource restored: the input (or state outside
  // the recorded resources) is responsible.
  bool resource_independent = false;
};

// Verifies that `env` crashes, then restores each mutated resource to copy 0
// in turn. Fails with FailedPrecondition if the crash does not reproduce.
absl::StatusOr<TriageReport> TriageCrash(const EnvironmentSeed &env,
                                         const CorpusSet &corpora,
                                         Executor &executor);

std::string FormatTriageReport(const TriageReport &report);

}  // namespace envsynth

#endif  // ENVSYNTH_TRIAGE_H_
