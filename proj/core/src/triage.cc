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

#include "envsynth/triage.h"

#include "absl/strings/str_cat.h"
#include "envsynth/util.h"

namespace envsynth {

absl::StatusOr<TriageReport> TriageCrash(const EnvironmentSeed &env,
                                         const CorpusSet &corpora,
                                         Executor &executor) {
  ExecutionOutcome first = executor.Execute(corpora.Resolve(env));
  if (!first.crashed()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "environment does not reproduce a crash (status ",
        AbslView(StatusName(first.status)), ")"));
  }
  TriageReport report;
  report.signal = first.signal;
  for (const auto &[resource, index] : env.resources) {
    if (index != 0) report.mutated.push_back(resource);
  }
  for (const ResourceId &resource : report.mutated) {
    EnvironmentSeed trial_env = env;
    trial_env.resources[resource] = 0;
    ExecutionOutcome outcome = executor.Execute(corpora.Resolve(trial_env));
    report.trials.push_back({resource, outcome.status, outcome.signal});
    if (outcome.status == ExecutionStatus::kOk) {
      report.implicated.push_back(resource);
    }
  }
  if (report.implicated.empty()) {
    EnvironmentSeed restored = env;
    for (const ResourceId &resource : report.mutated) {
      restored.resources[resource] = 0;
    }
    ExecutionOutcome outcome = executor.Execute(corpora.Resolve(restored));
    if (!report.mutated.empty() && outcome.status == ExecutionStatus::kOk) {
      report.interacting = true;
    } else {
      report.resource_independent = true;
    }
  }
  return report;
}

std::string FormatTriageReport(const TriageReport &report) {
  std::string out = absl::StrCat("crash signal: ", report.signal, "\n");
  absl::StrAppend(&out, "mutated resources: ", report.mutated.size(), "\n");
  for (const SubstitutionTrial &t : report.trials) {
    absl::StrAppend(&out, "  restore ", t.resource.canonical_path(), " -> ",
                    AbslView(StatusName(t.status)));
    if (t.status == ExecutionStatus::kCrash) {
      absl::StrAppend(&out, " (signal ", t.signal, ")");
    }
    absl::StrAppend(&out, "\n");
  }
  if (!report.implicated.empty()) {
    for (const ResourceId &r : report.implicated) {
      absl::StrAppend(&out, "implicated: ", r.canonical_path(), "\n");
    }
  } else if (report.interacting) {
    absl::StrAppend(&out, "interacting set:");
    for (const ResourceId &r : report.mutated) {
      absl::StrAppend(&out, " ", r.canonical_path());
    }
    absl::StrAppend(&out, "\n");
  } else {
    absl::StrAppend(&out,
                    "not resource-induced: crash persists with every "
                    "resource restored\n");
  }
  return out;
}

}  // namespace envsynth
