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

#include "envsynth/corpus.h"

#include <string>

#include "absl/strings/str_cat.h"
#include "glog/logging.h"

namespace envsynth {

std::string_view OperatorName(Operator op) {
  switch (op) {
    case Operator::kCapture:
      return "capture";
    case Operator::kFuzzResource:
      return "fuzz-resource";
    case Operator::kSwitchResource:
      return "switch-resource";
    case Operator::kSwitchInput:
      return "switch-input";
    case Operator::kFuzzInput:
      return "fuzz-input";
  }
  return "unknown";
}

std::optional<Operator> ParseOperatorName(std::string_view name) {
  for (Operator op : {Operator::kCapture, Operator::kFuzzResource,
                      Operator::kSwitchResource, Operator::kSwitchInput,
                      Operator::kFuzzInput}) {
    if (OperatorName(op) == name) return op;
  }
  return std::nullopt;
}

bool SameComposition(const EnvironmentSeed &a, const EnvironmentSeed &b) {
  return a.input == b.input && a.resources == b.resources;
}

size_t CorpusSet::AddInput(SharedBytes content, InputProvenance provenance,
                           std::string source_name) {
  CHECK(content != nullptr);
  InputSeed seed;
  seed.content = std::move(content);
  seed.seed_index = inputs_.size();
  seed.provenance = provenance;
  seed.source_name = std::move(source_name);
  inputs_.push_back(std::move(seed));
  return inputs_.back().seed_index;
}

bool CorpusSet::HasResourceCorpus(const ResourceId &id) const {
  return resource_corpora_.contains(id);
}

const CorpusSet::ResourceCorpus &CorpusSet::resource_corpus(
    const ResourceId &id) const {
  auto it = resource_corpora_.find(id);
  CHECK(it != resource_corpora_.end()) << "no corpus for " << id.canonical_path();
  return it->second;
}

const ResourceCopy &CorpusSet::CreateResourceCorpus(const ResourceId &id,
                                                    SharedBytes captured) {
  CHECK(captured != nullptr);
  auto [it, inserted] = resource_corpora_.try_emplace(id);
  CHECK(inserted) << "corpus already exists for " << id.canonical_path();
  it->second.push_back(ResourceCopy{id, std::move(captured),
                                    CopyOrigin::kCaptured, 0});
  return it->second.back();
}

const ResourceCopy &CorpusSet::AddResourceCopy(const ResourceId &id,
                                               SharedBytes content,
                                               CopyOrigin origin) {
  CHECK(content != nullptr);
  CHECK(origin != CopyOrigin::kCaptured) << "captured copy must be seed 0";
  auto it = resource_corpora_.find(id);
  CHECK(it != resource_corpora_.end()) << "no corpus for " << id.canonical_path();
  ResourceCorpus &corpus = it->second;
  corpus.push_back(ResourceCopy{id, std::move(content), origin, corpus.size()});
  return corpus.back();
}

size_t CorpusSet::NextCopyIndex(const ResourceId &id) const {
  return resource_corpus(id).size();
}

const ResourceCopy &CorpusSet::copy(const ResourceId &id,
                                    size_t seed_index) const {
  const ResourceCorpus &corpus = resource_corpus(id);
  CHECK_LT(seed_index, corpus.size()) << id.canonical_path();
  return corpus[seed_index];
}

const ResourceId *CorpusSet::FindByIdTag(uint64_t id_tag) const {
  for (const auto &[id, corpus] : resource_corpora_) {
    if (id.id_tag() == id_tag) return &id;
  }
  return nullptr;
}

absl::Status CorpusSet::CheckEnvironment(const EnvironmentSeed &env) const {
  if (env.input >= inputs_.size()) {
    return absl::FailedPreconditionError(
        absl::StrCat("environment references missing input ", env.input));
  }
  for (const auto &[id, index] : env.resources) {
    auto it = resource_corpora_.find(id);
    if (it == resource_corpora_.end()) {
      return absl::FailedPreconditionError(absl::StrCat(
          "environment references resource without corpus: ",
          id.canonical_path()));
    }
    if (index >= it->second.size()) {
      return absl::FailedPreconditionError(
          absl::StrCat("environment references missing copy ", index, " of ",
                       id.canonical_path()));
    }
  }
  return absl::OkStatus();
}

const EnvironmentSeed &CorpusSet::AddEnvironment(EnvironmentSeed env) {
  absl::Status status = CheckEnvironment(env);
  CHECK(status.ok()) << status;
  if (env.lineage) {
    CHECK_LT(env.lineage->parent, environments_.size());
  }
  env.env_index = environments_.size();
  environments_.push_back(std::move(env));
  return environments_.back();
}

CrashRecord &CorpusSet::AddCrash(EnvironmentSeed env, int signal,
                                 uint64_t coverage_hash) {
  absl::Status status = CheckEnvironment(env);
  CHECK(status.ok()) << status;
  CrashRecord record;
  record.env = std::move(env);
  record.signal = signal;
  record.coverage_hash = coverage_hash;
  record.crash_index = crashes_.size();
  crashes_.push_back(std::move(record));
  return crashes_.back();
}

CrashRecord *CorpusSet::FindCrash(int signal, uint64_t coverage_hash) {
  for (CrashRecord &c : crashes_) {
    if (c.signal == signal && c.coverage_hash == coverage_hash) return &c;
  }
  return nullptr;
}

ResolvedEnvironment CorpusSet::Resolve(const EnvironmentSeed &env,
                                       const ResourceCopy *pending,
                                       SharedBytes pending_input) const {
  ResolvedEnvironment resolved;
  if (pending_input != nullptr) {
    resolved.input = std::move(pending_input);
  } else {
    CHECK_LT(env.input, inputs_.size());
    resolved.input = inputs_[env.input].content;
  }
  resolved.resources.reserve(env.resources.size());
  for (const auto &[id, index] : env.resources) {
    if (pending != nullptr && pending->resource == id &&
        pending->seed_index == index) {
      resolved.resources.emplace_back(id, pending->content);
    } else {
      resolved.resources.emplace_back(id, copy(id, index).content);
    }
  }
  return resolved;
}

absl::Status CorpusSet::CheckReferentialClosure() const {
  for (const EnvironmentSeed &env : environments_) {
    if (absl::Status s = CheckEnvironment(env); !s.ok()) {
      return absl::FailedPreconditionError(
          absl::StrCat("environment ", env.env_index, ": ", s.message()));
    }
    if (env.lineage && env.lineage->parent >= env.env_index) {
      return absl::FailedPreconditionError(absl::StrCat(
          "environment ", env.env_index, " has a non-earlier parent"));
    }
  }
  for (const CrashRecord &crash : crashes_) {
    if (absl::Status s = CheckEnvironment(crash.env); !s.ok()) {
      return absl::FailedPreconditionError(
          absl::StrCat("crash ", crash.crash_index, ": ", s.message()));
    }
  }
  for (const auto &[id, corpus] : resource_corpora_) {
    if (corpus.empty() || corpus[0].origin != CopyOrigin::kCaptured) {
      return absl::FailedPreconditionError(absl::StrCat(
          "corpus of ", id.canonical_path(), " lacks a captured seed 0"));
    }
    for (size_t i = 0; i < corpus.size(); ++i) {
      if (corpus[i].seed_index != i || !(corpus[i].resource == id)) {
        return absl::FailedPreconditionError(
            absl::StrCat("corpus of ", id.canonical_path(), " is out of order"));
      }
    }
  }
  return absl::OkStatus();
}

}  // namespace envsynth
