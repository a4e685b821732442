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

#ifndef ENVSYNTH_CORPUS_H_
#define ENVSYNTH_CORPUS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "envsynth/defs.h"
#include "envsynth/resource_id.h"

namespace envsynth {

enum class CopyOrigin { kCaptured, kFuzzed, kSwitched };

// One byte-content variant of a resource. `seed_index` is its position in
// the resource's corpus; the captured original is always index 0.
struct ResourceCopy {
  ResourceId resource;
  SharedBytes content;
  CopyOrigin origin = CopyOrigin::kCaptured;
  size_t seed_index = 0;
};

enum class InputProvenance { kInitial, kSynced, kPromoted };

// Opaque program input. The bytes are never reinterpreted.
struct InputSeed {
  SharedBytes content;
  size_t seed_index = 0;
  InputProvenance provenance = InputProvenance::kInitial;
  // Original file name (initial or synced inputs); informational.
  std::string source_name;
};

// How an environment was derived from its parent.
enum class Operator {
  kCapture,
  kFuzzResource,    // OP#1
  kSwitchResource,  // OP#2
  kSwitchInput,     // OP#3
  kFuzzInput,       // input-only control; not an environment operator
};
std::string_view OperatorName(Operator op);
std::optional<Operator> ParseOperatorName(std::string_view name);

struct Lineage {
  size_t parent = 0;
  Operator op = Operator::kCapture;
  friend bool operator==(const Lineage &, const Lineage &) = default;
};

// S(t, R): one input plus one copy per accessed resource. References are
// indices into the owning CorpusSet.
struct EnvironmentSeed {
  size_t input = 0;
  std::map<ResourceId, size_t> resources;
  std::optional<Lineage> lineage;
  size_t env_index = 0;

  Operator op() const {
    return lineage ? lineage->op : Operator::kCapture;
  }
};

// Same input and same resource copies; ignores lineage and env_index.
bool SameComposition(const EnvironmentSeed &a, const EnvironmentSeed &b);

struct CrashRecord {
  EnvironmentSeed env;
  int signal = 0;
  uint64_t coverage_hash = 0;
  // Number of executions that hit this (signal, coverage_hash) key.
  size_t hits = 1;
  size_t crash_index = 0;
};

// An environment with every reference resolved to bytes, ready for staging.
struct ResolvedEnvironment {
  SharedBytes input;
  std::vector<std::pair<ResourceId, SharedBytes>> resources;
};

// C_Inp, the per-resource corpora, C_Env and the crashing environments.
// Append-only: nothing is removed or reordered. Owned by one coordinator.
class CorpusSet {
 public:
  using ResourceCorpus = std::vector<ResourceCopy>;

  const std::vector<InputSeed> &inputs() const { return inputs_; }
  const std::map<ResourceId, ResourceCorpus> &resource_corpora() const {
    return resource_corpora_;
  }
  const std::vector<EnvironmentSeed> &environments() const {
    return environments_;
  }
  const std::vector<CrashRecord> &crashes() const { return crashes_; }

  size_t AddInput(SharedBytes content, InputProvenance provenance,
                  std::string source_name = {});

  bool HasResourceCorpus(const ResourceId &id) const;
  const ResourceCorpus &resource_corpus(const ResourceId &id) const;
  // Creates C_r with `captured` as seed 0. The corpus must not exist yet.
  const ResourceCopy &CreateResourceCorpus(const ResourceId &id,
                                           SharedBytes captured);
  // Appends to an existing C_r and returns the new copy.
  const ResourceCopy &AddResourceCopy(const ResourceId &id,
                                      SharedBytes content, CopyOrigin origin);
  size_t NextCopyIndex(const ResourceId &id) const;
  const ResourceCopy &copy(const ResourceId &id, size_t seed_index) const;
  // Resource whose id_tag is `id_tag`, if any. Ambiguous on tag collision;
  // returns the first in path order.
  const ResourceId *FindByIdTag(uint64_t id_tag) const;

  // Appends to C_Env, assigning env_index. All references must resolve.
  const EnvironmentSeed &AddEnvironment(EnvironmentSeed env);
  CrashRecord &AddCrash(EnvironmentSeed env, int signal,
                        uint64_t coverage_hash);
  CrashRecord *FindCrash(int signal, uint64_t coverage_hash);

  // `pending` supplies a copy that is not (yet) in its corpus;
  // `pending_input` likewise replaces the input reference.
  ResolvedEnvironment Resolve(const EnvironmentSeed &env,
                              const ResourceCopy *pending = nullptr,
                              SharedBytes pending_input = nullptr) const;

  // Every reference of every environment and crash resolves.
  absl::Status CheckReferentialClosure() const;
  absl::Status CheckEnvironment(const EnvironmentSeed &env) const;

 private:
  std::vector<InputSeed> inputs_;
  std::map<ResourceId, ResourceCorpus> resource_corpora_;
  std::vector<EnvironmentSeed> environments_;
  std::vector<CrashRecord> crashes_;
};

}  // namespace envsynth

#endif  // ENVSYNTH_CORPUS_H_
