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

#ifndef ENVSYNTH_MUTATION_H_
#define ENVSYNTH_MUTATION_H_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "envsynth/corpus.h"
#include "envsynth/defs.h"
#include "envsynth/rng.h"

namespace envsynth {

// Probabilities of the three environment operators.
struct OperatorWeights {
  double fuzz_resource = 0.8;    // OP#1
  double switch_resource = 0.1;  // OP#2
  double switch_input = 0.1;     // OP#3

  absl::Status Validate() const;
};

// Parses "p1,p2,p3".
absl::StatusOr<OperatorWeights> ParseOperatorWeights(std::string_view text);

struct HavocBudget {
  size_t max_stack = 16;
  size_t growth_factor = 4;
  size_t growth_cap = size_t{1} << 20;
  // Small and empty buffers may still grow to this size.
  size_t growth_floor = 64;

  // Largest output size for an input of `size` bytes:
  // min(max(size * growth_factor, growth_floor), growth_cap).
  size_t MaxSize(size_t size) const;
  absl::Status Validate() const;
};

// The havoc primitives fuzz_bytes draws from.
enum class HavocOp {
  kBitFlip,
  kRandomByte,
  kInterestingByte,
  kArith16,
  kArith32,
  kBlockDelete,
  kBlockDuplicate,
  kBlockRandomOverwrite,
  kBlockSelfSplice,
};
inline constexpr size_t kNumHavocOps = 9;

// Applies one primitive in place. Primitives that need a position are no-ops
// on empty content; growth is bounded by `max_size`.
void ApplyHavocOp(HavocOp op, ByteArray &data, size_t max_size, Rng &rng);

// Stacks a uniformly drawn number of primitives in [1, max_stack]. A pure
// function of (content, budget, rng state).
ByteArray FuzzBytes(ByteSpan content, const HavocBudget &budget, Rng &rng);

// Produces a new variant of one resource's content. Structure-aware mutators
// for particular resources plug in here.
class ResourceMutator {
 public:
  virtual ~ResourceMutator() = default;
  virtual ByteArray Mutate(const ResourceId &resource, ByteSpan content,
                           Rng &rng) const = 0;
};

class HavocMutator : public ResourceMutator {
 public:
  explicit HavocMutator(HavocBudget budget = {}) : budget_(budget) {}
  ByteArray Mutate(const ResourceId &resource, ByteSpan content,
                   Rng &rng) const override;

 private:
  HavocBudget budget_;
};

// Mutator per resource, havoc by default.
class MutatorRegistry {
 public:
  explicit MutatorRegistry(HavocBudget budget = {});
  void Register(const ResourceId &resource,
                std::shared_ptr<const ResourceMutator> mutator);
  const ResourceMutator &For(const ResourceId &resource) const;

 private:
  std::shared_ptr<const ResourceMutator> fallback_;
  std::map<ResourceId, std::shared_ptr<const ResourceMutator>> by_resource_;
};

// A candidate environment S'. Under OP#1 `fresh_copy` holds r', which is not
// in its corpus yet; `seed.resources` already points at the index it gets if
// retained. Under the input-only control `fresh_input` plays the same role.
struct MutationResult {
  EnvironmentSeed seed;
  Operator op = Operator::kSwitchInput;
  std::optional<ResourceCopy> fresh_copy;
  SharedBytes fresh_input;
};

// Draws an operator. With no resources only OP#3 is eligible.
Operator ChooseOperator(const OperatorWeights &weights, bool has_resources,
                        Rng &rng);

// mutateEnviron: derives S' from `parent` (a member of C_Env). Neither
// `parent` nor `corpora` is modified.
MutationResult MutateEnviron(const EnvironmentSeed &parent,
                             const CorpusSet &corpora,
                             const OperatorWeights &weights,
                             const MutatorRegistry &mutators, Rng &rng);

// Input-only baseline: havoc on the program input, resources untouched.
MutationResult MutateInput(const EnvironmentSeed &parent,
                           const CorpusSet &corpora, const HavocBudget &budget,
                           Rng &rng);

}  // namespace envsynth

#endif  // ENVSYNTH_MUTATION_H_
