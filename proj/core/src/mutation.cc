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

#include "envsynth/mutation.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "envsynth/util.h"
#include "glog/logging.h"

namespace envsynth {

namespace {

constexpr std::array<uint8_t, 6> kInterestingBytes = {0x00, 0xFF, 0x7F,
                                                      0x80, 0x20, 0x0A};
constexpr size_t kMaxArithDelta = 35;

// Mostly short blocks, occasionally up to the whole buffer.
size_t ChooseBlockLength(size_t available, Rng &rng) {
  if (available == 0) return 0;
  const size_t cap = rng.Below(4) == 0 ? available : std::min<size_t>(available, 32);
  return rng.Between(1, cap);
}

template <typename T>
void Arith(ByteArray &data, Rng &rng) {
  if (data.size() < sizeof(T)) return;
  const size_t pos = rng.Below(data.size() - sizeof(T) + 1);
  const bool big_endian = rng.Below(2) == 1;
  T value = 0;
  for (size_t i = 0; i < sizeof(T); ++i) {
    const size_t shift = big_endian ? (sizeof(T) - 1 - i) * 8 : i * 8;
    value |= static_cast<T>(static_cast<T>(data[pos + i]) << shift);
  }
  const T delta = static_cast<T>(rng.Between(1, kMaxArithDelta));
  value = rng.Below(2) == 0 ? static_cast<T>(value + delta)
                            : static_cast<T>(value - delta);
  for (size_t i = 0; i < sizeof(T); ++i) {
    const size_t shift = big_endian ? (sizeof(T) - 1 - i) * 8 : i * 8;
    data[pos + i] = static_cast<uint8_t>(value >> shift);
  }
}

}  // namespace

absl::Status OperatorWeights::Validate() const {
  for (double p : {fuzz_resource, switch_resource, switch_input}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("operator weight out of [0,1]: ", p));
    }
  }
  const double sum = fuzz_resource + switch_resource + switch_input;
  if (std::abs(sum - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("operator weights must sum to 1, got ", sum));
  }
  return absl::OkStatus();
}

absl::StatusOr<OperatorWeights> ParseOperatorWeights(std::string_view text) {
  std::vector<std::string_view> parts = Split(text, ',');
  if (parts.size() != 3) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected three comma-separated weights: ", AbslView(text)));
  }
  double p[3];
  for (int i = 0; i < 3; ++i) {
    if (!absl::SimpleAtod(AbslView(parts[i]), &p[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad weight '", AbslView(parts[i]), "'"));
    }
  }
  OperatorWeights weights{p[0], p[1], p[2]};
  if (absl::Status s = weights.Validate(); !s.ok()) return s;
  return weights;
}

size_t HavocBudget::MaxSize(size_t size) const {
  if (growth_factor != 0 &&
      size > std::numeric_limits<size_t>::max() / growth_factor) {
    return growth_cap;
  }
  return std::min(std::max(size * growth_factor, growth_floor), growth_cap);
}

absl::Status HavocBudget::Validate() const {
  if (max_stack < 1) return absl::InvalidArgumentError("max_stack must be >= 1");
  if (growth_floor > growth_cap) {
    return absl::InvalidArgumentError("growth_floor exceeds growth_cap");
  }
  return absl::OkStatus();
}

void ApplyHavocOp(HavocOp op, ByteArray &data, size_t max_size, Rng &rng) {
  const size_t n = data.size();
  switch (op) {
    case HavocOp::kBitFlip: {
      if (n == 0) return;
      const size_t bit = rng.Below(n * 8);
      data[bit >> 3] ^= static_cast<uint8_t>(1u << (bit & 7));
      return;
    }
    case HavocOp::kRandomByte:
      if (n == 0) return;
      data[rng.Below(n)] = static_cast<uint8_t>(rng.Below(256));
      return;
    case HavocOp::kInterestingByte:
      if (n == 0) return;
      data[rng.Below(n)] = kInterestingBytes[rng.Below(kInterestingBytes.size())];
      return;
    case HavocOp::kArith16:
      Arith<uint16_t>(data, rng);
      return;
    case HavocOp::kArith32:
      Arith<uint32_t>(data, rng);
      return;
    case HavocOp::kBlockDelete: {
      // Keeps at least one byte.
      if (n < 2) return;
      const size_t len = ChooseBlockLength(n - 1, rng);
      const size_t from = rng.Below(n - len + 1);
      data.erase(data.begin() + from, data.begin() + from + len);
      return;
    }
    case HavocOp::kBlockDuplicate: {
      if (n >= max_size) return;
      if (n == 0) {
        // Nothing to duplicate: seed the buffer with random bytes instead.
        data.resize(rng.Between(1, std::min<size_t>(max_size, 32)));
        for (uint8_t &b : data) b = static_cast<uint8_t>(rng.Below(256));
        return;
      }
      size_t len = ChooseBlockLength(n, rng);
      len = std::min(len, max_size - n);
      const size_t from = rng.Below(n - len + 1);
      const size_t to = rng.Below(n + 1);
      ByteArray block(data.begin() + from, data.begin() + from + len);
      data.insert(data.begin() + to, block.begin(), block.end());
      return;
    }
    case HavocOp::kBlockRandomOverwrite: {
      if (n == 0) return;
      const size_t len = ChooseBlockLength(n, rng);
      const size_t at = rng.Below(n - len + 1);
      for (size_t i = 0; i < len; ++i) {
        data[at + i] = static_cast<uint8_t>(rng.Below(256));
      }
      return;
    }
    case HavocOp::kBlockSelfSplice: {
      if (n < 2) return;
      const size_t len = ChooseBlockLength(n - 1, rng);
      const size_t from = rng.Below(n - len + 1);
      const size_t to = rng.Below(n - len + 1);
      std::memmove(data.data() + to, data.data() + from, len);
      return;
    }
  }
}

ByteArray FuzzBytes(ByteSpan content, const HavocBudget &budget, Rng &rng) {
  CHECK_GE(budget.max_stack, 1u);
  const size_t max_size = budget.MaxSize(content.size());
  ByteArray data(content.begin(),
                 content.begin() + std::min(content.size(), max_size));
  const size_t depth = rng.Between(1, budget.max_stack);
  for (size_t i = 0; i < depth; ++i) {
    ApplyHavocOp(static_cast<HavocOp>(rng.Below(kNumHavocOps)), data, max_size,
                 rng);
  }
  return data;
}

ByteArray HavocMutator::Mutate(const ResourceId &, ByteSpan content,
                               Rng &rng) const {
  return FuzzBytes(content, budget_, rng);
}

MutatorRegistry::MutatorRegistry(HavocBudget budget)
    : fallback_(std::make_shared<HavocMutator>(budget)) {}

void MutatorRegistry::Register(const ResourceId &resource,
                               std::shared_ptr<const ResourceMutator> mutator) {
  CHECK(mutator != nullptr);
  by_resource_[resource] = std::move(mutator);
}

const ResourceMutator &MutatorRegistry::For(const ResourceId &resource) const {
  auto it = by_resource_.find(resource);
  return it == by_resource_.end() ? *fallback_ : *it->second;
}

Operator ChooseOperator(const OperatorWeights &weights, bool has_resources,
                        Rng &rng) {
  if (!has_resources) return Operator::kSwitchInput;
  const double u = rng.Uniform();
  if (u < weights.fuzz_resource) return Operator::kFuzzResource;
  if (u < weights.fuzz_resource + weights.switch_resource) {
    return Operator::kSwitchResource;
  }
  return Operator::kSwitchInput;
}

MutationResult MutateEnviron(const EnvironmentSeed &parent,
                             const CorpusSet &corpora,
                             const OperatorWeights &weights,
                             const MutatorRegistry &mutators, Rng &rng) {
  MutationResult result;
  result.op = ChooseOperator(weights, !parent.resources.empty(), rng);
  result.seed = parent;
  result.seed.lineage = Lineage{parent.env_index, result.op};

  auto pick_resource = [&]() {
    auto it = result.seed.resources.begin();
    std::advance(it, rng.Below(result.seed.resources.size()));
    return it;
  };

  switch (result.op) {
    case Operator::kFuzzResource: {
      auto it = pick_resource();
      const ResourceId &id = it->first;
      const ResourceCopy &original = corpora.copy(id, it->second);
      ByteArray mutated = mutators.For(id).Mutate(id, *original.content, rng);
      ResourceCopy fresh{id, ShareBytes(std::move(mutated)), CopyOrigin::kFuzzed,
                         corpora.NextCopyIndex(id)};
      it->second = fresh.seed_index;
      result.fresh_copy = std::move(fresh);
      break;
    }
    case Operator::kSwitchResource: {
      auto it = pick_resource();
      it->second = rng.Below(corpora.resource_corpus(it->first).size());
      break;
    }
    case Operator::kSwitchInput:
      result.seed.input = rng.Below(corpora.inputs().size());
      break;
    default:
      LOG(FATAL) << "unexpected operator " << OperatorName(result.op);
  }
  return result;
}

MutationResult MutateInput(const EnvironmentSeed &parent,
                           const CorpusSet &corpora, const HavocBudget &budget,
                           Rng &rng) {
  MutationResult result;
  result.op = Operator::kFuzzInput;
  result.seed = parent;
  result.seed.lineage = Lineage{parent.env_index, Operator::kFuzzInput};
  result.fresh_input = ShareBytes(
      FuzzBytes(*corpora.inputs()[parent.input].content, budget, rng));
  result.seed.input = corpora.inputs().size();
  return result;
}

}  // namespace envsynth
