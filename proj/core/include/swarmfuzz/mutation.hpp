// Copyright 2026 The SwarmFuzz Authors.
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

// Mutation operators and the weighted mutation step.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "swarmfuzz/isa.hpp"
#include "swarmfuzz/pso.hpp"
#include "swarmfuzz/rng.hpp"

namespace swarmfuzz::mutation {

enum class MutOp : std::uint8_t {
  Bitflip1,
  Bitflip2,
  Bitflip4,
  ByteFlip,
  ArithAddSub,
  OpcodeMut,
  OpcodeCrossMut,
  RegMut,
  RandomImm,
  SwapInstr,
  DeleteAppend,
  RandomInstr,
};
inline constexpr std::size_t kNumOperators = 12;

struct MutationOperatorId {
  MutOp op;
  std::size_t index;
  std::string_view name;
};

// Catalog in index order. The index is the column of the operator in a
// mutation particle's position.
std::span<const MutationOperatorId> operator_list();
const MutationOperatorId& operator_id(MutOp op);
std::optional<MutOp> parse_operator(std::string_view name);

struct MutationRecord {
  MutOp op = MutOp::RandomInstr;
  std::size_t instruction_slot = 0;
  std::uint64_t parent_test_id = 0;
  // The sampled operator never found an applicable slot.
  bool fell_back = false;
};

struct MutationResult {
  isa::TestProgram program;
  MutationRecord record;
};

// Whether `op` can transform the instruction at `slot`.
bool applicable(MutOp op, const isa::TestProgram& test, std::size_t slot);

// Applies one operator at `slot`. SwapInstr draws its partner slot from rng.
// Throws ContractViolation for an invalid slot or an inapplicable operator.
isa::TestProgram apply_operator(MutOp op, const isa::TestProgram& test,
                                std::size_t slot, Rng& rng);

// Samples an operator from `w`, picks a slot uniformly and applies it. An
// inapplicable slot is re-drawn up to |O| times before falling back to
// RandomInstr on the last slot drawn. The result keeps the parent's id.
MutationResult mutate(const isa::TestProgram& test, const pso::WeightVector& w,
                      Rng& rng);

}  // namespace swarmfuzz::mutation
