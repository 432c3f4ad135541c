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

#include "swarmfuzz/mutation.hpp"

#include <array>
#include <utility>

#include "swarmfuzz/error.hpp"

namespace swarmfuzz::mutation {
namespace {

using isa::Instruction;
using isa::OpInfo;

constexpr std::array<MutationOperatorId, kNumOperators> kCatalog = {{
    {MutOp::Bitflip1, 0, "Bitflip1"},
    {MutOp::Bitflip2, 1, "Bitflip2"},
    {MutOp::Bitflip4, 2, "Bitflip4"},
    {MutOp::ByteFlip, 3, "ByteFlip"},
    {MutOp::ArithAddSub, 4, "ArithAddSub"},
    {MutOp::OpcodeMut, 5, "OpcodeMut"},
    {MutOp::OpcodeCrossMut, 6, "OpcodeCrossMut"},
    {MutOp::RegMut, 7, "RegMut"},
    {MutOp::RandomImm, 8, "RandomImm"},
    {MutOp::SwapInstr, 9, "SwapInstr"},
    {MutOp::DeleteAppend, 10, "DeleteAppend"},
    {MutOp::RandomInstr, 11, "RandomInstr"},
}};

// Bit position and width of each encoding field: opcode, rd, rs1, rs2, imm.
constexpr std::array<std::pair<unsigned, unsigned>, 5> kEncodingFields = {{
    {0, 8}, {8, 4}, {12, 4}, {16, 4}, {20, 12}}};

constexpr std::array<isa::FieldMask, 3> kRegFields = {isa::kFieldRd, isa::kFieldRs1,
                                                      isa::kFieldRs2};

Instruction flip_bits(const Instruction& ins, unsigned count, Rng& rng) {
  std::uint32_t word = ins.encoding();
  std::uint32_t chosen = 0;
  while (static_cast<unsigned>(__builtin_popcount(chosen)) < count) {
    chosen |= 1u << rng.below(32);
  }
  return Instruction::decode(word ^ chosen);
}

Instruction add_sub(const Instruction& ins, Rng& rng) {
  const auto [lo, width] = kEncodingFields[rng.below(kEncodingFields.size())];
  const auto delta = static_cast<std::uint32_t>(rng.between(1, 8));
  const bool subtract = rng.below(2) == 1;
  const std::uint32_t mask = (1u << width) - 1;
  const std::uint32_t word = ins.encoding();
  std::uint32_t field = (word >> lo) & mask;
  field = (subtract ? field - delta : field + delta) & mask;
  return Instruction::decode((word & ~(mask << lo)) | (field << lo));
}

std::uint8_t& reg_field(Instruction& ins, isa::FieldMask f) {
  if (f == isa::kFieldRd) return ins.rd;
  if (f == isa::kFieldRs1) return ins.rs1;
  return ins.rs2;
}

Instruction opcode_mut(const Instruction& ins, Rng& rng) {
  const auto ops = isa::ops_of_type(ins.type());
  const isa::Op current = ins.op();
  isa::Op next = current;
  while (next == current) next = ops[rng.below(ops.size())];
  Instruction out = ins;
  out.code = isa::info(next).code;
  return out;
}

Instruction opcode_cross_mut(const Instruction& ins, Rng& rng) {
  const OpInfo* old_info = ins.op_info();
  const std::uint8_t old_fields = old_info ? old_info->fields : 0;
  isa::InstrType type = ins.type();
  if (old_info) {
    auto t = static_cast<std::size_t>(rng.below(isa::kNumInstrTypes - 1));
    if (t >= static_cast<std::size_t>(type)) ++t;
    type = isa::kAllInstrTypes[t];
  } else {
    type = isa::kAllInstrTypes[rng.below(isa::kNumInstrTypes)];
  }
  const auto ops = isa::ops_of_type(type);
  const OpInfo& o = isa::info(ops[rng.below(ops.size())]);

  Instruction out = ins;
  out.code = o.code;
  for (isa::FieldMask f : kRegFields) {
    std::uint8_t& r = reg_field(out, f);
    if (!(o.fields & f)) {
      r = 0;
    } else if (!(old_fields & f)) {
      r = static_cast<std::uint8_t>(rng.below(isa::kNumRegs));
    }
  }
  if (!(o.fields & isa::kFieldImm)) {
    out.imm = 0;
  } else if (!(old_fields & isa::kFieldImm) || out.imm < o.imm_lo || out.imm > o.imm_hi) {
    out.imm = static_cast<std::int16_t>(rng.between(o.imm_lo, o.imm_hi));
  }
  return out;
}

Instruction reg_mut(const Instruction& ins, Rng& rng) {
  const std::uint8_t fields = ins.op_info()->fields;
  std::array<isa::FieldMask, 3> present{};
  std::size_t n = 0;
  for (isa::FieldMask f : kRegFields) {
    if (fields & f) present[n++] = f;
  }
  Instruction out = ins;
  std::uint8_t& r = reg_field(out, present[rng.below(n)]);
  auto v = static_cast<std::uint8_t>(rng.below(isa::kNumRegs - 1));
  if (v >= r) ++v;
  r = v;
  return out;
}

Instruction random_imm(const Instruction& ins, Rng& rng) {
  const OpInfo& o = *ins.op_info();
  Instruction out = ins;
  out.imm = static_cast<std::int16_t>(rng.between(o.imm_lo, o.imm_hi));
  return out;
}

}  // namespace

std::span<const MutationOperatorId> operator_list() { return kCatalog; }

const MutationOperatorId& operator_id(MutOp op) {
  return kCatalog[static_cast<std::size_t>(op)];
}

std::optional<MutOp> parse_operator(std::string_view name) {
  for (const MutationOperatorId& id : kCatalog) {
    if (id.name == name) return id.op;
  }
  return std::nullopt;
}

bool applicable(MutOp op, const isa::TestProgram& test, std::size_t slot) {
  if (slot >= test.instructions.size()) return false;
  const OpInfo* o = test.instructions[slot].op_info();
  switch (op) {
    case MutOp::OpcodeMut:
      return o != nullptr;
    case MutOp::RegMut:
      return o != nullptr && (o->fields & (isa::kFieldRd | isa::kFieldRs1 | isa::kFieldRs2));
    case MutOp::RandomImm:
      return o != nullptr && (o->fields & isa::kFieldImm);
    case MutOp::SwapInstr:
      return test.instructions.size() >= 2;
    default:
      return true;
  }
}

isa::TestProgram apply_operator(MutOp op, const isa::TestProgram& test,
                                std::size_t slot, Rng& rng) {
  if (slot >= test.instructions.size()) {
    throw ContractViolation("apply_operator: slot out of range");
  }
  if (!applicable(op, test, slot)) {
    throw ContractViolation("apply_operator: " + std::string(operator_id(op).name) +
                            " not applicable to slot " + std::to_string(slot));
  }
  isa::TestProgram out = test;
  auto& ins = out.instructions;
  Instruction& target = ins[slot];
  switch (op) {
    case MutOp::Bitflip1: target = flip_bits(target, 1, rng); break;
    case MutOp::Bitflip2: target = flip_bits(target, 2, rng); break;
    case MutOp::Bitflip4: target = flip_bits(target, 4, rng); break;
    case MutOp::ByteFlip: {
      const unsigned byte = static_cast<unsigned>(rng.below(4));
      target = Instruction::decode(target.encoding() ^ (0xffu << (8 * byte)));
      break;
    }
    case MutOp::ArithAddSub: target = add_sub(target, rng); break;
    case MutOp::OpcodeMut: target = opcode_mut(target, rng); break;
    case MutOp::OpcodeCrossMut: target = opcode_cross_mut(target, rng); break;
    case MutOp::RegMut: target = reg_mut(target, rng); break;
    case MutOp::RandomImm: target = random_imm(target, rng); break;
    case MutOp::SwapInstr: {
      auto other = static_cast<std::size_t>(rng.below(ins.size() - 1));
      if (other >= slot) ++other;
      std::swap(ins[slot], ins[other]);
      break;
    }
    case MutOp::DeleteAppend:
      ins.erase(ins.begin() + static_cast<std::ptrdiff_t>(slot));
      ins.push_back(isa::random_instruction(rng));
      break;
    case MutOp::RandomInstr: target = isa::random_instruction(rng); break;
  }
  return out;
}

MutationResult mutate(const isa::TestProgram& test, const pso::WeightVector& w,
                      Rng& rng) {
  if (w.size() != kNumOperators) {
    throw ContractViolation("mutate: weight vector must have one entry per operator");
  }
  const std::size_t n = test.instructions.size();
  if (n == 0) throw ContractViolation("mutate: empty program");

  const MutOp op = kCatalog[pso::sample_categorical(w, rng)].op;
  MutationResult result;
  result.record.op = op;
  result.record.parent_test_id = test.id;
  std::size_t slot = static_cast<std::size_t>(rng.below(n));
  for (std::size_t attempt = 0; !applicable(op, test, slot); ++attempt) {
    if (attempt == n) {
      result.record.fell_back = true;
      result.record.op = MutOp::RandomInstr;
      break;
    }
    slot = static_cast<std::size_t>(rng.below(n));
  }
  result.record.instruction_slot = slot;
  result.program = apply_operator(result.record.op, test, slot, rng);
  return result;
}

}  // namespace swarmfuzz::mutation
