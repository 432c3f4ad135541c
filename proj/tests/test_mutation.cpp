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

#include <gtest/gtest.h>

#include <array>
#include <bit>
#include <string>

#include "swarmfuzz/dut.hpp"
#include "swarmfuzz/error.hpp"
#include "swarmfuzz/isa.hpp"
#include "swarmfuzz/mutation.hpp"
#include "swarmfuzz/pso.hpp"
#include "test_support.hpp"

namespace swarmfuzz::mutation {
namespace {

using isa::Instruction;
using isa::Op;
using isa::TestProgram;

TestProgram random_program(Rng& rng, std::size_t n = 20) {
  TestProgram p;
  p.id = 42;
  for (std::size_t i = 0; i < n; ++i) p.instructions.push_back(isa::random_instruction(rng));
  return p;
}

pso::WeightVector point_mass(MutOp op) {
  std::vector<double> w(kNumOperators, 0.0);
  w[operator_id(op).index] = 1.0;
  return pso::WeightVector(std::move(w));
}

std::size_t differing_slots(const TestProgram& a, const TestProgram& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.instructions.size(); ++i) {
    n += a.instructions[i] != b.instructions[i];
  }
  return n;
}

TEST(Catalog, OrderAndNames) {
  const auto ops = operator_list();
  ASSERT_EQ(ops.size(), 12u);
  const std::array<std::string_view, 12> names = {
      "Bitflip1", "Bitflip2", "Bitflip4",  "ByteFlip",  "ArithAddSub",  "OpcodeMut",
      "OpcodeCrossMut", "RegMut", "RandomImm", "SwapInstr", "DeleteAppend", "RandomInstr"};
  for (std::size_t i = 0; i < ops.size(); ++i) {
    EXPECT_EQ(ops[i].index, i);
    EXPECT_EQ(ops[i].name, names[i]);
    EXPECT_EQ(parse_operator(names[i]), ops[i].op);
    EXPECT_EQ(&operator_id(ops[i].op), &ops[i]);
  }
  EXPECT_EQ(operator_list().data(), ops.data());
  EXPECT_FALSE(parse_operator("Havoc"));
}

TEST(Mutate, Bitflip1ChangesExactlyOneBit) {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const TestProgram p = random_program(rng);
    const MutationResult r = mutate(p, point_mass(MutOp::Bitflip1), rng);
    EXPECT_EQ(r.record.op, MutOp::Bitflip1);
    EXPECT_FALSE(r.record.fell_back);
    EXPECT_EQ(r.record.parent_test_id, 42u);
    int bits = 0;
    for (std::size_t i = 0; i < p.instructions.size(); ++i) {
      bits += std::popcount(p.instructions[i].encoding() ^ r.program.instructions[i].encoding());
    }
    EXPECT_EQ(bits, 1);
  }
}

TEST(Mutate, Bitflip1OnLowBit) {
  // Only bit 0 can be chosen for one of 32 draws; search the stream for it.
  TestProgram p;
  p.instructions = {Instruction::decode(0x00000001)};
  Rng rng(2);
  bool seen = false;
  for (int t = 0; t < 500 && !seen; ++t) {
    const TestProgram q = apply_operator(MutOp::Bitflip1, p, 0, rng);
    if (q.instructions[0].encoding() == 0x00000000) seen = true;
    else EXPECT_EQ(std::popcount(q.instructions[0].encoding() ^ 1u), 1);
  }
  EXPECT_TRUE(seen);
}

TEST(Mutate, Deterministic) {
  Rng a(9), b(9), g(3);
  const TestProgram p = random_program(g);
  const pso::WeightVector w = pso::WeightVector::uniform(kNumOperators);
  for (int t = 0; t < 500; ++t) {
    const MutationResult x = mutate(p, w, a);
    const MutationResult y = mutate(p, w, b);
    EXPECT_EQ(x.program, y.program);
    EXPECT_EQ(x.record.op, y.record.op);
    EXPECT_EQ(x.record.instruction_slot, y.record.instruction_slot);
  }
}

TEST(Mutate, OpcodeMutOnCsrRead) {
  const TestProgram p = isa::parse_program("csrrs x15,x0,1");
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const MutationResult r = mutate(p, point_mass(MutOp::OpcodeMut), rng);
    const Instruction& a = p.instructions[0];
    const Instruction& b = r.program.instructions[0];
    EXPECT_NE(b.op(), Op::Csrrs);
    EXPECT_EQ(b.type(), isa::InstrType::System);
    EXPECT_EQ(b.rd, a.rd);
    EXPECT_EQ(b.rs1, a.rs1);
    EXPECT_EQ(b.rs2, a.rs2);
    EXPECT_EQ(b.imm, a.imm);
  }
}

TEST(ApplyOperator, SwapInstr) {
  Rng g(5);
  const TestProgram p = random_program(g, 8);
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    const TestProgram q = apply_operator(MutOp::SwapInstr, p, 2, rng);
    std::size_t partner = 8;
    for (std::size_t i = 0; i < 8; ++i) {
      if (i != 2 && q.instructions[i] != p.instructions[i]) partner = i;
    }
    if (partner == 8) {
      // Partner held an identical instruction.
      continue;
    }
    EXPECT_EQ(q.instructions[2], p.instructions[partner]);
    EXPECT_EQ(q.instructions[partner], p.instructions[2]);
    EXPECT_LE(differing_slots(p, q), 2u);
  }
}

TEST(ApplyOperator, RandomImmOnIFormat) {
  const TestProgram p = isa::parse_program("addi x3,x4,17");
  const isa::OpInfo& info = isa::info(Op::Addi);
  Rng rng(7);
  std::int32_t lo = 1 << 20, hi = -(1 << 20);
  for (int t = 0; t < 5000; ++t) {
    const Instruction b = apply_operator(MutOp::RandomImm, p, 0, rng).instructions[0];
    // Opcode and register fields are bits [19:0].
    EXPECT_EQ(b.encoding() & 0xfffffu, p.instructions[0].encoding() & 0xfffffu);
    EXPECT_GE(b.imm, info.imm_lo);
    EXPECT_LE(b.imm, info.imm_hi);
    lo = std::min<std::int32_t>(lo, b.imm);
    hi = std::max<std::int32_t>(hi, b.imm);
  }
  EXPECT_LT(lo, info.imm_lo + 100);
  EXPECT_GT(hi, info.imm_hi - 100);
}

TEST(ApplyOperator, InapplicableAndBadSlot) {
  const TestProgram p = isa::parse_program("add x1,x2,x3\necall x0,x0,0");
  Rng rng(8);
  EXPECT_FALSE(applicable(MutOp::RandomImm, p, 0));
  EXPECT_FALSE(applicable(MutOp::RegMut, p, 1));
  EXPECT_THROW(apply_operator(MutOp::RandomImm, p, 0, rng), ContractViolation);
  EXPECT_THROW(apply_operator(MutOp::Bitflip1, p, 2, rng), ContractViolation);
  TestProgram one = isa::parse_program("add x1,x2,x3");
  EXPECT_FALSE(applicable(MutOp::SwapInstr, one, 0));
}

TEST(Mutate, FallsBackToRandomInstr) {
  TestProgram p;
  p.instructions.assign(20, isa::parse_instruction("ecall x0,x0,0"));
  Rng rng(10);
  for (int t = 0; t < 100; ++t) {
    const MutationResult r = mutate(p, point_mass(MutOp::RandomImm), rng);
    EXPECT_TRUE(r.record.fell_back);
    EXPECT_EQ(r.record.op, MutOp::RandomInstr);
    EXPECT_LE(differing_slots(p, r.program), 1u);
  }
}

TEST(Mutate, Errors) {
  Rng rng(11);
  const TestProgram p = random_program(rng);
  EXPECT_THROW(mutate(p, pso::WeightVector::uniform(11), rng), ContractViolation);
  EXPECT_THROW(mutate(TestProgram{}, pso::WeightVector::uniform(12), rng), ContractViolation);
}

TEST(MutateProperties, ClosureAndLocality) {
  Rng rng(12);
  for (int t = 0; t < 20000; ++t) {
    const TestProgram p = random_program(rng);
    const pso::WeightVector w = pso::random_simplex_point(kNumOperators, rng);
    const MutationResult r = mutate(p, w, rng);
    ASSERT_EQ(r.program.instructions.size(), p.instructions.size());
    EXPECT_LT(r.record.instruction_slot, p.instructions.size());
    for (const Instruction& ins : r.program.instructions) {
      EXPECT_EQ(Instruction::decode(ins.encoding()), ins);
    }
    if (r.record.op == MutOp::SwapInstr) {
      EXPECT_LE(differing_slots(p, r.program), 2u);
    } else if (r.record.op != MutOp::DeleteAppend) {
      EXPECT_LE(differing_slots(p, r.program), 1u);
      for (std::size_t i = 0; i < p.instructions.size(); ++i) {
        if (i != r.record.instruction_slot) {
          EXPECT_EQ(p.instructions[i], r.program.instructions[i]);
        }
      }
    }
  }
}

TEST(MutateProperties, OperatorFrequenciesMatchWeights) {
  Rng rng(13);
  // Every operator is applicable to every slot, so no draw falls back.
  TestProgram p;
  p.instructions.assign(20, isa::parse_instruction("addi x3,x4,17"));
  const pso::WeightVector w = pso::random_simplex_point(kNumOperators, rng);
  std::array<int, kNumOperators> counts{};
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    const MutationResult r = mutate(p, w, rng);
    ASSERT_FALSE(r.record.fell_back);
    ++counts[operator_id(r.record.op).index];
  }
  for (std::size_t j = 0; j < kNumOperators; ++j) {
    EXPECT_NEAR(static_cast<double>(counts[j]) / n, w[j], 0.01) << j;
  }
}

TEST(MutateProperties, TwoOperatorCsrExperiment) {
  Rng rng(14);
  EXPECT_NEAR(testing::csr_set_side_rate(0.5, 10000, rng), 0.5, 0.02);
  EXPECT_NEAR(testing::csr_set_side_rate(0.9, 10000, rng), 0.9, 0.02);
}

}  // namespace
}  // namespace swarmfuzz::mutation
