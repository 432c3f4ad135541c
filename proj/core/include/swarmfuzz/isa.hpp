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

// Toy instruction set executed by the bundled DUT and golden model.
//
// Every 32-bit word decodes to an Instruction and back, bit for bit:
//
//   [7:0]   opcode   (undefined opcodes decode to Op::Illegal)
//   [11:8]  rd       (S and B formats carry their first source here)
//   [15:12] rs1
//   [19:16] rs2
//   [31:20] imm      (12-bit two's complement)
//
// An instruction is canonical when every field its opcode does not read is
// zero. Canonical instructions print as `<mnemonic> <rd>,<rs1>,<rs2|imm>`;
// everything else prints as `.word 0xXXXXXXXX`.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swarmfuzz/rng.hpp"

namespace swarmfuzz::isa {

enum class InstrType : std::uint8_t { AluR, AluI, Load, Store, Branch, System };
inline constexpr std::size_t kNumInstrTypes = 6;
inline constexpr std::array<InstrType, kNumInstrTypes> kAllInstrTypes = {
    InstrType::AluR,  InstrType::AluI,   InstrType::Load,
    InstrType::Store, InstrType::Branch, InstrType::System};

std::string_view type_name(InstrType type);

enum class Op : std::uint8_t {
  // ALU-R
  Add, Sub, And, Or, Xor, Sll, Srl, Sra, Slt, Sltu, Mul, Mulhu, Div, Rem,
  // ALU-I
  Addi, Andi, Ori, Xori, Slli, Srli, Srai, Slti, Sltiu, Lui,
  // LOAD
  Lb, Lh, Lw, Lbu, Lhu,
  // STORE
  Sb, Sh, Sw,
  // BRANCH
  Beq, Bne, Blt, Bge, Bltu, Bgeu,
  // SYSTEM
  Csrrw, Csrrs, Csrrc, Ecall, Ebreak, Mret, Fence,
  Illegal,
};

// Encoding fields read by an opcode.
enum FieldMask : std::uint8_t {
  kFieldRd = 1,
  kFieldRs1 = 2,
  kFieldRs2 = 4,
  kFieldImm = 8,
};

struct OpInfo {
  Op op;
  std::string_view mnemonic;
  InstrType type;
  std::uint8_t code;
  std::uint8_t fields;
  // Immediate range drawn by the random generator. Mutations may leave it.
  std::int32_t imm_lo;
  std::int32_t imm_hi;
};

inline constexpr unsigned kNumRegs = 16;
inline constexpr std::int32_t kImmMin = -2048;
inline constexpr std::int32_t kImmMax = 2047;

// CSR ids. Ids >= kNumCsrs are unimplemented.
enum class Csr : std::uint16_t {
  Status = 0, Tvec = 1, Epc = 2, Cause = 3,
  Instret = 4, Scratch = 5, Timer = 6, Custom = 7,
};
inline constexpr unsigned kNumCsrs = 8;
std::string_view csr_name(unsigned id);

std::span<const OpInfo> op_table();
const OpInfo& info(Op op);
// Defined opcodes of one type, in table order.
std::span<const Op> ops_of_type(InstrType type);

struct Instruction {
  std::uint8_t code = 0;
  std::uint8_t rd = 0;
  std::uint8_t rs1 = 0;
  std::uint8_t rs2 = 0;
  std::int16_t imm = 0;

  static Instruction decode(std::uint32_t word);
  // Throws ContractViolation if a field is out of range.
  static Instruction make(Op op, unsigned rd, unsigned rs1, unsigned rs2,
                          std::int32_t imm);

  std::uint32_t encoding() const;
  Op op() const;
  InstrType type() const;
  const OpInfo* op_info() const;  // nullptr for illegal opcodes
  bool reads(FieldMask field) const;
  bool canonical() const;
  // True if every field holds a value its bit width can represent.
  bool fields_in_range() const;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

Instruction nop();

struct TestProgram {
  std::uint64_t id = 0;
  std::vector<Instruction> instructions;

  friend bool operator==(const TestProgram&, const TestProgram&) = default;
};

std::string to_text(const Instruction& ins);
std::string to_text(const TestProgram& program);
// Parses one instruction; throws ParseError.
Instruction parse_instruction(std::string_view text);
// One instruction per line; blank lines and `#` comments are ignored.
TestProgram parse_program(std::string_view text);

// Little-endian 32-bit words.
std::vector<std::uint8_t> to_binary(const TestProgram& program);
TestProgram parse_binary(std::span<const std::uint8_t> bytes);

// Canonical instruction of the given type: opcode uniform over the type's
// defined opcodes, then registers and immediate uniform over their ranges.
Instruction random_instruction(InstrType type, Rng& rng);
Instruction random_instruction(Rng& rng);

}  // namespace swarmfuzz::isa
