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

#include "swarmfuzz/isa.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "swarmfuzz/error.hpp"

namespace swarmfuzz::isa {
namespace {

constexpr std::uint8_t kR = kFieldRd | kFieldRs1 | kFieldRs2;
constexpr std::uint8_t kI = kFieldRd | kFieldRs1 | kFieldImm;
constexpr std::uint8_t kU = kFieldRd | kFieldImm;

// Memory offsets are kept small so that generated accesses collide often
// enough to exercise the store/load paths.
constexpr OpInfo kOps[] = {
    {Op::Add, "add", InstrType::AluR, 0x00, kR, 0, 0},
    {Op::Sub, "sub", InstrType::AluR, 0x01, kR, 0, 0},
    {Op::And, "and", InstrType::AluR, 0x02, kR, 0, 0},
    {Op::Or, "or", InstrType::AluR, 0x03, kR, 0, 0},
    {Op::Xor, "xor", InstrType::AluR, 0x04, kR, 0, 0},
    {Op::Sll, "sll", InstrType::AluR, 0x05, kR, 0, 0},
    {Op::Srl, "srl", InstrType::AluR, 0x06, kR, 0, 0},
    {Op::Sra, "sra", InstrType::AluR, 0x07, kR, 0, 0},
    {Op::Slt, "slt", InstrType::AluR, 0x08, kR, 0, 0},
    {Op::Sltu, "sltu", InstrType::AluR, 0x09, kR, 0, 0},
    {Op::Mul, "mul", InstrType::AluR, 0x0a, kR, 0, 0},
    {Op::Mulhu, "mulhu", InstrType::AluR, 0x0b, kR, 0, 0},
    {Op::Div, "div", InstrType::AluR, 0x0c, kR, 0, 0},
    {Op::Rem, "rem", InstrType::AluR, 0x0d, kR, 0, 0},

    {Op::Addi, "addi", InstrType::AluI, 0x20, kI, kImmMin, kImmMax},
    {Op::Andi, "andi", InstrType::AluI, 0x21, kI, kImmMin, kImmMax},
    {Op::Ori, "ori", InstrType::AluI, 0x22, kI, kImmMin, kImmMax},
    {Op::Xori, "xori", InstrType::AluI, 0x23, kI, kImmMin, kImmMax},
    {Op::Slli, "slli", InstrType::AluI, 0x24, kI, 0, 31},
    {Op::Srli, "srli", InstrType::AluI, 0x25, kI, 0, 31},
    {Op::Srai, "srai", InstrType::AluI, 0x26, kI, 0, 31},
    {Op::Slti, "slti", InstrType::AluI, 0x27, kI, kImmMin, kImmMax},
    {Op::Sltiu, "sltiu", InstrType::AluI, 0x28, kI, kImmMin, kImmMax},
    {Op::Lui, "lui", InstrType::AluI, 0x29, kU, kImmMin, kImmMax},

    {Op::Lb, "lb", InstrType::Load, 0x40, kI, 0, 15},
    {Op::Lh, "lh", InstrType::Load, 0x41, kI, 0, 15},
    {Op::Lw, "lw", InstrType::Load, 0x42, kI, 0, 15},
    {Op::Lbu, "lbu", InstrType::Load, 0x43, kI, 0, 15},
    {Op::Lhu, "lhu", InstrType::Load, 0x44, kI, 0, 15},

    {Op::Sb, "sb", InstrType::Store, 0x60, kI, 0, 15},
    {Op::Sh, "sh", InstrType::Store, 0x61, kI, 0, 15},
    {Op::Sw, "sw", InstrType::Store, 0x62, kI, 0, 15},

    {Op::Beq, "beq", InstrType::Branch, 0x80, kI, 0, 7},
    {Op::Bne, "bne", InstrType::Branch, 0x81, kI, 0, 7},
    {Op::Blt, "blt", InstrType::Branch, 0x82, kI, 0, 7},
    {Op::Bge, "bge", InstrType::Branch, 0x83, kI, 0, 7},
    {Op::Bltu, "bltu", InstrType::Branch, 0x84, kI, 0, 7},
    {Op::Bgeu, "bgeu", InstrType::Branch, 0x85, kI, 0, 7},

    // CSR operands are drawn from the implemented CSRs only.
    {Op::Csrrw, "csrrw", InstrType::System, 0xa0, kI, 0, kNumCsrs - 1},
    {Op::Csrrs, "csrrs", InstrType::System, 0xa1, kI, 0, kNumCsrs - 1},
    {Op::Csrrc, "csrrc", InstrType::System, 0xa2, kI, 0, kNumCsrs - 1},
    {Op::Ecall, "ecall", InstrType::System, 0xa3, 0, 0, 0},
    {Op::Ebreak, "ebreak", InstrType::System, 0xa4, 0, 0, 0},
    {Op::Mret, "mret", InstrType::System, 0xa5, 0, 0, 0},
    {Op::Fence, "fence", InstrType::System, 0xa6, kFieldImm, 0, 0},
};

struct Lookup {
  std::array<const OpInfo*, 256> by_code{};
  std::array<std::vector<Op>, kNumInstrTypes> by_type;

  Lookup() {
    for (const OpInfo& o : kOps) {
      by_code[o.code] = &o;
      by_type[static_cast<std::size_t>(o.type)].push_back(o.op);
    }
  }
};

const Lookup& lookup() {
  static const Lookup table;
  return table;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

unsigned parse_reg(const std::string& tok) {
  if (tok.size() < 2 || (tok[0] != 'x' && tok[0] != 'X')) {
    throw ParseError("expected register, got '" + tok + "'");
  }
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || value >= kNumRegs) {
    throw ParseError("bad register '" + tok + "'");
  }
  return value;
}

std::int32_t parse_imm(const std::string& tok) {
  std::int64_t value = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  std::from_chars_result res{};
  bool negative = false;
  if (first != last && (*first == '-' || *first == '+')) {
    negative = *first == '-';
    ++first;
  }
  if (last - first > 2 && first[0] == '0' && (first[1] == 'x' || first[1] == 'X')) {
    res = std::from_chars(first + 2, last, value, 16);
  } else {
    res = std::from_chars(first, last, value);
  }
  if (res.ec != std::errc() || res.ptr != last || first == last) {
    throw ParseError("bad immediate '" + tok + "'");
  }
  if (negative) value = -value;
  if (value < kImmMin || value > kImmMax) {
    throw ParseError("immediate out of range '" + tok + "'");
  }
  return static_cast<std::int32_t>(value);
}

}  // namespace

std::string_view type_name(InstrType type) {
  switch (type) {
    case InstrType::AluR: return "ALU-R";
    case InstrType::AluI: return "ALU-I";
    case InstrType::Load: return "LOAD";
    case InstrType::Store: return "STORE";
    case InstrType::Branch: return "BRANCH";
    case InstrType::System: return "SYSTEM";
  }
  return "?";
}

std::string_view csr_name(unsigned id) {
  static constexpr std::string_view kNames[kNumCsrs] = {
      "status", "tvec", "epc", "cause", "instret", "scratch", "timer", "custom"};
  return id < kNumCsrs ? kNames[id] : std::string_view("unimplemented");
}

std::span<const OpInfo> op_table() { return kOps; }

const OpInfo& info(Op op) {
  for (const OpInfo& o : kOps) {
    if (o.op == op) return o;
  }
  throw ContractViolation("no table entry for opcode");
}

std::span<const Op> ops_of_type(InstrType type) {
  return lookup().by_type[static_cast<std::size_t>(type)];
}

Instruction Instruction::decode(std::uint32_t word) {
  Instruction ins;
  ins.code = static_cast<std::uint8_t>(word & 0xff);
  ins.rd = static_cast<std::uint8_t>((word >> 8) & 0xf);
  ins.rs1 = static_cast<std::uint8_t>((word >> 12) & 0xf);
  ins.rs2 = static_cast<std::uint8_t>((word >> 16) & 0xf);
  const auto raw_imm = static_cast<std::int32_t>((word >> 20) & 0xfff);
  ins.imm = static_cast<std::int16_t>(raw_imm >= 0x800 ? raw_imm - 0x1000 : raw_imm);
  return ins;
}

Instruction Instruction::make(Op op, unsigned rd, unsigned rs1, unsigned rs2,
                              std::int32_t imm) {
  if (op == Op::Illegal) throw ContractViolation("cannot build Op::Illegal");
  if (rd >= kNumRegs || rs1 >= kNumRegs || rs2 >= kNumRegs) {
    throw ContractViolation("register index out of range");
  }
  if (imm < kImmMin || imm > kImmMax) {
    throw ContractViolation("immediate out of range");
  }
  Instruction ins;
  ins.code = info(op).code;
  ins.rd = static_cast<std::uint8_t>(rd);
  ins.rs1 = static_cast<std::uint8_t>(rs1);
  ins.rs2 = static_cast<std::uint8_t>(rs2);
  ins.imm = static_cast<std::int16_t>(imm);
  return ins;
}

std::uint32_t Instruction::encoding() const {
  return static_cast<std::uint32_t>(code) |
         (static_cast<std::uint32_t>(rd & 0xf) << 8) |
         (static_cast<std::uint32_t>(rs1 & 0xf) << 12) |
         (static_cast<std::uint32_t>(rs2 & 0xf) << 16) |
         ((static_cast<std::uint32_t>(imm) & 0xfff) << 20);
}

const OpInfo* Instruction::op_info() const { return lookup().by_code[code]; }

Op Instruction::op() const {
  const OpInfo* o = op_info();
  return o ? o->op : Op::Illegal;
}

InstrType Instruction::type() const {
  if (const OpInfo* o = op_info()) return o->type;
  return static_cast<InstrType>(std::min<unsigned>(code >> 5, kNumInstrTypes - 1));
}

bool Instruction::reads(FieldMask field) const {
  const OpInfo* o = op_info();
  return o != nullptr && (o->fields & field) != 0;
}

bool Instruction::canonical() const {
  const OpInfo* o = op_info();
  if (o == nullptr) return false;
  return ((o->fields & kFieldRd) || rd == 0) &&
         ((o->fields & kFieldRs1) || rs1 == 0) &&
         ((o->fields & kFieldRs2) || rs2 == 0) &&
         ((o->fields & kFieldImm) || imm == 0);
}

bool Instruction::fields_in_range() const {
  return rd < kNumRegs && rs1 < kNumRegs && rs2 < kNumRegs &&
         imm >= kImmMin && imm <= kImmMax;
}

Instruction nop() { return Instruction::make(Op::Addi, 0, 0, 0, 0); }

std::string to_text(const Instruction& ins) {
  char buf[64];
  if (!ins.canonical()) {
    std::snprintf(buf, sizeof buf, ".word 0x%08x", ins.encoding());
    return buf;
  }
  const OpInfo& o = *ins.op_info();
  if (o.fields & kFieldRs2) {
    std::snprintf(buf, sizeof buf, "%s x%u,x%u,x%u", std::string(o.mnemonic).c_str(),
                  ins.rd, ins.rs1, ins.rs2);
  } else {
    std::snprintf(buf, sizeof buf, "%s x%u,x%u,%d", std::string(o.mnemonic).c_str(),
                  ins.rd, ins.rs1, ins.imm);
  }
  return buf;
}

std::string to_text(const TestProgram& program) {
  std::string out;
  for (const Instruction& ins : program.instructions) {
    out += to_text(ins);
    out += '\n';
  }
  return out;
}

Instruction parse_instruction(std::string_view text) {
  const std::string line = trim(text);
  const std::size_t space = line.find_first_of(" \t");
  if (space == std::string::npos) throw ParseError("missing operands: '" + line + "'");
  const std::string mnemonic = line.substr(0, space);
  const std::string rest = trim(std::string_view(line).substr(space));

  if (mnemonic == ".word") {
    std::uint32_t word = 0;
    std::string_view digits = rest;
    int base = 10;
    if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
      digits.remove_prefix(2);
      base = 16;
    }
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), word, base);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
      throw ParseError("bad .word '" + rest + "'");
    }
    return Instruction::decode(word);
  }

  const OpInfo* found = nullptr;
  for (const OpInfo& o : kOps) {
    if (o.mnemonic == mnemonic) found = &o;
  }
  if (found == nullptr) throw ParseError("unknown mnemonic '" + mnemonic + "'");

  std::vector<std::string> operands;
  std::stringstream ss(rest);
  std::string tok;
  while (std::getline(ss, tok, ',')) operands.push_back(trim(tok));
  if (operands.size() != 3) {
    throw ParseError("expected 3 operands in '" + line + "'");
  }
  const unsigned rd = parse_reg(operands[0]);
  const unsigned rs1 = parse_reg(operands[1]);
  unsigned rs2 = 0;
  std::int32_t imm = 0;
  if (found->fields & kFieldRs2) {
    rs2 = parse_reg(operands[2]);
  } else {
    imm = parse_imm(operands[2]);
  }
  Instruction ins = Instruction::make(found->op, rd, rs1, rs2, imm);
  if (!ins.canonical()) {
    throw ParseError("operand not used by '" + mnemonic + "' must be zero: '" + line + "'");
  }
  return ins;
}

TestProgram parse_program(std::string_view text) {
  TestProgram program;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    if (!trim(line).empty()) program.instructions.push_back(parse_instruction(line));
    pos = end + 1;
  }
  return program;
}

std::vector<std::uint8_t> to_binary(const TestProgram& program) {
  std::vector<std::uint8_t> out;
  out.reserve(program.instructions.size() * 4);
  for (const Instruction& ins : program.instructions) {
    const std::uint32_t w = ins.encoding();
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(w >> (8 * b)));
  }
  return out;
}

TestProgram parse_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 4 != 0) throw ParseError("binary program length not a multiple of 4");
  TestProgram program;
  for (std::size_t i = 0; i < bytes.size(); i += 4) {
    const std::uint32_t w = static_cast<std::uint32_t>(bytes[i]) |
                            (static_cast<std::uint32_t>(bytes[i + 1]) << 8) |
                            (static_cast<std::uint32_t>(bytes[i + 2]) << 16) |
                            (static_cast<std::uint32_t>(bytes[i + 3]) << 24);
    program.instructions.push_back(Instruction::decode(w));
  }
  return program;
}

Instruction random_instruction(InstrType type, Rng& rng) {
  const auto ops = ops_of_type(type);
  const OpInfo& o = info(ops[rng.below(ops.size())]);
  unsigned rd = 0, rs1 = 0, rs2 = 0;
  std::int32_t imm = 0;
  // Draw every field so the number of random draws is independent of opcode.
  const auto r_rd = static_cast<unsigned>(rng.below(kNumRegs));
  const auto r_rs1 = static_cast<unsigned>(rng.below(kNumRegs));
  const auto r_rs2 = static_cast<unsigned>(rng.below(kNumRegs));
  const auto r_imm = static_cast<std::int32_t>(rng.between(o.imm_lo, o.imm_hi));
  if (o.fields & kFieldRd) rd = r_rd;
  if (o.fields & kFieldRs1) rs1 = r_rs1;
  if (o.fields & kFieldRs2) rs2 = r_rs2;
  if (o.fields & kFieldImm) imm = r_imm;
  return Instruction::make(o.op, rd, rs1, rs2, imm);
}

Instruction random_instruction(Rng& rng) {
  return random_instruction(kAllInstrTypes[rng.below(kNumInstrTypes)], rng);
}

}  // namespace swarmfuzz::isa
