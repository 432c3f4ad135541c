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

#include <array>
#include <cstdint>

#include "swarmfuzz/dut.hpp"

namespace swarmfuzz::dut {
namespace {

using isa::Instruction;
using isa::Op;

struct Trap {
  Cause cause;
};

class GoldenModel {
 public:
  explicit GoldenModel(const isa::TestProgram& test) : test_(test) {
    csr_[static_cast<unsigned>(isa::Csr::Status)] = kStatusReset;
  }

  ArchTrace run() {
    ArchTrace trace;
    trace.test_id = test_.id;
    const auto n = static_cast<std::uint32_t>(test_.instructions.size());
    std::uint32_t pc = 0;
    while (pc < n) {
      const Instruction& ins = test_.instructions[pc];
      TraceEntry e;
      e.pc = pc;
      e.encoding = ins.encoding();
      std::uint32_t next = pc + 1;
      const std::optional<Cause> fault = execute(ins, pc, n, e, next);
      ++cycles_;
      if (fault) {
        e.gpr.reset();
        e.memory.reset();
        e.csrs.clear();
        const bool halted = take_trap(*fault, pc, e);
        e.privilege = priv_;
        trace.entries.push_back(std::move(e));
        if (halted) break;
        pc = pc + 1;
        continue;
      }
      ++instret_;
      if (ins.op() == Op::Ebreak) {
        e.csrs.push_back({static_cast<std::uint16_t>(isa::Csr::Instret), instret_});
      }
      e.privilege = priv_;
      trace.entries.push_back(std::move(e));
      pc = next;
    }
    return trace;
  }

 private:
  std::uint32_t reg(unsigned i) const { return x_[i]; }

  void write_reg(TraceEntry& e, unsigned rd, std::uint32_t value) {
    if (rd != 0) x_[rd] = value;
    e.gpr = GprWrite{static_cast<std::uint8_t>(rd), rd == 0 ? 0u : value};
  }

  std::uint32_t read_csr(unsigned id) const {
    if (id == static_cast<unsigned>(isa::Csr::Instret)) return instret_;
    if (id == static_cast<unsigned>(isa::Csr::Timer)) return cycles_;
    return csr_[id];
  }

  static unsigned depth_of(std::uint32_t status) { return (status >> 1) & 3u; }

  // Returns true on double fault.
  bool take_trap(Cause cause, std::uint32_t pc, TraceEntry& e) {
    const std::uint32_t status = csr_[static_cast<unsigned>(isa::Csr::Status)];
    const unsigned depth = depth_of(status);
    if (depth >= kMaxTrapDepth) {
      e.exception = Cause::DoubleFault;
      return true;
    }
    e.exception = cause;
    const std::uint32_t new_status =
        ((depth + 1) << 1) | (priv_ == Privilege::Machine ? 1u : 0u);
    csr_[static_cast<unsigned>(isa::Csr::Status)] = new_status;
    csr_[static_cast<unsigned>(isa::Csr::Epc)] = pc;
    csr_[static_cast<unsigned>(isa::Csr::Cause)] = static_cast<std::uint32_t>(cause);
    e.csrs = {{static_cast<std::uint16_t>(isa::Csr::Status), new_status},
              {static_cast<std::uint16_t>(isa::Csr::Epc), pc},
              {static_cast<std::uint16_t>(isa::Csr::Cause),
               static_cast<std::uint32_t>(cause)}};
    priv_ = Privilege::Machine;
    return false;
  }

  std::uint32_t load(std::uint32_t addr, unsigned width) const {
    const std::uint32_t word = mem_[addr / 4];
    const unsigned shift = (addr % 4) * 8;
    const std::uint32_t mask = width == 4 ? 0xffffffffu : ((1u << (8 * width)) - 1);
    return (word >> shift) & mask;
  }

  void store(std::uint32_t addr, unsigned width, std::uint32_t data) {
    std::uint32_t& word = mem_[addr / 4];
    const unsigned shift = (addr % 4) * 8;
    const std::uint32_t mask = width == 4 ? 0xffffffffu : ((1u << (8 * width)) - 1);
    word = (word & ~(mask << shift)) | ((data & mask) << shift);
  }

  std::optional<Cause> check_access(std::uint32_t addr, unsigned width,
                                    bool is_store) const {
    if (addr % width != 0) {
      return is_store ? Cause::StoreMisaligned : Cause::LoadMisaligned;
    }
    if (addr >= kMemBytes || addr + width > kMemBytes ||
        (priv_ == Privilege::User && addr < kProtectedBytes)) {
      return is_store ? Cause::StoreAccessFault : Cause::LoadAccessFault;
    }
    return std::nullopt;
  }

  std::optional<Cause> execute(const Instruction& ins, std::uint32_t pc,
                               std::uint32_t n, TraceEntry& e,
                               std::uint32_t& next) {
    const std::uint32_t a = reg(ins.rs1);
    const std::uint32_t b = reg(ins.rs2);
    const auto sa = static_cast<std::int32_t>(a);
    const auto sb = static_cast<std::int32_t>(b);
    const auto imm = static_cast<std::int32_t>(ins.imm);
    const auto uimm = static_cast<std::uint32_t>(imm);

    switch (ins.op()) {
      case Op::Add: write_reg(e, ins.rd, a + b); break;
      case Op::Sub: write_reg(e, ins.rd, a - b); break;
      case Op::And: write_reg(e, ins.rd, a & b); break;
      case Op::Or: write_reg(e, ins.rd, a | b); break;
      case Op::Xor: write_reg(e, ins.rd, a ^ b); break;
      case Op::Sll: write_reg(e, ins.rd, a << (b & 31)); break;
      case Op::Srl: write_reg(e, ins.rd, a >> (b & 31)); break;
      case Op::Sra: write_reg(e, ins.rd, static_cast<std::uint32_t>(sa >> (b & 31))); break;
      case Op::Slt: write_reg(e, ins.rd, sa < sb ? 1 : 0); break;
      case Op::Sltu: write_reg(e, ins.rd, a < b ? 1 : 0); break;
      case Op::Mul: write_reg(e, ins.rd, a * b); break;
      case Op::Mulhu:
        write_reg(e, ins.rd,
                  static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32));
        break;
      case Op::Div:
        if (b == 0) {
          write_reg(e, ins.rd, 0xffffffffu);
        } else if (sa == INT32_MIN && sb == -1) {
          write_reg(e, ins.rd, a);
        } else {
          write_reg(e, ins.rd, static_cast<std::uint32_t>(sa / sb));
        }
        break;
      case Op::Rem:
        if (b == 0) {
          write_reg(e, ins.rd, a);
        } else if (sa == INT32_MIN && sb == -1) {
          write_reg(e, ins.rd, 0);
        } else {
          write_reg(e, ins.rd, static_cast<std::uint32_t>(sa % sb));
        }
        break;

      case Op::Addi: write_reg(e, ins.rd, a + uimm); break;
      case Op::Andi: write_reg(e, ins.rd, a & uimm); break;
      case Op::Ori: write_reg(e, ins.rd, a | uimm); break;
      case Op::Xori: write_reg(e, ins.rd, a ^ uimm); break;
      case Op::Slli:
      case Op::Srli:
      case Op::Srai: {
        if (imm < 0 || imm > 31) return Cause::IllegalInstruction;
        std::uint32_t r = 0;
        if (ins.op() == Op::Slli) r = a << imm;
        if (ins.op() == Op::Srli) r = a >> imm;
        if (ins.op() == Op::Srai) r = static_cast<std::uint32_t>(sa >> imm);
        write_reg(e, ins.rd, r);
        break;
      }
      case Op::Slti: write_reg(e, ins.rd, sa < imm ? 1 : 0); break;
      case Op::Sltiu: write_reg(e, ins.rd, a < uimm ? 1 : 0); break;
      case Op::Lui: write_reg(e, ins.rd, (uimm & 0xfff) << 12); break;

      case Op::Lb:
      case Op::Lh:
      case Op::Lw:
      case Op::Lbu:
      case Op::Lhu: {
        const Op op = ins.op();
        const unsigned width = (op == Op::Lw) ? 4 : (op == Op::Lh || op == Op::Lhu) ? 2 : 1;
        const std::uint32_t addr = a + uimm;
        if (auto fault = check_access(addr, width, false)) return fault;
        const std::uint32_t raw = load(addr, width);
        std::uint32_t value = raw;
        if (op == Op::Lb) value = static_cast<std::uint32_t>(static_cast<std::int8_t>(raw));
        if (op == Op::Lh) value = static_cast<std::uint32_t>(static_cast<std::int16_t>(raw));
        e.memory = MemAccess{addr, raw, static_cast<std::uint8_t>(width), false};
        write_reg(e, ins.rd, value);
        break;
      }

      case Op::Sb:
      case Op::Sh:
      case Op::Sw: {
        const unsigned width = ins.op() == Op::Sw ? 4 : ins.op() == Op::Sh ? 2 : 1;
        const std::uint32_t addr = a + uimm;
        if (auto fault = check_access(addr, width, true)) return fault;
        const std::uint32_t mask = width == 4 ? 0xffffffffu : ((1u << (8 * width)) - 1);
        const std::uint32_t data = reg(ins.rd) & mask;
        store(addr, width, data);
        e.memory = MemAccess{addr, data, static_cast<std::uint8_t>(width), true};
        break;
      }

      case Op::Beq:
      case Op::Bne:
      case Op::Blt:
      case Op::Bge:
      case Op::Bltu:
      case Op::Bgeu: {
        const std::uint32_t lhs = reg(ins.rd);
        const std::uint32_t rhs = a;
        bool taken = false;
        switch (ins.op()) {
          case Op::Beq: taken = lhs == rhs; break;
          case Op::Bne: taken = lhs != rhs; break;
          case Op::Blt: taken = static_cast<std::int32_t>(lhs) < static_cast<std::int32_t>(rhs); break;
          case Op::Bge: taken = static_cast<std::int32_t>(lhs) >= static_cast<std::int32_t>(rhs); break;
          case Op::Bltu: taken = lhs < rhs; break;
          default: taken = lhs >= rhs; break;
        }
        if (taken) next = std::min(pc + 1 + (uimm & 0xf), n);
        break;
      }

      case Op::Csrrw:
      case Op::Csrrs:
      case Op::Csrrc: {
        if (priv_ == Privilege::User) return Cause::IllegalInstruction;
        const unsigned id = uimm & 0xfff;
        if (id >= isa::kNumCsrs) return Cause::IllegalInstruction;
        const bool writes = ins.op() == Op::Csrrw || ins.rs1 != 0;
        const bool read_only = id == static_cast<unsigned>(isa::Csr::Instret) ||
                               id == static_cast<unsigned>(isa::Csr::Timer);
        if (writes && read_only) return Cause::IllegalInstruction;
        const std::uint32_t old = read_csr(id);
        if (writes) {
          std::uint32_t value = ins.op() == Op::Csrrw   ? a
                                : ins.op() == Op::Csrrs ? (old | a)
                                                        : (old & ~a);
          if (id == static_cast<unsigned>(isa::Csr::Status)) value &= kStatusMask;
          csr_[id] = value;
          e.csrs.push_back({static_cast<std::uint16_t>(id), value});
        }
        write_reg(e, ins.rd, old);
        break;
      }
      case Op::Ecall:
        return priv_ == Privilege::User ? Cause::EcallUser : Cause::EcallMachine;
      case Op::Ebreak:
        break;
      case Op::Mret: {
        if (priv_ == Privilege::User) return Cause::IllegalInstruction;
        std::uint32_t& status = csr_[static_cast<unsigned>(isa::Csr::Status)];
        priv_ = (status & 1u) ? Privilege::Machine : Privilege::User;
        const unsigned depth = depth_of(status);
        status = (depth > 0 ? depth - 1 : 0) << 1;
        e.csrs.push_back({static_cast<std::uint16_t>(isa::Csr::Status), status});
        break;
      }
      case Op::Fence:
        break;
      case Op::Illegal:
        return Cause::IllegalInstruction;
    }
    return std::nullopt;
  }

  const isa::TestProgram& test_;
  std::array<std::uint32_t, isa::kNumRegs> x_{};
  std::array<std::uint32_t, kMemBytes / 4> mem_{};
  std::array<std::uint32_t, isa::kNumCsrs> csr_{};
  std::uint32_t instret_ = 0;
  std::uint32_t cycles_ = 0;
  Privilege priv_ = Privilege::Machine;
};

}  // namespace

ArchTrace golden_execute(const isa::TestProgram& test) {
  return GoldenModel(test).run();
}

}  // namespace swarmfuzz::dut
