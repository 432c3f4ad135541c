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

#include <algorithm>
#include <array>
#include <cstdint>

#include "swarmfuzz/dut.hpp"

namespace swarmfuzz::dut {
namespace {

using isa::Csr;
using isa::Instruction;
using isa::InstrType;
using isa::Op;

constexpr unsigned csr_id(Csr c) { return static_cast<unsigned>(c); }

constexpr std::uint32_t lane_mask(unsigned width) {
  return width == 4 ? 0xffffffffu : ((1u << (8 * width)) - 1);
}

constexpr unsigned access_width(Op op) {
  switch (op) {
    case Op::Lw:
    case Op::Sw: return 4;
    case Op::Lh:
    case Op::Lhu:
    case Op::Sh: return 2;
    default: return 1;
  }
}

// Outcome of the execute stage for one instruction.
enum class Retire { Commit, Trap, Drop };

class Dut {
 public:
  Dut(const isa::TestProgram& test, BugMask bugs) : test_(test), bugs_(bugs) {
    csr_[csr_id(Csr::Status)] = kStatusReset;
  }

  SimulationResult run() {
    SimulationResult out;
    out.trace.test_id = test_.id;
    n_ = static_cast<std::uint32_t>(test_.instructions.size());
    pc_ = 0;
    while (pc_ < n_) {
      const Instruction& ins = test_.instructions[pc_];
      entry_ = TraceEntry{};
      entry_.pc = pc_;
      entry_.encoding = ins.encoding();
      next_pc_ = pc_ + 1;
      fault_.reset();

      decode(ins);
      const Retire r = fault_ ? Retire::Trap : execute(ins);
      ++cycles_;

      if (r == Retire::Drop) {
        pc_ = next_pc_;
        continue;
      }
      if (r == Retire::Trap || fault_) {
        entry_.gpr.reset();
        entry_.memory.reset();
        entry_.csrs.clear();
        const bool halted = take_trap(*fault_);
        entry_.privilege = priv_;
        out.trace.entries.push_back(std::move(entry_));
        last_store_.reset();
        if (halted) break;
        ++pc_;
        continue;
      }
      if (!(ins.op() == Op::Ebreak && active(BugId::B6))) ++instret_;
      if (ins.op() == Op::Ebreak) {
        entry_.csrs.push_back({static_cast<std::uint16_t>(Csr::Instret), instret_});
      }
      entry_.privilege = priv_;
      if (!entry_.memory || !entry_.memory->is_store) last_store_.reset();
      out.trace.entries.push_back(std::move(entry_));
      pc_ = next_pc_;
    }
    out.coverage = coverage_;
    return out;
  }

 private:
  struct StoreRecord {
    std::uint32_t address;
    std::uint32_t old_word;
  };

  bool active(BugId id) const { return (bugs_ & bug_bit(id)) != 0; }

  bool cov(Site site, bool taken) {
    coverage_.mark(point_id(site, taken));
    return taken;
  }

  unsigned depth() const { return (csr_[csr_id(Csr::Status)] >> 1) & 3u; }
  bool user() const { return priv_ == Privilege::User; }

  void raise(Cause c) { fault_ = c; }

  void write_rd(unsigned rd, std::uint32_t value) {
    if (rd != 0) x_[rd] = value;
    entry_.gpr = GprWrite{static_cast<std::uint8_t>(rd), rd == 0 ? 0u : value};
  }

  static bool writes_rd(InstrType type, Op op) {
    return type == InstrType::AluR || type == InstrType::AluI ||
           type == InstrType::Load || op == Op::Csrrw || op == Op::Csrrs ||
           op == Op::Csrrc;
  }

  void decode(const Instruction& ins) {
    cov(Site::DecUserMode, user());
    cov(Site::DecTrapNested, depth() > 0);
    if (!cov(Site::DecOpcodeDefined, ins.op_info() != nullptr)) {
      raise(Cause::IllegalInstruction);
      return;
    }
    cov(Site::DecCanonical, ins.canonical());
    const InstrType type = ins.type();
    if (cov(Site::DecIsAluR, type == InstrType::AluR)) {
      cov(Site::DecRs2IsX0, ins.rs2 == 0);
      cov(Site::DecRs1EqRs2, ins.rs1 == ins.rs2);
    } else if (cov(Site::DecIsAluI, type == InstrType::AluI)) {
    } else if (cov(Site::DecIsLoad, type == InstrType::Load)) {
    } else if (cov(Site::DecIsStore, type == InstrType::Store)) {
    } else {
      cov(Site::DecIsBranch, type == InstrType::Branch);
    }
    if (writes_rd(type, ins.op())) cov(Site::DecRdIsX0, ins.rd == 0);
    if (ins.reads(isa::kFieldRs1)) cov(Site::DecRs1IsX0, ins.rs1 == 0);
  }

  Retire execute(const Instruction& ins) {
    switch (ins.type()) {
      case InstrType::AluR: return exec_alu_r(ins);
      case InstrType::AluI: return exec_alu_i(ins);
      case InstrType::Load: return exec_load(ins);
      case InstrType::Store: return exec_store(ins);
      case InstrType::Branch: return exec_branch(ins);
      case InstrType::System: return exec_system(ins);
    }
    return Retire::Commit;
  }

  Retire exec_alu_r(const Instruction& ins) {
    const std::uint32_t a = x_[ins.rs1];
    const std::uint32_t b = x_[ins.rs2];
    const auto sa = static_cast<std::int32_t>(a);
    const auto sb = static_cast<std::int32_t>(b);
    const unsigned sh = b & 31;
    std::uint32_t r = 0;
    switch (ins.op()) {
      case Op::Add:
        r = a + b;
        cov(Site::AddOverflow, (((a ^ r) & (b ^ r)) >> 31) != 0);
        cov(Site::AddResultZero, r == 0);
        break;
      case Op::Sub:
        r = a - b;
        cov(Site::SubOverflow, (((a ^ b) & (a ^ r)) >> 31) != 0);
        cov(Site::SubResultZero, r == 0);
        break;
      case Op::And:
        r = a & b;
        cov(Site::AndResultZero, r == 0);
        break;
      case Op::Or:
        r = a | b;
        cov(Site::OrResultZero, r == 0);
        break;
      case Op::Xor:
        r = a ^ b;
        cov(Site::XorResultZero, r == 0);
        break;
      case Op::Sll:
        if (!cov(Site::SllShamtZero, sh == 0)) cov(Site::SllBitsLost, (a >> (32 - sh)) != 0);
        r = a << sh;
        break;
      case Op::Srl:
        if (!cov(Site::SrlShamtZero, sh == 0)) cov(Site::SrlBitsLost, (a & ((1u << sh) - 1)) != 0);
        r = a >> sh;
        break;
      case Op::Sra:
        cov(Site::SraShamtZero, sh == 0);
        cov(Site::SraNegative, sa < 0);
        r = static_cast<std::uint32_t>(sa >> sh);
        break;
      case Op::Slt:
        cov(Site::SltSignsDiffer, ((a ^ b) >> 31) != 0);
        r = cov(Site::SltResult, sa < sb) ? 1 : 0;
        break;
      case Op::Sltu:
        r = cov(Site::SltuResult, a < b) ? 1 : 0;
        break;
      case Op::Mul:
        cov(Site::MulOverflow, ((static_cast<std::uint64_t>(a) * b) >> 32) != 0);
        if (cov(Site::MulSquare, ins.rs1 == ins.rs2) && active(BugId::B2)) {
          r = a + b;
        } else {
          r = a * b;
        }
        break;
      case Op::Mulhu:
        r = static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32);
        cov(Site::MulhuResultZero, r == 0);
        break;
      case Op::Div:
        if (cov(Site::DivByZero, b == 0)) {
          r = 0xffffffffu;
        } else if (cov(Site::DivOverflow, sa == INT32_MIN && sb == -1)) {
          r = a;
        } else {
          cov(Site::DivSignsDiffer, (sa < 0) != (sb < 0));
          r = static_cast<std::uint32_t>(sa / sb);
        }
        break;
      case Op::Rem:
        if (cov(Site::RemByZero, b == 0)) {
          r = a;
        } else if (cov(Site::RemOverflow, sa == INT32_MIN && sb == -1)) {
          r = 0;
        } else {
          r = static_cast<std::uint32_t>(sa % sb);
          cov(Site::RemResultZero, r == 0);
        }
        break;
      default:
        break;
    }
    write_rd(ins.rd, r);
    return Retire::Commit;
  }

  Retire exec_alu_i(const Instruction& ins) {
    const std::uint32_t a = x_[ins.rs1];
    const auto sa = static_cast<std::int32_t>(a);
    const auto imm = static_cast<std::int32_t>(ins.imm);
    const auto uimm = static_cast<std::uint32_t>(imm);
    std::uint32_t r = 0;
    switch (ins.op()) {
      case Op::Addi:
        cov(Site::AddiImmNegative, imm < 0);
        r = a + uimm;
        cov(Site::AddiResultZero, r == 0);
        break;
      case Op::Andi:
        r = a & uimm;
        cov(Site::AndiResultZero, r == 0);
        break;
      case Op::Ori:
        cov(Site::OriImmNegative, imm < 0);
        r = a | uimm;
        break;
      case Op::Xori:
        cov(Site::XoriInvert, imm == -1);
        r = a ^ uimm;
        break;
      case Op::Slli:
      case Op::Srli:
      case Op::Srai:
        if (!cov(Site::ShiftImmLegal, imm >= 0 && imm <= 31)) {
          raise(Cause::IllegalInstruction);
          return Retire::Trap;
        }
        if (ins.op() == Op::Slli) {
          if (!cov(Site::SlliShamtZero, imm == 0)) cov(Site::SlliBitsLost, (a >> (32 - imm)) != 0);
          r = a << imm;
        } else if (ins.op() == Op::Srli) {
          cov(Site::SrliShamtZero, imm == 0);
          r = a >> imm;
        } else {
          cov(Site::SraiNegative, sa < 0);
          r = static_cast<std::uint32_t>(sa >> imm);
        }
        break;
      case Op::Slti:
        r = cov(Site::SltiResult, sa < imm) ? 1 : 0;
        break;
      case Op::Sltiu:
        r = cov(Site::SltiuResult, a < uimm) ? 1 : 0;
        break;
      case Op::Lui:
        cov(Site::LuiUpperHalf, (uimm & 0x800) != 0);
        r = (uimm & 0xfff) << 12;
        break;
      default:
        break;
    }
    write_rd(ins.rd, r);
    return Retire::Commit;
  }

  static bool in_range(std::uint32_t addr, unsigned width) {
    return addr < kMemBytes && addr + width <= kMemBytes;
  }

  Retire exec_load(const Instruction& ins) {
    const Op op = ins.op();
    const unsigned width = access_width(op);
    cov(Site::LoadBaseX0, ins.rs1 == 0);
    const std::uint32_t addr = x_[ins.rs1] + static_cast<std::uint32_t>(ins.imm);
    if (!cov(Site::LoadAligned, addr % width == 0)) {
      raise(Cause::LoadMisaligned);
      return Retire::Trap;
    }
    if (!cov(Site::LoadInRange, in_range(addr, width))) {
      if (active(BugId::B1)) {
        entry_.memory = MemAccess{addr, 0, static_cast<std::uint8_t>(width), false};
        write_rd(ins.rd, 0);
        return Retire::Commit;
      }
      raise(Cause::LoadAccessFault);
      return Retire::Trap;
    }
    if (cov(Site::LoadUserProtected, user() && addr < kProtectedBytes)) {
      raise(Cause::LoadAccessFault);
      return Retire::Trap;
    }
    std::uint32_t word = mem_[addr / 4];
    if (cov(Site::LoadForwardHit, last_store_ && last_store_->address == addr) &&
        active(BugId::B4)) {
      word = last_store_->old_word;
    }
    const std::uint32_t raw = (word >> ((addr % 4) * 8)) & lane_mask(width);
    std::uint32_t value = raw;
    if (op == Op::Lb) {
      value = static_cast<std::uint32_t>(static_cast<std::int8_t>(raw));
      cov(Site::LoadSignNegative, (raw & 0x80) != 0);
    } else if (op == Op::Lh) {
      value = static_cast<std::uint32_t>(static_cast<std::int16_t>(raw));
      cov(Site::LoadSignNegative, (raw & 0x8000) != 0);
    }
    cov(Site::LoadValueZero, raw == 0);
    cov(Site::LoadWord, width == 4);
    entry_.memory = MemAccess{addr, raw, static_cast<std::uint8_t>(width), false};
    write_rd(ins.rd, value);
    return Retire::Commit;
  }

  Retire exec_store(const Instruction& ins) {
    const unsigned width = access_width(ins.op());
    cov(Site::StoreBaseX0, ins.rs1 == 0);
    const std::uint32_t addr = x_[ins.rs1] + static_cast<std::uint32_t>(ins.imm);
    if (!cov(Site::StoreAligned, addr % width == 0)) {
      raise(Cause::StoreMisaligned);
      return Retire::Trap;
    }
    if (!cov(Site::StoreInRange, in_range(addr, width)) ||
        cov(Site::StoreUserProtected, user() && addr < kProtectedBytes)) {
      raise(Cause::StoreAccessFault);
      return Retire::Trap;
    }
    const std::uint32_t mask = lane_mask(width);
    const std::uint32_t data = x_[ins.rd] & mask;
    cov(Site::StoreDataZero, data == 0);
    cov(Site::StoreWord, width == 4);
    std::uint32_t& word = mem_[addr / 4];
    cov(Site::StoreOverwrite, word != 0);
    const std::uint32_t old = word;
    const unsigned shift = (addr % 4) * 8;
    word = (word & ~(mask << shift)) | (data << shift);
    last_store_ = StoreRecord{addr, old};
    entry_.memory = MemAccess{addr, data, static_cast<std::uint8_t>(width), true};
    return Retire::Commit;
  }

  Retire exec_branch(const Instruction& ins) {
    const std::uint32_t lhs = x_[ins.rd];
    const std::uint32_t rhs = x_[ins.rs1];
    const auto slhs = static_cast<std::int32_t>(lhs);
    const auto srhs = static_cast<std::int32_t>(rhs);
    bool taken = false;
    switch (ins.op()) {
      case Op::Beq: taken = cov(Site::BeqTaken, lhs == rhs); break;
      case Op::Bne: taken = cov(Site::BneTaken, lhs != rhs); break;
      case Op::Blt: taken = cov(Site::BltTaken, slhs < srhs); break;
      case Op::Bge: taken = cov(Site::BgeTaken, slhs >= srhs); break;
      case Op::Bltu: taken = cov(Site::BltuTaken, lhs < rhs); break;
      case Op::Bgeu: taken = cov(Site::BgeuTaken, lhs >= rhs); break;
      default: break;
    }
    if (taken) {
      const std::uint32_t skip = static_cast<std::uint32_t>(ins.imm) & 0xf;
      cov(Site::BranchSkipZero, skip == 0);
      const std::uint32_t target = pc_ + 1 + skip;
      next_pc_ = cov(Site::BranchClamped, target > n_) ? n_ : target;
    }
    return Retire::Commit;
  }

  std::uint32_t read_csr(unsigned id) const {
    if (id == csr_id(Csr::Instret)) return instret_;
    if (id == csr_id(Csr::Timer)) return cycles_;
    return csr_[id];
  }

  Retire exec_csr(const Instruction& ins) {
    if (cov(Site::CsrUserMode, user())) {
      raise(Cause::IllegalInstruction);
      return Retire::Trap;
    }
    const unsigned id = static_cast<std::uint32_t>(ins.imm) & 0xfff;
    switch (ins.op()) {
      case Op::Csrrw: cov(Site::CsrrwRdIsX0, ins.rd == 0); break;
      case Op::Csrrs: cov(Site::CsrrsReadOnly, ins.rs1 == 0); break;
      default: cov(Site::CsrrcReadOnly, ins.rs1 == 0); break;
    }
    const bool writes = cov(Site::CsrWriteIntended, ins.op() == Op::Csrrw || ins.rs1 != 0);
    if (!cov(Site::CsrImplemented, id < isa::kNumCsrs)) {
      if (!writes && active(BugId::B3)) {
        write_rd(ins.rd, csr_[csr_id(Csr::Scratch)]);
        return Retire::Commit;
      }
      raise(Cause::IllegalInstruction);
      return Retire::Trap;
    }
    const bool counter = cov(Site::CsrIsCounter,
                             id == csr_id(Csr::Instret) || id == csr_id(Csr::Timer));
    if (cov(Site::CsrReadOnly, writes && counter)) {
      raise(Cause::IllegalInstruction);
      return Retire::Trap;
    }
    const std::uint32_t old = read_csr(id);
    cov(Site::CsrOldValueZero, old == 0);
    if (writes) {
      const std::uint32_t src = x_[ins.rs1];
      std::uint32_t value = ins.op() == Op::Csrrw   ? src
                            : ins.op() == Op::Csrrs ? (old | src)
                                                    : (old & ~src);
      if (cov(Site::CsrTargetsStatus, id == csr_id(Csr::Status))) {
        value &= kStatusMask;
        cov(Site::CsrStatusMppUser, (value & 1u) == 0);
        cov(Site::CsrStatusDepthSet, (value >> 1) != 0);
      }
      csr_[id] = value;
      entry_.csrs.push_back({static_cast<std::uint16_t>(id), value});
    }
    write_rd(ins.rd, old);
    return Retire::Commit;
  }

  Retire exec_system(const Instruction& ins) {
    const Op op = ins.op();
    if (cov(Site::SysIsCsr, op == Op::Csrrw || op == Op::Csrrs || op == Op::Csrrc)) {
      return exec_csr(ins);
    }
    switch (op) {
      case Op::Ecall:
        raise(cov(Site::EcallFromUser, user()) ? Cause::EcallUser : Cause::EcallMachine);
        return Retire::Trap;
      case Op::Ebreak:
        cov(Site::EbreakFromUser, user());
        return Retire::Commit;
      case Op::Mret: {
        if (cov(Site::MretFromUser, user())) {
          raise(Cause::IllegalInstruction);
          return Retire::Trap;
        }
        std::uint32_t& status = csr_[csr_id(Csr::Status)];
        const unsigned d = depth();
        cov(Site::MretDepthZero, d == 0);
        priv_ = cov(Site::MretToUser, (status & 1u) == 0) ? Privilege::User
                                                           : Privilege::Machine;
        status = (d > 0 ? d - 1 : 0) << 1;
        entry_.csrs.push_back({static_cast<std::uint16_t>(Csr::Status), status});
        return Retire::Commit;
      }
      case Op::Fence:
        if (cov(Site::FenceImmNonzero, ins.imm != 0) && active(BugId::B5)) {
          return Retire::Drop;
        }
        return Retire::Commit;
      default:
        return Retire::Commit;
    }
  }

  // Returns true on double fault.
  bool take_trap(Cause cause) {
    const unsigned d = depth();
    if (cov(Site::TrapDoubleFault, d >= kMaxTrapDepth)) {
      entry_.exception = Cause::DoubleFault;
      return true;
    }
    cov(Site::TrapFromUser, user());
    cov(Site::TrapIllegal, cause == Cause::IllegalInstruction);
    const bool load_side = cause == Cause::LoadMisaligned || cause == Cause::LoadAccessFault;
    const bool store_side = cause == Cause::StoreMisaligned || cause == Cause::StoreAccessFault;
    if (cov(Site::TrapMemory, load_side || store_side)) cov(Site::TrapLoadSide, load_side);

    entry_.exception = cause;
    const std::uint32_t status = ((d + 1) << 1) | (user() ? 0u : 1u);
    csr_[csr_id(Csr::Status)] = status;
    csr_[csr_id(Csr::Epc)] = pc_;
    csr_[csr_id(Csr::Cause)] = static_cast<std::uint32_t>(cause);
    entry_.csrs = {{static_cast<std::uint16_t>(Csr::Status), status},
                   {static_cast<std::uint16_t>(Csr::Epc), pc_},
                   {static_cast<std::uint16_t>(Csr::Cause), static_cast<std::uint32_t>(cause)}};
    priv_ = Privilege::Machine;
    return false;
  }

  const isa::TestProgram& test_;
  BugMask bugs_;
  CoverageMap coverage_;
  TraceEntry entry_;
  std::optional<Cause> fault_;
  std::optional<StoreRecord> last_store_;
  std::array<std::uint32_t, isa::kNumRegs> x_{};
  std::array<std::uint32_t, kMemBytes / 4> mem_{};
  std::array<std::uint32_t, isa::kNumCsrs> csr_{};
  std::uint32_t instret_ = 0;
  std::uint32_t cycles_ = 0;
  std::uint32_t n_ = 0;
  std::uint32_t pc_ = 0;
  std::uint32_t next_pc_ = 0;
  Privilege priv_ = Privilege::Machine;
};

constexpr std::string_view kSiteNames[] = {
#define SWARMFUZZ_SITE(name) #name,
#include "swarmfuzz/dut_sites.def"
#undef SWARMFUZZ_SITE
};

}  // namespace

std::string_view site_name(Site site) {
  return kSiteNames[static_cast<std::size_t>(site)];
}

std::size_t coverage_point_count() { return kNumCoveragePoints; }

std::string_view privilege_name(Privilege p) {
  return p == Privilege::Machine ? "machine" : "user";
}

std::string_view cause_name(Cause c) {
  switch (c) {
    case Cause::IllegalInstruction: return "illegal_instruction";
    case Cause::LoadMisaligned: return "load_misaligned";
    case Cause::LoadAccessFault: return "load_access_fault";
    case Cause::StoreMisaligned: return "store_misaligned";
    case Cause::StoreAccessFault: return "store_access_fault";
    case Cause::EcallUser: return "ecall_user";
    case Cause::EcallMachine: return "ecall_machine";
    case Cause::DoubleFault: return "double_fault";
  }
  return "unknown";
}

SimulationResult simulate(const isa::TestProgram& test, BugMask bugs) {
  return Dut(test, bugs).run();
}

}  // namespace swarmfuzz::dut
