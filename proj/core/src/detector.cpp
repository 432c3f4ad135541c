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

#include "swarmfuzz/detector.hpp"

#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "swarmfuzz/error.hpp"

namespace swarmfuzz::detector {
namespace {

using dut::TraceEntry;
using isa::Op;

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

std::string describe(Field f, const TraceEntry& e) {
  switch (f) {
    case Field::Commit:
      return "pc=" + std::to_string(e.pc) + " enc=" + hex(e.encoding);
    case Field::Exception:
      return e.exception ? std::string(dut::cause_name(*e.exception)) : "none";
    case Field::Gpr:
      return e.gpr ? "x" + std::to_string(e.gpr->index) + "=" + hex(e.gpr->value) : "none";
    case Field::Csr: {
      if (e.csrs.empty()) return "none";
      std::string out;
      for (const dut::CsrWrite& w : e.csrs) {
        if (!out.empty()) out += ',';
        out += std::string(isa::csr_name(w.id)) + "=" + hex(w.value);
      }
      return out;
    }
    case Field::Privilege:
      return std::string(dut::privilege_name(e.privilege));
    case Field::Memory: {
      if (!e.memory) return "none";
      const dut::MemAccess& m = *e.memory;
      return std::string(m.is_store ? "store" : "load") + "[" + std::to_string(m.width) +
             "]@" + hex(m.address) + "=" + hex(m.data);
    }
  }
  return "?";
}

bool field_equal(Field f, const TraceEntry& a, const TraceEntry& b) {
  switch (f) {
    case Field::Commit: return a.pc == b.pc && a.encoding == b.encoding;
    case Field::Exception: return a.exception == b.exception;
    case Field::Gpr: return a.gpr == b.gpr;
    case Field::Csr: return a.csrs == b.csrs;
    case Field::Privilege: return a.privilege == b.privilege;
    case Field::Memory: return a.memory == b.memory;
  }
  return true;
}

constexpr Field kFields[] = {Field::Commit, Field::Gpr,       Field::Exception,
                             Field::Csr,    Field::Privilege, Field::Memory};

isa::Instruction golden_instruction(const Mismatch& m) {
  return isa::Instruction::decode(m.golden_entry->encoding);
}

bool is_load(Op op) {
  return op == Op::Lb || op == Op::Lh || op == Op::Lw || op == Op::Lbu || op == Op::Lhu;
}

}  // namespace

std::string_view field_name(Field f) {
  switch (f) {
    case Field::Commit: return "commit";
    case Field::Exception: return "exception";
    case Field::Gpr: return "gpr";
    case Field::Csr: return "csr";
    case Field::Privilege: return "privilege";
    case Field::Memory: return "memory";
  }
  return "?";
}

std::vector<Mismatch> compare_traces(const dut::ArchTrace& dut,
                                     const dut::ArchTrace& golden) {
  if (dut.test_id != golden.test_id) {
    throw ContractViolation("compare_traces: traces from different tests");
  }
  std::vector<Mismatch> out;
  const std::size_t common = std::min(dut.entries.size(), golden.entries.size());
  auto make = [&](std::size_t i, Field f) {
    Mismatch m;
    m.test_id = golden.test_id;
    m.instruction_index = i;
    m.field = f;
    m.cascading = !out.empty() && out.front().instruction_index < i;
    if (i < dut.entries.size()) m.dut_entry = dut.entries[i];
    if (i < golden.entries.size()) m.golden_entry = golden.entries[i];
    if (i > 0 && i - 1 < golden.entries.size()) m.golden_previous = golden.entries[i - 1];
    m.dut_value = m.dut_entry ? describe(f, *m.dut_entry) : "none";
    m.golden_value = m.golden_entry ? describe(f, *m.golden_entry) : "none";
    m.matched_bug = classify(m);
    return m;
  };

  for (std::size_t i = 0; i < common; ++i) {
    for (Field f : kFields) {
      if (!field_equal(f, dut.entries[i], golden.entries[i])) out.push_back(make(i, f));
    }
  }
  if (dut.entries.size() != golden.entries.size()) out.push_back(make(common, Field::Commit));
  return out;
}

std::optional<dut::BugId> classify(const Mismatch& m) {
  if (!m.golden_entry) return std::nullopt;
  const TraceEntry& golden = *m.golden_entry;
  const isa::Instruction ins = golden_instruction(m);
  const Op op = ins.op();
  const bool dut_faulted = m.dut_entry && m.dut_entry->exception.has_value();

  switch (m.field) {
    case Field::Exception:
      if (dut_faulted || !golden.exception) return std::nullopt;
      if (*golden.exception == dut::Cause::LoadAccessFault && is_load(op)) {
        return dut::BugId::B1;
      }
      if (*golden.exception == dut::Cause::IllegalInstruction &&
          (op == Op::Csrrs || op == Op::Csrrc) && ins.rs1 == 0 &&
          (static_cast<std::uint32_t>(ins.imm) & 0xfff) >= isa::kNumCsrs) {
        return dut::BugId::B3;
      }
      return std::nullopt;
    case Field::Gpr:
    case Field::Memory:
      if (op == Op::Mul && ins.rs1 == ins.rs2 && m.field == Field::Gpr) {
        return dut::BugId::B2;
      }
      if (is_load(op) && golden.memory && m.golden_previous &&
          m.golden_previous->memory && m.golden_previous->memory->is_store &&
          !m.golden_previous->exception &&
          m.golden_previous->memory->address == golden.memory->address) {
        return dut::BugId::B4;
      }
      return std::nullopt;
    case Field::Commit:
      if (op == Op::Fence && ins.imm != 0 && !golden.exception) return dut::BugId::B5;
      return std::nullopt;
    case Field::Csr: {
      if (op != Op::Ebreak || !m.dut_entry || golden.exception) return std::nullopt;
      const auto instret = static_cast<std::uint16_t>(isa::Csr::Instret);
      auto find = [&](const TraceEntry& e) -> std::optional<std::uint32_t> {
        for (const dut::CsrWrite& w : e.csrs) {
          if (w.id == instret) return w.value;
        }
        return std::nullopt;
      };
      const auto g = find(golden);
      const auto d = find(*m.dut_entry);
      if (g && d && *g != *d) return dut::BugId::B6;
      return std::nullopt;
    }
    case Field::Privilege:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<dut::BugId> detected_bugs(const std::vector<Mismatch>& mismatches) {
  std::vector<dut::BugId> out;
  for (const Mismatch& m : mismatches) {
    if (m.cascading || !m.matched_bug) continue;
    if (std::find(out.begin(), out.end(), *m.matched_bug) == out.end()) {
      out.push_back(*m.matched_bug);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string to_json_line(const Mismatch& m) {
  nlohmann::ordered_json j;
  j["test_id"] = m.test_id;
  j["instruction_index"] = m.instruction_index;
  j["field"] = field_name(m.field);
  j["dut_value"] = m.dut_value;
  j["golden_value"] = m.golden_value;
  if (m.matched_bug) {
    j["matched_bug"] = dut::bug_info(*m.matched_bug).name;
  } else {
    j["matched_bug"] = nullptr;
  }
  j["cascading"] = m.cascading;
  return j.dump();
}

}  // namespace swarmfuzz::detector
