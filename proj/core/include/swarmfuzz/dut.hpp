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

// Instrumented toy processor (the design under test) and its golden
// reference model.
//
// Machine: 16 x 32-bit registers (x0 hardwired to zero), 4 KiB data memory
// organized as 1024 little-endian words, 8 CSRs, machine and user privilege.
// Execution is straight-line: a program runs from slot 0, taken branches
// only skip forward, and the run ends at the last slot or on a double fault.
//
// Traps do not jump to a handler. The faulting instruction records epc,
// cause and status updates, control moves to machine mode, and execution
// resumes at the next slot. The status CSR keeps the previous privilege in
// bit 0 (1 = machine) and the trap nesting depth in bits 2:1; taking a trap
// at depth kMaxTrapDepth is a double fault and halts the run. mret pops one
// level and returns to the saved privilege.
#pragma once

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swarmfuzz/isa.hpp"

namespace swarmfuzz::dut {

inline constexpr std::uint32_t kMemBytes = 4096;
inline constexpr std::uint32_t kProtectedBytes = 256;  // machine-only region
inline constexpr unsigned kMaxTrapDepth = 2;
inline constexpr std::uint32_t kStatusReset = 0x1;
inline constexpr std::uint32_t kStatusMask = 0x7;

enum class Site : std::uint16_t {
#define SWARMFUZZ_SITE(name) name,
#include "swarmfuzz/dut_sites.def"
#undef SWARMFUZZ_SITE
  kCount
};

inline constexpr std::size_t kNumSites = static_cast<std::size_t>(Site::kCount);
inline constexpr std::size_t kNumCoveragePoints = 2 * kNumSites;

std::string_view site_name(Site site);

// Point id of one side of a decision site.
constexpr std::size_t point_id(Site site, bool taken) {
  return 2 * static_cast<std::size_t>(site) + (taken ? 1 : 0);
}

// Number of statically enumerated branch-coverage points.
std::size_t coverage_point_count();

class CoverageMap {
 public:
  using Bits = std::bitset<kNumCoveragePoints>;

  CoverageMap() = default;
  explicit CoverageMap(const Bits& bits) : bits_(bits) {}

  void mark(std::size_t point) { bits_.set(point); }
  bool test(std::size_t point) const { return bits_.test(point); }
  bool covers(Site site, bool taken) const { return test(point_id(site, taken)); }
  std::size_t count() const { return bits_.count(); }
  static constexpr std::size_t total_points() { return kNumCoveragePoints; }
  void clear() { bits_.reset(); }

  // Merges `other` and returns the points that were not covered before.
  CoverageMap merge(const CoverageMap& other) {
    CoverageMap fresh(other.bits_ & ~bits_);
    bits_ |= other.bits_;
    return fresh;
  }

  const Bits& bits() const { return bits_; }

  friend bool operator==(const CoverageMap&, const CoverageMap&) = default;

 private:
  Bits bits_;
};

enum class Privilege : std::uint8_t { User = 0, Machine = 1 };
std::string_view privilege_name(Privilege p);

enum class Cause : std::uint8_t {
  IllegalInstruction = 2,
  LoadMisaligned = 4,
  LoadAccessFault = 5,
  StoreMisaligned = 6,
  StoreAccessFault = 7,
  EcallUser = 8,
  EcallMachine = 11,
  DoubleFault = 15,
};
std::string_view cause_name(Cause c);

struct GprWrite {
  std::uint8_t index = 0;
  std::uint32_t value = 0;
  friend bool operator==(const GprWrite&, const GprWrite&) = default;
};

struct CsrWrite {
  std::uint16_t id = 0;
  std::uint32_t value = 0;
  friend bool operator==(const CsrWrite&, const CsrWrite&) = default;
};

struct MemAccess {
  std::uint32_t address = 0;
  std::uint32_t data = 0;
  std::uint8_t width = 4;
  bool is_store = false;
  friend bool operator==(const MemAccess&, const MemAccess&) = default;
};

// Architectural effects of one executed instruction.
struct TraceEntry {
  std::uint32_t pc = 0;  // program slot
  std::uint32_t encoding = 0;
  std::optional<Cause> exception;
  std::optional<GprWrite> gpr;  // x0 writes are recorded with value 0
  std::vector<CsrWrite> csrs;   // ascending id
  Privilege privilege = Privilege::Machine;  // after the instruction
  std::optional<MemAccess> memory;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct ArchTrace {
  std::uint64_t test_id = 0;
  std::vector<TraceEntry> entries;
  friend bool operator==(const ArchTrace&, const ArchTrace&) = default;
};

enum class BugId : std::uint8_t { B1 = 1, B2, B3, B4, B5, B6 };
inline constexpr std::size_t kNumBugs = 6;
inline constexpr BugId kAllBugIds[kNumBugs] = {BugId::B1, BugId::B2, BugId::B3,
                                               BugId::B4, BugId::B5, BugId::B6};

struct BugInfo {
  BugId id;
  std::string_view name;     // "B1"
  std::string_view summary;  // one line
  std::string_view trigger;
  std::string_view witness;  // program text
};

const BugInfo& bug_info(BugId id);
std::optional<BugId> parse_bug(std::string_view name);
std::size_t bug_index(BugId id);  // 0-based

// Witness program padded to `length` slots with nops.
isa::TestProgram witness_program(BugId id, std::size_t length = 20);

using BugMask = std::uint8_t;
inline constexpr BugMask kNoBugs = 0;
inline constexpr BugMask kAllBugs = 0x3f;
constexpr BugMask bug_bit(BugId id) {
  return static_cast<BugMask>(1u << (static_cast<unsigned>(id) - 1));
}

struct SimulationResult {
  CoverageMap coverage;
  ArchTrace trace;
};

// Runs the instrumented DUT from the reset state. `bugs` selects which
// injected bugs are active.
SimulationResult simulate(const isa::TestProgram& test, BugMask bugs = kAllBugs);

// Bug-free reference interpreter.
ArchTrace golden_execute(const isa::TestProgram& test);

}  // namespace swarmfuzz::dut
