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

#include <stdexcept>

#include "swarmfuzz/dut.hpp"
#include "swarmfuzz/error.hpp"

namespace swarmfuzz::dut {
namespace {

constexpr BugInfo kBugs[kNumBugs] = {
    {BugId::B1, "B1",
     "loads from out-of-range addresses return 0 instead of raising an access fault",
     "aligned load whose address lies outside data memory",
     "lui x1,x0,1\n"
     "lw x2,x1,0\n"},
    {BugId::B2, "B2", "mul with rs1 == rs2 is decoded as add",
     "mul whose two source registers are the same register holding a value other than 0 or 2",
     "addi x1,x0,3\n"
     "mul x2,x1,x1\n"},
    {BugId::B3, "B3",
     "read-only access to an unimplemented CSR returns the scratch CSR instead of raising an illegal-instruction trap",
     "csrrs/csrrc with rs1 == x0 and a CSR id >= 8, in machine mode",
     "csrrs x1,x0,100\n"},
    {BugId::B4, "B4",
     "a load retiring right after a store to the same address returns the pre-store value",
     "store immediately followed by a load of the same byte address",
     "addi x1,x0,5\n"
     "sw x1,x0,8\n"
     "lw x2,x0,8\n"},
    {BugId::B5, "B5",
     "fence with a nonzero immediate is dropped without retiring",
     "fence whose immediate is not zero",
     "fence x0,x0,1\n"},
    {BugId::B6, "B6", "ebreak does not increment instret",
     "any retired ebreak",
     "ebreak x0,x0,0\n"},
};

}  // namespace

const BugInfo& bug_info(BugId id) { return kBugs[bug_index(id)]; }

std::size_t bug_index(BugId id) { return static_cast<std::size_t>(id) - 1; }

std::optional<BugId> parse_bug(std::string_view name) {
  for (const BugInfo& b : kBugs) {
    if (b.name == name) return b.id;
  }
  return std::nullopt;
}

isa::TestProgram witness_program(BugId id, std::size_t length) {
  isa::TestProgram program = isa::parse_program(bug_info(id).witness);
  if (program.instructions.size() > length) {
    throw ContractViolation("witness longer than requested length");
  }
  program.instructions.resize(length, isa::nop());
  return program;
}

}  // namespace swarmfuzz::dut
