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

// Differential vulnerability detection: per-instruction comparison of the
// DUT's architectural trace against the golden model's.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swarmfuzz/dut.hpp"

namespace swarmfuzz::detector {

enum class Field : std::uint8_t { Commit, Exception, Gpr, Csr, Privilege, Memory };
std::string_view field_name(Field f);

struct Mismatch {
  std::uint64_t test_id = 0;
  std::size_t instruction_index = 0;
  Field field = Field::Commit;
  std::string dut_value;
  std::string golden_value;
  std::optional<dut::BugId> matched_bug;
  // Set on every mismatch after the first divergent instruction.
  bool cascading = false;

  // Trace context used for classification. Absent entries mean the trace
  // ended before this index.
  std::optional<dut::TraceEntry> dut_entry;
  std::optional<dut::TraceEntry> golden_entry;
  std::optional<dut::TraceEntry> golden_previous;
};

// Compares both traces entry by entry across all six state categories and
// classifies each mismatch. The result is empty iff the traces are equal.
// A length difference is reported once, as a commit mismatch at the first
// index one trace lacks. Throws ContractViolation if the test ids differ.
std::vector<Mismatch> compare_traces(const dut::ArchTrace& dut,
                                     const dut::ArchTrace& golden);

// Matches a mismatch against the injected-bug signatures.
std::optional<dut::BugId> classify(const Mismatch& m);

// Bugs detected by the non-cascading mismatches of one comparison.
std::vector<dut::BugId> detected_bugs(const std::vector<Mismatch>& mismatches);

// One JSON object, no trailing newline.
std::string to_json_line(const Mismatch& m);

}  // namespace swarmfuzz::detector
