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

#include "swarmfuzz/detector.hpp"
#include "swarmfuzz/dut.hpp"
#include "swarmfuzz/error.hpp"
#include "test_support.hpp"

namespace swarmfuzz::detector {
namespace {

using dut::BugId;

std::vector<Mismatch> run(const isa::TestProgram& p) {
  return compare_traces(dut::simulate(p).trace, dut::golden_execute(p));
}

TEST(Detector, IdenticalTracesGiveNothing) {
  Rng rng(1);
  const isa::TestProgram p = testing::trigger_free_program(20, rng);
  const dut::ArchTrace t = dut::golden_execute(p);
  EXPECT_TRUE(compare_traces(t, t).empty());
}

TEST(Detector, B6WitnessHasOneCsrMismatch) {
  const std::vector<Mismatch> ms = run(dut::witness_program(BugId::B6));
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].field, Field::Csr);
  EXPECT_EQ(ms[0].instruction_index, 0u);
  EXPECT_NE(ms[0].dut_value.find("instret"), std::string::npos);
  EXPECT_EQ(ms[0].matched_bug, BugId::B6);
  EXPECT_FALSE(ms[0].cascading);
}

TEST(Detector, B2WitnessHasGprMismatchAtMul) {
  const std::vector<Mismatch> ms = run(dut::witness_program(BugId::B2));
  ASSERT_FALSE(ms.empty());
  EXPECT_EQ(ms[0].field, Field::Gpr);
  EXPECT_EQ(ms[0].instruction_index, 1u);
  EXPECT_EQ(ms[0].matched_bug, BugId::B2);
}

TEST(Detector, EachWitnessClassifiesToItsBug) {
  for (BugId id : dut::kAllBugIds) {
    const std::vector<Mismatch> ms = run(dut::witness_program(id));
    ASSERT_FALSE(ms.empty()) << dut::bug_info(id).name;
    // Several fields can diverge at the first index; one of them carries the signature.
    bool classified = false;
    for (const Mismatch& m : ms) {
      if (!m.cascading && classify(m) == id) classified = true;
    }
    EXPECT_TRUE(classified) << dut::bug_info(id).name;
    EXPECT_EQ(detected_bugs(ms), std::vector<BugId>{id}) << dut::bug_info(id).name;
    for (const Mismatch& m : ms) EXPECT_NE(m.dut_value, m.golden_value);
  }
}

TEST(Detector, ForgedMismatchIsUnclassified) {
  Mismatch m;
  m.field = Field::Privilege;
  m.dut_value = "user";
  m.golden_value = "machine";
  EXPECT_FALSE(classify(m));
  m.field = Field::Gpr;
  EXPECT_FALSE(classify(m));
  EXPECT_TRUE(detected_bugs({m}).empty());
}

TEST(Detector, DifferentTestIdsThrow) {
  dut::ArchTrace a, b;
  a.test_id = 1;
  b.test_id = 2;
  EXPECT_THROW(compare_traces(a, b), ContractViolation);
}

TEST(Detector, LengthMismatchIsACommitMismatch) {
  const dut::ArchTrace golden = dut::golden_execute(isa::parse_program("addi x1,x0,1\naddi x2,x0,2"));
  dut::ArchTrace short_trace = golden;
  short_trace.entries.pop_back();
  const std::vector<Mismatch> ms = compare_traces(short_trace, golden);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].field, Field::Commit);
  EXPECT_EQ(ms[0].instruction_index, 1u);
  EXPECT_FALSE(ms[0].dut_entry);
  EXPECT_TRUE(ms[0].golden_entry);
}

TEST(Detector, LaterMismatchesCascade) {
  // B2 leaves a wrong value in x2, which the following add propagates.
  const isa::TestProgram p =
      isa::parse_program("addi x1,x0,3\nmul x2,x1,x1\nadd x3,x2,x0\nsw x3,x0,8");
  const std::vector<Mismatch> ms = run(p);
  ASSERT_GE(ms.size(), 3u);
  EXPECT_FALSE(ms[0].cascading);
  for (std::size_t i = 1; i < ms.size(); ++i) {
    EXPECT_TRUE(ms[i].cascading) << i;
    EXPECT_GT(ms[i].instruction_index, ms[0].instruction_index);
  }
  EXPECT_EQ(detected_bugs(ms), std::vector<BugId>{BugId::B2});
}

TEST(Detector, NoFalsePositivesOnTriggerFreePrograms) {
  Rng rng(2);
  for (int t = 0; t < 10000; ++t) {
    isa::TestProgram p = testing::trigger_free_program(20, rng);
    p.id = static_cast<std::uint64_t>(t);
    ASSERT_TRUE(run(p).empty()) << isa::to_text(p);
  }
}

TEST(Detector, JsonLine) {
  isa::TestProgram p = dut::witness_program(BugId::B6);
  p.id = 7;
  const std::vector<Mismatch> ms = run(p);
  ASSERT_EQ(ms.size(), 1u);
  const std::string line = to_json_line(ms[0]);
  EXPECT_EQ(line.rfind("{\"test_id\":7,\"instruction_index\":0,\"field\":\"csr\",", 0), 0u) << line;
  EXPECT_NE(line.find("\"matched_bug\":\"B6\",\"cascading\":false}"), std::string::npos) << line;
  EXPECT_EQ(line.find('\n'), std::string::npos);
  Mismatch bare;
  bare.dut_value = "a";
  bare.golden_value = "b";
  EXPECT_NE(to_json_line(bare).find("\"matched_bug\":null"), std::string::npos);
}

TEST(Detector, FieldNames) {
  EXPECT_EQ(field_name(Field::Commit), "commit");
  EXPECT_EQ(field_name(Field::Exception), "exception");
  EXPECT_EQ(field_name(Field::Gpr), "gpr");
  EXPECT_EQ(field_name(Field::Csr), "csr");
  EXPECT_EQ(field_name(Field::Privilege), "privilege");
  EXPECT_EQ(field_name(Field::Memory), "memory");
}

}  // namespace
}  // namespace swarmfuzz::detector
