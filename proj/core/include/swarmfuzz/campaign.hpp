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

// Fuzzing campaign: paired mutation and seed swarms, one fuzzer thread per
// particle, fork-join simulation and single-threaded swarm updates.
#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swarmfuzz/dut.hpp"
#include "swarmfuzz/isa.hpp"
#include "swarmfuzz/pso.hpp"
#include "swarmfuzz/rng.hpp"
#include "swarmfuzz/seed.hpp"

namespace swarmfuzz::campaign {

enum class Variant : std::uint8_t { Baseline, Pso, PsoReset, PsoFuzz };
inline constexpr std::array<Variant, 4> kAllVariants = {
    Variant::Baseline, Variant::Pso, Variant::PsoReset, Variant::PsoFuzz};

std::string_view variant_name(Variant v);
// Throws ConfigError for unknown names.
Variant parse_variant(std::string_view name);

struct VariantPolicy {
  bool swarm = false;     // mutation weights come from P^M
  bool reset = false;     // RstMon can reset mutation particles
  bool seed_pso = false;  // seeds come from P^T
};
VariantPolicy variant_behavior(Variant v);

// Coverage goal, either an absolute point count or a fraction of all points.
struct TargetCoverage {
  bool is_fraction = true;
  double value = 1.0;

  std::size_t points(std::size_t total) const;
  // "150" is a count, "0.75" a fraction. Throws ConfigError.
  static TargetCoverage parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const TargetCoverage&, const TargetCoverage&) = default;
};

struct CampaignConfig {
  Variant variant = Variant::PsoFuzz;
  std::size_t n_particles = 10;
  std::size_t program_len = seed::kDefaultSeedLength;
  double k = 0.5;
  std::uint32_t beta_m = 3;
  std::uint32_t beta_t = 3;
  TargetCoverage target_coverage;
  std::uint64_t max_tests = 5000;
  double time_limit_secs = 0;  // 0 disables the wall-clock budget
  std::uint64_t rng_seed = 0;
  std::filesystem::path out_dir;
  unsigned jobs = 1;                      // simulation workers
  std::uint64_t checkpoint_every = 0;     // iterations, 0 = only at the end
  dut::BugMask bugs = dut::kAllBugs;
  // Policy overrides applied on top of the variant.
  bool disable_reset = false;
  bool disable_seed_pso = false;

  // Throws ConfigError.
  void validate() const;
  VariantPolicy policy() const;

  friend bool operator==(const CampaignConfig&, const CampaignConfig&) = default;
};

struct IterationRecord {
  std::uint64_t iter = 0;  // 1-based
  std::uint64_t tests_total = 0;
  std::size_t coverage = 0;
  std::size_t new_points = 0;
  std::size_t resets_m = 0;
  std::size_t resets_t = 0;
  double gbest_fitness = 0;
  std::vector<double> velocity_norms;  // P^M, empty without a swarm

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

using DetectionTable = std::array<std::optional<std::uint64_t>, dut::kNumBugs>;

struct CampaignResult {
  dut::CoverageMap coverage;
  std::vector<IterationRecord> records;
  std::vector<std::string> mismatch_log;  // JSON lines
  DetectionTable first_detection;         // 1-based test number
  std::vector<std::uint64_t> censored_survival;
  bool interrupted = false;
};

// Per-thread fuzzer state.
struct ThreadState {
  Rng rng;
  isa::TestProgram base;     // latest interesting test, else the seed
  isa::TestProgram pending;  // simulated next iteration
  dut::CoverageMap coverage_union;

  friend bool operator==(const ThreadState&, const ThreadState&) = default;
};

// Everything a checkpoint must restore.
struct CampaignState {
  std::uint64_t iteration = 0;
  std::uint64_t tests_total = 0;
  std::uint64_t next_test_id = 1;
  pso::SwarmState swarm_m;
  pso::SwarmState swarm_t;
  Rng rng_m;
  Rng rng_t;
  std::vector<ThreadState> threads;
  seed::SurvivalTracker survival;
  dut::CoverageMap coverage;
  std::vector<isa::TestProgram> corpus;  // interesting tests, in discovery order
  DetectionTable first_detection;
  std::vector<IterationRecord> records;
  std::vector<std::string> mismatch_log;

  friend bool operator==(const CampaignState&, const CampaignState&) = default;
};

class Campaign {
 public:
  // Initialization: random swarms, zero velocities, initial seeds.
  explicit Campaign(CampaignConfig cfg);

  // Restores a checkpoint. Budget fields (target coverage, max tests, time
  // limit), out_dir, jobs and checkpoint_every are taken from `overrides`;
  // everything else comes from the file. Throws IntegrityError.
  static Campaign restore(const std::filesystem::path& file,
                          const CampaignConfig& overrides);

  // Loop guard: coverage below target and test budget left.
  bool should_continue() const;
  // One iteration: simulate, fitness, RstMon, swarm updates, next tests.
  void step();
  // Steps until the guard, wall-clock limit or an interrupt stops it, then
  // writes artifacts when out_dir is set.
  CampaignResult run();

  void save_checkpoint(const std::filesystem::path& file) const;
  void write_artifacts() const;
  CampaignResult result() const;

  const CampaignConfig& config() const { return cfg_; }
  const CampaignState& state() const { return st_; }

 private:
  Campaign(CampaignConfig cfg, CampaignState st);
  isa::TestProgram new_seed(std::size_t thread);

  CampaignConfig cfg_;
  CampaignState st_;
  std::size_t target_points_ = 0;
  bool interrupted_ = false;
};

inline CampaignResult run_campaign(const CampaignConfig& cfg) {
  return Campaign(cfg).run();
}

// Asks every running campaign to stop after its current iteration and write
// a checkpoint. Async-signal-safe.
void request_interrupt();
void clear_interrupt();
bool interrupt_requested();

// Artifact formats.
std::string campaign_csv(const std::vector<IterationRecord>& records);
std::string bugs_csv(const DetectionTable& detection);
std::string velocity_csv(const std::vector<IterationRecord>& records);

// Checkpoint file I/O. The header carries a magic, a format version, a
// description, and the payload size and CRC-32.
inline constexpr std::uint32_t kCheckpointVersion = 1;
void write_checkpoint(const std::filesystem::path& file, const CampaignConfig& cfg,
                      const CampaignState& st);
std::pair<CampaignConfig, CampaignState> read_checkpoint(const std::filesystem::path& file);

}  // namespace swarmfuzz::campaign
