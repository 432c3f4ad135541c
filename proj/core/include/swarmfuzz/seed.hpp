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

// Seed program generation from per-slot instruction-type distributions, and
// the survival-time fitness that drives the seed swarm.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "swarmfuzz/isa.hpp"
#include "swarmfuzz/pso.hpp"
#include "swarmfuzz/rng.hpp"

namespace swarmfuzz::seed {

inline constexpr std::size_t kDefaultSeedLength = 20;

// `rows` is an |O| x |T| row-major matrix, one type distribution per slot.
// Each slot draws a type, then an opcode and operands uniformly.
isa::TestProgram gen_seed(std::span<const double> rows, std::size_t length, Rng& rng);
inline isa::TestProgram gen_seed(const pso::Particle& p, Rng& rng) {
  return gen_seed(p.position, p.rows, rng);
}

// Uniform rows of the given length.
std::vector<double> uniform_rows(std::size_t length);

// Birth iteration of each mutation particle.
class SurvivalTracker {
 public:
  SurvivalTracker() = default;
  explicit SurvivalTracker(std::size_t n_particles) : birth_(n_particles, 0) {}

  // Iterations particle `i` survived up to its reset at `now`. Throws
  // ContractViolation unless `i` is in `reset_set`.
  std::uint64_t seed_fitness(std::size_t i, std::uint64_t now,
                             std::span<const std::size_t> reset_set) const;

  void reborn(std::size_t i, std::uint64_t now) { birth_.at(i) = now; }
  std::uint64_t birth(std::size_t i) const { return birth_.at(i); }
  std::size_t size() const { return birth_.size(); }

  // Survival so far of every particle, for reporting at campaign end.
  std::vector<std::uint64_t> censored(std::uint64_t now) const;

  const std::vector<std::uint64_t>& births() const { return birth_; }
  std::vector<std::uint64_t>& births() { return birth_; }

  friend bool operator==(const SurvivalTracker&, const SurvivalTracker&) = default;

 private:
  std::vector<std::uint64_t> birth_;
};

// RstMon with threshold beta_t over the evaluated seed particles, then
// UpdatePV over the whole seed swarm. Throws ContractViolation when
// `fitness` is empty.
pso::RstMonResult update_seed_swarm(pso::SwarmState& seed_swarm,
                                    const pso::FitnessMap& fitness,
                                    std::uint32_t beta_t, const pso::PsoConfig& cfg,
                                    Rng& rng);

}  // namespace swarmfuzz::seed
