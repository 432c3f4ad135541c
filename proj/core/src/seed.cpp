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

#include "swarmfuzz/seed.hpp"

#include <algorithm>

#include "swarmfuzz/error.hpp"

namespace swarmfuzz::seed {

isa::TestProgram gen_seed(std::span<const double> rows, std::size_t length, Rng& rng) {
  if (rows.size() != length * isa::kNumInstrTypes) {
    throw ContractViolation("gen_seed: position must be |O| x |T|");
  }
  isa::TestProgram out;
  out.instructions.reserve(length);
  for (std::size_t o = 0; o < length; ++o) {
    const auto row = rows.subspan(o * isa::kNumInstrTypes, isa::kNumInstrTypes);
    const isa::InstrType type = isa::kAllInstrTypes[pso::sample_categorical(row, rng)];
    out.instructions.push_back(isa::random_instruction(type, rng));
  }
  return out;
}

std::vector<double> uniform_rows(std::size_t length) {
  return std::vector<double>(length * isa::kNumInstrTypes,
                             1.0 / static_cast<double>(isa::kNumInstrTypes));
}

std::uint64_t SurvivalTracker::seed_fitness(std::size_t i, std::uint64_t now,
                                            std::span<const std::size_t> reset_set) const {
  if (std::find(reset_set.begin(), reset_set.end(), i) == reset_set.end()) {
    throw ContractViolation("seed_fitness: particle " + std::to_string(i) +
                            " was not reset");
  }
  if (now < birth_.at(i)) throw ContractViolation("seed_fitness: reset before birth");
  return now - birth_[i];
}

std::vector<std::uint64_t> SurvivalTracker::censored(std::uint64_t now) const {
  std::vector<std::uint64_t> out;
  out.reserve(birth_.size());
  for (std::uint64_t b : birth_) out.push_back(now >= b ? now - b : 0);
  return out;
}

pso::RstMonResult update_seed_swarm(pso::SwarmState& seed_swarm,
                                    const pso::FitnessMap& fitness,
                                    std::uint32_t beta_t, const pso::PsoConfig& cfg,
                                    Rng& rng) {
  if (fitness.empty()) {
    throw ContractViolation("update_seed_swarm: no mutation particle was reset");
  }
  pso::RstMonResult result = pso::rst_mon(seed_swarm, beta_t, fitness);
  pso::update_pv(seed_swarm, result.reset_set, cfg, rng);
  return result;
}

}  // namespace swarmfuzz::seed
