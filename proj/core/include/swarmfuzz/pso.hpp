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

// Particle-swarm machinery over simplex-constrained positions.
//
// A position is one or more rows, each a probability distribution over a
// fixed choice set. Mutation particles have a single row (one weight per
// mutation operator); seed particles have one row per instruction slot
// (one weight per instruction type). Velocities are unconstrained and share
// the position's shape.
#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "swarmfuzz/rng.hpp"

namespace swarmfuzz::pso {

inline constexpr double kSimplexTolerance = 1e-9;

// Local-best fitness of a particle that has not been evaluated since it was
// created or reset. Any real fitness is an improvement over it.
inline constexpr double kUnevaluated = -std::numeric_limits<double>::infinity();

// Threshold that disables resets in rst_mon.
inline constexpr std::uint32_t kNoReset = std::numeric_limits<std::uint32_t>::max();

// Probability distribution over a discrete choice set: every weight >= 0,
// weights sum to 1 within kSimplexTolerance.
class WeightVector {
 public:
  WeightVector() = default;
  // Throws ContractViolation if the invariants do not hold.
  explicit WeightVector(std::vector<double> weights);

  static WeightVector uniform(std::size_t n);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  const std::vector<double>& values() const { return weights_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> weights_;
};

// Scales a nonnegative vector onto the simplex. Throws DegenerateInput when
// every entry is zero and ContractViolation on negative or non-finite input.
WeightVector normalize(std::span<const double> raw);

// Clips negatives to zero, then normalizes. All-nonpositive input maps to the
// uniform distribution. Throws ContractViolation on non-finite entries.
WeightVector project_to_simplex(std::span<const double> raw);

// Uniform point on the simplex: independent Uniform(0,1) draws, normalized.
WeightVector random_simplex_point(std::size_t n, Rng& rng);

// Inverse-CDF draw over the stored order; returns j with probability w[j].
std::size_t sample_categorical(std::span<const double> weights, Rng& rng);
inline std::size_t sample_categorical(const WeightVector& w, Rng& rng) {
  return sample_categorical(w.weights(), rng);
}

struct PsoConfig {
  double k = 0.5;          // velocity inertia
  std::uint32_t beta = 3;  // reset threshold
  std::uint64_t rng_seed = 0;

  // Throws ConfigError unless k is in [0, 1] and beta >= 1.
  void validate() const;
};

struct Particle {
  std::size_t rows = 1;
  std::vector<double> position;  // row-major, each row on the simplex
  std::vector<double> velocity;
  std::vector<double> local_best_position;
  double local_best_fitness = kUnevaluated;
  std::uint32_t stagnation_count = 0;

  std::size_t cols() const { return rows == 0 ? 0 : position.size() / rows; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(position).subspan(r * cols(), cols());
  }
  double velocity_norm() const;

  friend bool operator==(const Particle&, const Particle&) = default;
};

struct SwarmState {
  std::vector<Particle> particles;
  std::vector<double> global_best_position;
  double global_best_fitness = kUnevaluated;

  friend bool operator==(const SwarmState&, const SwarmState&) = default;
};

// Random positions, zero velocities, local bests equal to the initial
// positions (unevaluated), global best equal to particle 0's position.
SwarmState make_swarm(std::size_t n_particles, std::size_t rows,
                      std::size_t cols, Rng& rng);

// Fitness for the particles evaluated this iteration, keyed by index.
using FitnessMap = std::map<std::size_t, double>;

struct RstMonResult {
  std::vector<std::size_t> reset_set;  // ascending particle indices
  std::vector<std::uint32_t> counters;
};

// Reset monitor. For each particle in `fitness`: a strictly better fitness
// replaces the local best and zeroes the stagnation counter, anything else
// increments it; a counter above `beta` schedules the particle for reset.
// The global best then moves to the highest local best. It never moves to a
// worse fitness, so local bests discarded by resets cannot lower it.
RstMonResult rst_mon(SwarmState& swarm, std::uint32_t beta,
                     const FitnessMap& fitness);

// k*v + r1*(l_best - p) + r2*(g_best - p), elementwise.
std::vector<double> update_velocity(const Particle& particle,
                                    std::span<const double> global_best,
                                    const PsoConfig& cfg, double r1, double r2);

// Replaces the position with the row-wise simplex projection of p + v.
const std::vector<double>& update_position(Particle& particle);

// Fresh uniform position, zero velocity and counter, local best discarded.
void reset_particle(Particle& particle, Rng& rng);

// UpdatePV over a whole swarm: particles in `reset_set` are reset, all others
// take one velocity/position step with scalar r1, r2 drawn per particle.
void update_pv(SwarmState& swarm, std::span<const std::size_t> reset_set,
               const PsoConfig& cfg, Rng& rng);

}  // namespace swarmfuzz::pso
