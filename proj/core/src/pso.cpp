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

#include "swarmfuzz/pso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "swarmfuzz/error.hpp"

namespace swarmfuzz::pso {
namespace {

void check_finite(std::span<const double> raw) {
  for (double x : raw) {
    if (!std::isfinite(x)) throw ContractViolation("non-finite weight");
  }
}

std::vector<double> random_rows(std::size_t rows, std::size_t cols, Rng& rng) {
  std::vector<double> out;
  out.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    WeightVector w = random_simplex_point(cols, rng);
    out.insert(out.end(), w.values().begin(), w.values().end());
  }
  return out;
}

}  // namespace

WeightVector::WeightVector(std::vector<double> weights)
    : weights_(std::move(weights)) {
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ContractViolation("weight outside [0, inf)");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw ContractViolation("weights sum to " + std::to_string(sum));
  }
}

WeightVector WeightVector::uniform(std::size_t n) {
  if (n == 0) throw ContractViolation("empty choice set");
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

WeightVector normalize(std::span<const double> raw) {
  check_finite(raw);
  if (std::any_of(raw.begin(), raw.end(), [](double x) { return x < 0.0; })) {
    throw ContractViolation("normalize: negative weight");
  }
  const double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (sum <= 0.0) throw DegenerateInput("normalize: all-zero weights");
  std::vector<double> out(raw.begin(), raw.end());
  for (double& x : out) x /= sum;
  return WeightVector(std::move(out));
}

WeightVector project_to_simplex(std::span<const double> raw) {
  check_finite(raw);
  std::vector<double> clipped(raw.size());
  std::transform(raw.begin(), raw.end(), clipped.begin(),
                 [](double x) { return std::max(x, 0.0); });
  const double sum = std::accumulate(clipped.begin(), clipped.end(), 0.0);
  if (sum <= 0.0) return WeightVector::uniform(raw.size());
  for (double& x : clipped) x /= sum;
  return WeightVector(std::move(clipped));
}

WeightVector random_simplex_point(std::size_t n, Rng& rng) {
  std::vector<double> raw(n);
  for (double& x : raw) x = rng.uniform01();
  // Uniform(0,1) draws are almost never all zero; fall back like projection.
  return project_to_simplex(raw);
}

std::size_t sample_categorical(std::span<const double> weights, Rng& rng) {
  if (weights.empty()) throw ContractViolation("sample from empty weights");
  const double u = rng.uniform01();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] > 0.0) last_positive = j;
    acc += weights[j];
    if (u < acc) return j;
  }
  // Rounding left the cumulative sum a hair below u.
  return last_positive;
}

void PsoConfig::validate() const {
  if (!(k >= 0.0 && k <= 1.0)) {
    throw ConfigError("k must lie in [0, 1], got " + std::to_string(k));
  }
  if (beta < 1) throw ConfigError("beta must be >= 1");
}

double Particle::velocity_norm() const {
  double sq = 0.0;
  for (double v : velocity) sq += v * v;
  return std::sqrt(sq);
}

SwarmState make_swarm(std::size_t n_particles, std::size_t rows,
                      std::size_t cols, Rng& rng) {
  if (n_particles == 0 || rows == 0 || cols == 0) {
    throw ContractViolation("empty swarm shape");
  }
  SwarmState swarm;
  swarm.particles.reserve(n_particles);
  for (std::size_t i = 0; i < n_particles; ++i) {
    Particle p;
    p.rows = rows;
    p.position = random_rows(rows, cols, rng);
    p.velocity.assign(p.position.size(), 0.0);
    p.local_best_position = p.position;
    swarm.particles.push_back(std::move(p));
  }
  swarm.global_best_position = swarm.particles.front().position;
  return swarm;
}

RstMonResult rst_mon(SwarmState& swarm, std::uint32_t beta,
                     const FitnessMap& fitness) {
  RstMonResult result;
  for (const auto& [i, f] : fitness) {
    if (i >= swarm.particles.size()) {
      throw ContractViolation("fitness for unknown particle");
    }
    Particle& p = swarm.particles[i];
    if (f > p.local_best_fitness) {
      p.local_best_position = p.position;
      p.local_best_fitness = f;
      p.stagnation_count = 0;
    } else {
      ++p.stagnation_count;
    }
    if (p.stagnation_count > beta) result.reset_set.push_back(i);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < swarm.particles.size(); ++i) {
    if (swarm.particles[i].local_best_fitness >
        swarm.particles[best].local_best_fitness) {
      best = i;
    }
  }
  const Particle& leader = swarm.particles[best];
  if (leader.local_best_fitness >= swarm.global_best_fitness) {
    swarm.global_best_position = leader.local_best_position;
    swarm.global_best_fitness = leader.local_best_fitness;
  }

  result.counters.reserve(swarm.particles.size());
  for (const Particle& p : swarm.particles) {
    result.counters.push_back(p.stagnation_count);
  }
  return result;
}

std::vector<double> update_velocity(const Particle& particle,
                                    std::span<const double> global_best,
                                    const PsoConfig& cfg, double r1,
                                    double r2) {
  const std::size_t n = particle.position.size();
  if (particle.velocity.size() != n ||
      particle.local_best_position.size() != n || global_best.size() != n) {
    throw ContractViolation("update_velocity: shape mismatch");
  }
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double p = particle.position[j];
    v[j] = cfg.k * particle.velocity[j] +
           r1 * (particle.local_best_position[j] - p) +
           r2 * (global_best[j] - p);
  }
  return v;
}

const std::vector<double>& update_position(Particle& particle) {
  const std::size_t n = particle.position.size();
  if (particle.velocity.size() != n || particle.rows == 0 ||
      n % particle.rows != 0) {
    throw ContractViolation("update_position: shape mismatch");
  }
  const std::size_t cols = particle.cols();
  std::vector<double> raw(cols);
  for (std::size_t r = 0; r < particle.rows; ++r) {
    for (std::size_t j = 0; j < cols; ++j) {
      raw[j] = particle.position[r * cols + j] + particle.velocity[r * cols + j];
    }
    const WeightVector row = project_to_simplex(raw);
    std::copy(row.values().begin(), row.values().end(),
              particle.position.begin() + static_cast<std::ptrdiff_t>(r * cols));
  }
  return particle.position;
}

void reset_particle(Particle& particle, Rng& rng) {
  particle.position = random_rows(particle.rows, particle.cols(), rng);
  particle.velocity.assign(particle.position.size(), 0.0);
  particle.local_best_position = particle.position;
  particle.local_best_fitness = kUnevaluated;
  particle.stagnation_count = 0;
}

void update_pv(SwarmState& swarm, std::span<const std::size_t> reset_set,
               const PsoConfig& cfg, Rng& rng) {
  for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
    Particle& p = swarm.particles[i];
    if (std::find(reset_set.begin(), reset_set.end(), i) != reset_set.end()) {
      reset_particle(p, rng);
      continue;
    }
    const double r1 = rng.uniform01();
    const double r2 = rng.uniform01();
    p.velocity = update_velocity(p, swarm.global_best_position, cfg, r1, r2);
    update_position(p);
  }
}

}  // namespace swarmfuzz::pso
