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

#include "swarmfuzz/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "swarmfuzz/detector.hpp"
#include "swarmfuzz/error.hpp"
#include "swarmfuzz/mutation.hpp"

namespace swarmfuzz::campaign {
namespace {

std::atomic<bool> g_interrupt{false};

constexpr std::uint64_t kStreamMutationSwarm = 1;
constexpr std::uint64_t kStreamSeedSwarm = 2;
constexpr std::uint64_t kStreamThreadBase = 16;

struct Outcome {
  dut::SimulationResult sim;
  std::vector<detector::Mismatch> mismatches;
};

Outcome evaluate(const isa::TestProgram& test, dut::BugMask bugs) {
  Outcome out;
  out.sim = dut::simulate(test, bugs);
  out.mismatches = detector::compare_traces(out.sim.trace, dut::golden_execute(test));
  return out;
}

void write_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  os << text;
  if (!os) throw ConfigError("cannot write " + file.string());
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Baseline: return "baseline";
    case Variant::Pso: return "pso";
    case Variant::PsoReset: return "pso-reset";
    case Variant::PsoFuzz: return "psofuzz";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : kAllVariants) {
    if (variant_name(v) == name) return v;
  }
  throw ConfigError("unknown variant '" + std::string(name) +
                    "' (expected baseline, pso, pso-reset or psofuzz)");
}

VariantPolicy variant_behavior(Variant v) {
  switch (v) {
    case Variant::Baseline: return {false, false, false};
    case Variant::Pso: return {true, false, false};
    case Variant::PsoReset: return {true, true, false};
    case Variant::PsoFuzz: return {true, true, true};
  }
  return {};
}

std::size_t TargetCoverage::points(std::size_t total) const {
  if (!is_fraction) return static_cast<std::size_t>(value);
  return static_cast<std::size_t>(std::ceil(value * static_cast<double>(total) - 1e-9));
}

TargetCoverage TargetCoverage::parse(std::string_view text) {
  const std::string s(text);
  TargetCoverage t;
  t.is_fraction = s.find('.') != std::string::npos;
  std::size_t used = 0;
  try {
    t.value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw ConfigError("target coverage '" + s + "' is not a number");
  }
  if (t.is_fraction && (t.value < 0 || t.value > 1)) {
    throw ConfigError("target coverage fraction must be in [0, 1]");
  }
  if (!t.is_fraction && t.value < 0) {
    throw ConfigError("target coverage count must be nonnegative");
  }
  return t;
}

std::string TargetCoverage::to_string() const {
  if (!is_fraction) return std::to_string(static_cast<std::uint64_t>(value));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  std::string s = buf;
  if (s.find('.') == std::string::npos) s += ".0";
  return s;
}

void CampaignConfig::validate() const {
  if (n_particles == 0) throw ConfigError("particles must be at least 1");
  if (program_len == 0) throw ConfigError("seed length must be at least 1");
  if (!(k >= 0 && k <= 1)) throw ConfigError("k must be in [0, 1]");
  if (beta_m == 0 || beta_t == 0) throw ConfigError("beta must be at least 1");
  if (!(time_limit_secs >= 0)) throw ConfigError("time limit must be nonnegative");
  if (jobs == 0) throw ConfigError("jobs must be at least 1");
  if (target_coverage.is_fraction &&
      (target_coverage.value < 0 || target_coverage.value > 1)) {
    throw ConfigError("target coverage fraction must be in [0, 1]");
  }
  if (bugs & ~dut::kAllBugs) throw ConfigError("unknown bug in mask");
}

VariantPolicy CampaignConfig::policy() const {
  VariantPolicy p = variant_behavior(variant);
  if (disable_reset) p.reset = false;
  if (disable_seed_pso) p.seed_pso = false;
  return p;
}

void request_interrupt() { g_interrupt.store(true); }
void clear_interrupt() { g_interrupt.store(false); }
bool interrupt_requested() { return g_interrupt.load(); }

Campaign::Campaign(CampaignConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  target_points_ = cfg_.target_coverage.points(dut::coverage_point_count());
  const VariantPolicy policy = cfg_.policy();
  st_.rng_m = Rng(cfg_.rng_seed, kStreamMutationSwarm);
  st_.rng_t = Rng(cfg_.rng_seed, kStreamSeedSwarm);
  if (policy.swarm) {
    st_.swarm_m = pso::make_swarm(cfg_.n_particles, 1, mutation::kNumOperators, st_.rng_m);
  }
  if (policy.seed_pso) {
    st_.swarm_t = pso::make_swarm(cfg_.n_particles, cfg_.program_len,
                                  isa::kNumInstrTypes, st_.rng_t);
  }
  st_.survival = seed::SurvivalTracker(cfg_.n_particles);
  st_.threads.resize(cfg_.n_particles);
  for (std::size_t i = 0; i < cfg_.n_particles; ++i) {
    st_.threads[i].rng = Rng(cfg_.rng_seed, kStreamThreadBase + i);
    st_.threads[i].pending = st_.threads[i].base = new_seed(i);
  }
}

Campaign::Campaign(CampaignConfig cfg, CampaignState st)
    : cfg_(std::move(cfg)), st_(std::move(st)) {
  cfg_.validate();
  target_points_ = cfg_.target_coverage.points(dut::coverage_point_count());
}

Campaign Campaign::restore(const std::filesystem::path& file,
                           const CampaignConfig& overrides) {
  auto [cfg, st] = read_checkpoint(file);
  cfg.target_coverage = overrides.target_coverage;
  cfg.max_tests = overrides.max_tests;
  cfg.time_limit_secs = overrides.time_limit_secs;
  cfg.out_dir = overrides.out_dir;
  cfg.jobs = overrides.jobs;
  cfg.checkpoint_every = overrides.checkpoint_every;
  return Campaign(std::move(cfg), std::move(st));
}

isa::TestProgram Campaign::new_seed(std::size_t thread) {
  ThreadState& t = st_.threads[thread];
  isa::TestProgram seed =
      cfg_.policy().seed_pso
          ? seed::gen_seed(st_.swarm_t.particles[thread], t.rng)
          : seed::gen_seed(seed::uniform_rows(cfg_.program_len), cfg_.program_len, t.rng);
  seed.id = st_.next_test_id++;
  return seed;
}

bool Campaign::should_continue() const {
  return st_.coverage.count() < target_points_ && st_.tests_total < cfg_.max_tests;
}

void Campaign::step() {
  const std::size_t n = cfg_.n_particles;
  const VariantPolicy policy = cfg_.policy();

  // Fork: simulations are independent; results land in index order.
  std::vector<Outcome> outcomes(n);
  const unsigned workers = std::min<std::size_t>(cfg_.jobs, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) outcomes[i] = evaluate(st_.threads[i].pending, cfg_.bugs);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) {
          outcomes[i] = evaluate(st_.threads[i].pending, cfg_.bugs);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  // Join.
  IterationRecord rec;
  rec.iter = st_.iteration + 1;
  pso::FitnessMap fitness_m;
  for (std::size_t i = 0; i < n; ++i) {
    ThreadState& t = st_.threads[i];
    const Outcome& o = outcomes[i];
    const std::uint64_t test_number = st_.tests_total + i + 1;
    const std::size_t fresh = st_.coverage.merge(o.sim.coverage).count();
    if (fresh > 0) {
      rec.new_points += fresh;
      t.base = t.pending;
      st_.corpus.push_back(t.pending);
    }
    t.coverage_union.merge(o.sim.coverage);
    fitness_m[i] = static_cast<double>(t.coverage_union.count());
    for (dut::BugId bug : detector::detected_bugs(o.mismatches)) {
      auto& slot = st_.first_detection[dut::bug_index(bug)];
      if (!slot) slot = test_number;
    }
    for (const detector::Mismatch& m : o.mismatches) {
      if (!m.cascading) st_.mismatch_log.push_back(detector::to_json_line(m));
    }
  }
  st_.tests_total += n;

  std::vector<std::size_t> reset_m;
  if (policy.swarm) {
    const pso::PsoConfig cfg_m{cfg_.k, policy.reset ? cfg_.beta_m : pso::kNoReset,
                               cfg_.rng_seed};
    reset_m = pso::rst_mon(st_.swarm_m, cfg_m.beta, fitness_m).reset_set;
    if (!reset_m.empty() && policy.seed_pso) {
      pso::FitnessMap fitness_t;
      for (std::size_t i : reset_m) {
        fitness_t[i] = static_cast<double>(
            st_.survival.seed_fitness(i, st_.iteration + 1, reset_m));
      }
      const pso::PsoConfig cfg_t{cfg_.k, cfg_.beta_t, cfg_.rng_seed};
      rec.resets_t =
          seed::update_seed_swarm(st_.swarm_t, fitness_t, cfg_.beta_t, cfg_t, st_.rng_t)
              .reset_set.size();
    }
    pso::update_pv(st_.swarm_m, reset_m, cfg_m, st_.rng_m);
    rec.gbest_fitness = st_.swarm_m.global_best_fitness;
    for (const pso::Particle& p : st_.swarm_m.particles) {
      rec.velocity_norms.push_back(p.velocity_norm());
    }
  } else {
    double best = 0;
    for (const auto& [i, f] : fitness_m) best = std::max(best, f);
    rec.gbest_fitness = best;
  }
  rec.resets_m = reset_m.size();

  // Next tests: seeds for reset threads, mutants for the rest.
  const pso::WeightVector uniform = pso::WeightVector::uniform(mutation::kNumOperators);
  for (std::size_t i = 0; i < n; ++i) {
    ThreadState& t = st_.threads[i];
    if (std::binary_search(reset_m.begin(), reset_m.end(), i)) {
      st_.survival.reborn(i, st_.iteration + 1);
      t.coverage_union.clear();
      t.pending = t.base = new_seed(i);
      continue;
    }
    const pso::WeightVector w =
        policy.swarm ? pso::WeightVector(st_.swarm_m.particles[i].position) : uniform;
    t.pending = mutation::mutate(t.base, w, t.rng).program;
    t.pending.id = st_.next_test_id++;
  }

  st_.iteration += 1;
  rec.tests_total = st_.tests_total;
  rec.coverage = st_.coverage.count();
  st_.records.push_back(std::move(rec));
}

CampaignResult Campaign::run() {
  const auto start = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    if (cfg_.time_limit_secs <= 0) return false;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return elapsed.count() >= cfg_.time_limit_secs;
  };
  if (!cfg_.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg_.out_dir, ec);
    if (ec) throw ConfigError("cannot create " + cfg_.out_dir.string() + ": " + ec.message());
  }
  while (should_continue() && !out_of_time()) {
    if (interrupt_requested()) {
      interrupted_ = true;
      break;
    }
    step();
    if (cfg_.checkpoint_every > 0 && !cfg_.out_dir.empty() &&
        st_.iteration % cfg_.checkpoint_every == 0) {
      save_checkpoint(cfg_.out_dir / "checkpoint.bin");
    }
  }
  if (!cfg_.out_dir.empty()) {
    write_artifacts();
    save_checkpoint(cfg_.out_dir / "checkpoint.bin");
  }
  return result();
}

void Campaign::save_checkpoint(const std::filesystem::path& file) const {
  write_checkpoint(file, cfg_, st_);
}

void Campaign::write_artifacts() const {
  write_file(cfg_.out_dir / "campaign.csv", campaign_csv(st_.records));
  write_file(cfg_.out_dir / "bugs.csv", bugs_csv(st_.first_detection));
  if (cfg_.policy().swarm) {
    write_file(cfg_.out_dir / "velocity.csv", velocity_csv(st_.records));
  }
  std::string jsonl;
  for (const std::string& line : st_.mismatch_log) jsonl += line + '\n';
  write_file(cfg_.out_dir / "mismatches.jsonl", jsonl);
}

CampaignResult Campaign::result() const {
  CampaignResult r;
  r.coverage = st_.coverage;
  r.records = st_.records;
  r.mismatch_log = st_.mismatch_log;
  r.first_detection = st_.first_detection;
  r.censored_survival = st_.survival.censored(st_.iteration);
  r.interrupted = interrupted_;
  return r;
}

std::string campaign_csv(const std::vector<IterationRecord>& records) {
  std::string out = "iter,tests_total,coverage,new_points,resets_m,resets_t,gbest_fitness\n";
  for (const IterationRecord& r : records) {
    out += std::to_string(r.iter) + ',' + std::to_string(r.tests_total) + ',' +
           std::to_string(r.coverage) + ',' + std::to_string(r.new_points) + ',' +
           std::to_string(r.resets_m) + ',' + std::to_string(r.resets_t) + ',' +
           format_double(r.gbest_fitness) + '\n';
  }
  return out;
}

std::string bugs_csv(const DetectionTable& detection) {
  std::string out = "bug,tests_to_detection\n";
  for (dut::BugId id : dut::kAllBugIds) {
    const auto& d = detection[dut::bug_index(id)];
    out += std::string(dut::bug_info(id).name) + ',' + (d ? std::to_string(*d) : "N.D.") + '\n';
  }
  return out;
}

std::string velocity_csv(const std::vector<IterationRecord>& records) {
  std::string out = "iter";
  const std::size_t n = records.empty() ? 0 : records.front().velocity_norms.size();
  for (std::size_t i = 0; i < n; ++i) out += ",v" + std::to_string(i);
  out += '\n';
  for (const IterationRecord& r : records) {
    out += std::to_string(r.iter);
    for (double v : r.velocity_norms) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

}  // namespace swarmfuzz::campaign
