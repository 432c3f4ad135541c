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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "swarmfuzz/campaign.hpp"
#include "swarmfuzz/detector.hpp"
#include "swarmfuzz/dut.hpp"
#include "swarmfuzz/pso.hpp"
#include "swarmfuzz/report.hpp"
#include "test_support.hpp"

namespace sf = swarmfuzz;
namespace fs = std::filesystem;
using sf::Rng;

namespace {

// Tolerances and budgets.
constexpr double kOracleTolerance = 1e-12;
constexpr int kOracleCases = 100;
constexpr int kRstMonTraces = 1000;
constexpr int kSimplexCycles = 100000;
constexpr double kSimplexTolerance = 1e-9;
constexpr double kSaturationNorm = 1e-3;
constexpr int kSaturationIterations = 200;
constexpr double kSaturatedShare = 0.8;
constexpr int kResetHorizon = 400;
constexpr int kResetWindow = 50;
constexpr std::uint64_t kSaturationSeeds[] = {1, 2, 3};
constexpr int kTwoOperatorTrials = 10000;
constexpr double kTwoOperatorTolerance = 0.02;
constexpr int kTriggerFreePrograms = 10000;
constexpr std::size_t kSpeedupTrials = 10;
constexpr std::uint64_t kSpeedupTests = 5000;
constexpr int kSpeedupMinBugs = 4;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* name;
  double limit_secs;
  std::function<Verdict()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int shell(const std::string& cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("swarmfuzz_acceptance_" + name);
  fs::remove_all(dir);
  return dir;
}

// --- velocity and position oracle ---------------------------------------

std::vector<double> random_simplex(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  double s = 0;
  for (double& x : w) s += (x = rng.uniform01() + 1e-3);
  for (double& x : w) x /= s;
  return w;
}

Verdict velocity_oracle() {
  double worst = 0;
  auto check = [&](const sf::pso::Particle& p, const std::vector<double>& g, double k, double r1,
                   double r2) {
    const sf::pso::PsoConfig cfg{k, 3, 0};
    const std::vector<double> v = sf::pso::update_velocity(p, g, cfg, r1, r2);
    sf::pso::Particle moved = p;
    moved.velocity = v;
    sf::pso::update_position(moved);
    std::vector<double> raw(p.position.size());
    for (std::size_t j = 0; j < raw.size(); ++j) {
      const double expect_v = k * p.velocity[j] + r1 * (p.local_best_position[j] - p.position[j]) +
                              r2 * (g[j] - p.position[j]);
      worst = std::max(worst, std::abs(v[j] - expect_v));
      raw[j] = std::max(0.0, p.position[j] + expect_v);
    }
    double sum = 0;
    for (double x : raw) sum += x;
    for (std::size_t j = 0; j < raw.size(); ++j) {
      const double expect_p = sum > 0 ? raw[j] / sum : 1.0 / static_cast<double>(raw.size());
      worst = std::max(worst, std::abs(moved.position[j] - expect_p));
    }
    return v;
  };

  sf::pso::Particle worked;
  worked.position = {0.5, 0.5};
  worked.velocity = {0.1, -0.1};
  worked.local_best_position = {0.6, 0.4};
  const std::vector<double> v = check(worked, {0.8, 0.2}, 0.5, 0.5, 0.25);
  const bool worked_ok =
      std::abs(v[0] - 0.175) <= kOracleTolerance && std::abs(v[1] + 0.175) <= kOracleTolerance;

  Rng rng(2026);
  for (int c = 0; c < kOracleCases; ++c) {
    const std::size_t n = 2 + rng.below(11);
    sf::pso::Particle p;
    p.position = random_simplex(n, rng);
    p.local_best_position = random_simplex(n, rng);
    p.velocity.resize(n);
    for (double& x : p.velocity) x = rng.uniform01() - 0.5;
    check(p, random_simplex(n, rng), rng.uniform01(), rng.uniform01(), rng.uniform01());
  }
  return {worked_ok && worst <= kOracleTolerance,
          "worked example " + std::string(worked_ok ? "ok" : "wrong") + ", " +
              std::to_string(kOracleCases) + " random cases, max abs error " + fmt("%.2e", worst)};
}

// --- reset monitor oracle -------------------------------------------------

// Direct transcription of the reset monitor over plain arrays.
struct LiteralMonitor {
  std::vector<std::vector<double>> lbest;
  std::vector<double> lbest_f;
  std::vector<std::uint32_t> ct;
  std::vector<double> gbest;
  double gbest_f;

  std::vector<std::size_t> step(const std::vector<std::vector<double>>& p,
                                const std::vector<double>& f, std::uint32_t beta) {
    std::vector<std::size_t> rst;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (f[i] > lbest_f[i]) {
        lbest[i] = p[i];
        lbest_f[i] = f[i];
        ct[i] = 0;
      } else {
        ct[i] = ct[i] + 1;
      }
      if (ct[i] > beta) rst.push_back(i);
    }
    std::size_t top = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (lbest_f[i] > lbest_f[top]) top = i;
    }
    gbest = lbest[top];
    gbest_f = lbest_f[top];
    return rst;
  }
};

Verdict rstmon_oracle() {
  Rng rng(77);
  int mismatches = 0;
  std::size_t resets = 0;
  for (int t = 0; t < kRstMonTraces; ++t) {
    const std::size_t n = 1 + rng.below(10);
    const std::size_t len = 1 + rng.below(50);
    const auto beta = static_cast<std::uint32_t>(1 + rng.below(3));
    sf::pso::SwarmState swarm = sf::pso::make_swarm(n, 1, 12, rng);
    LiteralMonitor lit;
    for (const auto& part : swarm.particles) {
      lit.lbest.push_back(part.position);
      lit.lbest_f.push_back(-INFINITY);
      lit.ct.push_back(0);
    }
    lit.gbest = swarm.particles[0].position;
    lit.gbest_f = -INFINITY;
    bool ok = true;
    for (std::size_t s = 0; s < len && ok; ++s) {
      std::vector<std::vector<double>> pos;
      std::vector<double> f;
      sf::pso::FitnessMap fm;
      for (std::size_t i = 0; i < n; ++i) {
        swarm.particles[i].position = random_simplex(12, rng);
        pos.push_back(swarm.particles[i].position);
        // Small integer range so ties and stagnation are common.
        f.push_back(static_cast<double>(rng.below(6)));
        fm[i] = f.back();
      }
      const sf::pso::RstMonResult r = sf::pso::rst_mon(swarm, beta, fm);
      const std::vector<std::size_t> expect = lit.step(pos, f, beta);
      resets += expect.size();
      ok = r.reset_set == expect && r.counters == lit.ct && swarm.global_best_position == lit.gbest &&
           swarm.global_best_fitness == lit.gbest_f;
      for (std::size_t i = 0; i < n && ok; ++i) {
        ok = swarm.particles[i].local_best_position == lit.lbest[i] &&
             swarm.particles[i].local_best_fitness == lit.lbest_f[i] &&
             swarm.particles[i].stagnation_count == lit.ct[i];
      }
    }
    mismatches += !ok;
  }
  return {mismatches == 0, std::to_string(kRstMonTraces) + " traces, " +
                               std::to_string(mismatches) + " mismatching, " +
                               std::to_string(resets) + " reset events compared"};
}

// --- simplex preservation -------------------------------------------------

Verdict simplex_preservation() {
  Rng rng(5);
  double worst_sum = 0, min_weight = 1;
  const std::size_t n_particles = 10;
  sf::pso::SwarmState m = sf::pso::make_swarm(n_particles, 1, 12, rng);
  sf::pso::SwarmState t = sf::pso::make_swarm(n_particles, 20, 6, rng);
  const sf::pso::PsoConfig cfg{0.5, 3, 0};
  int cycles = 0;
  auto audit = [&](const sf::pso::SwarmState& s) {
    for (const auto& p : s.particles) {
      for (std::size_t r = 0; r < p.rows; ++r) {
        double sum = 0;
        for (double x : p.row(r)) {
          sum += x;
          min_weight = std::min(min_weight, x);
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
      }
    }
  };
  while (cycles < kSimplexCycles) {
    for (sf::pso::SwarmState* s : {&m, &t}) {
      sf::pso::FitnessMap f;
      for (std::size_t i = 0; i < n_particles; ++i) f[i] = rng.uniform01() * 100;
      const auto r = sf::pso::rst_mon(*s, 3, f);
      sf::pso::update_pv(*s, r.reset_set, cfg, rng);
      audit(*s);
      cycles += static_cast<int>(n_particles);
    }
    // Raw projection of arbitrary vectors, including all-negative ones.
    std::vector<double> raw(1 + rng.below(16));
    for (double& x : raw) x = (rng.uniform01() - 0.6) * std::pow(10.0, rng.between(-3, 3));
    const sf::pso::WeightVector w = sf::pso::project_to_simplex(raw);
    double sum = 0;
    for (double x : w.weights()) {
      sum += x;
      min_weight = std::min(min_weight, x);
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    ++cycles;
  }
  return {min_weight >= 0 && worst_sum <= kSimplexTolerance,
          std::to_string(cycles) + " cycles, min weight " + fmt("%.3g", min_weight) +
              ", max |sum-1| " + fmt("%.2e", worst_sum)};
}

// --- saturation -------------------------------------------------------------

sf::campaign::CampaignConfig swarm_config(sf::campaign::Variant v, std::uint64_t seed) {
  sf::campaign::CampaignConfig cfg;
  cfg.variant = v;
  cfg.rng_seed = seed;
  cfg.k = 0.5;
  cfg.max_tests = ~std::uint64_t{0};
  return cfg;
}

Verdict saturation() {
  bool pass = true;
  std::string detail = "pso saturated share";
  for (std::uint64_t seed : kSaturationSeeds) {
    sf::campaign::Campaign c(swarm_config(sf::campaign::Variant::Pso, seed));
    std::vector<bool> reached(c.config().n_particles, false);
    for (int it = 0; it < kSaturationIterations; ++it) {
      c.step();
      const auto& norms = c.state().records.back().velocity_norms;
      for (std::size_t i = 0; i < norms.size(); ++i) {
        if (norms[i] < kSaturationNorm) reached[i] = true;
      }
    }
    const double share =
        static_cast<double>(std::count(reached.begin(), reached.end(), true)) / reached.size();
    pass = pass && share >= kSaturatedShare;
    detail += " " + fmt("%.1f", share);
  }
  detail += "; pso-reset resets/active windows past " + std::to_string(kSaturationIterations);
  for (std::uint64_t seed : kSaturationSeeds) {
    sf::campaign::Campaign c(swarm_config(sf::campaign::Variant::PsoReset, seed));
    std::size_t resets = 0;
    int active_windows = 0;
    bool window_active = false;
    for (int it = 1; it <= kResetHorizon; ++it) {
      c.step();
      const auto& rec = c.state().records.back();
      resets += rec.resets_m;
      if (it > kSaturationIterations) {
        for (double v : rec.velocity_norms) window_active = window_active || v >= kSaturationNorm;
        if ((it - kSaturationIterations) % kResetWindow == 0) {
          active_windows += window_active;
          window_active = false;
        }
      }
    }
    const int windows = (kResetHorizon - kSaturationIterations) / kResetWindow;
    pass = pass && resets >= 1 && active_windows == windows;
    detail += " " + std::to_string(resets) + "/" + std::to_string(active_windows) + "of" +
              std::to_string(windows);
  }
  return {pass, detail};
}

// --- two-operator experiment ---------------------------------------------------

Verdict two_operator() {
  Rng rng(31);
  const double even = sf::testing::csr_set_side_rate(0.5, kTwoOperatorTrials, rng);
  const double skewed = sf::testing::csr_set_side_rate(0.9, kTwoOperatorTrials, rng);
  return {std::abs(even - 0.5) <= kTwoOperatorTolerance &&
              std::abs(skewed - 0.9) <= kTwoOperatorTolerance,
          "weights (0.5,0.5) -> " + fmt("%.4f", even) + ", (0.9,0.1) -> " + fmt("%.4f", skewed)};
}

// --- differential detection -------------------------------------------------

Verdict differential() {
  const int builtin = shell(std::string(SWARMFUZZ_CLI) + " verify");
  const int checked_in = shell(std::string(SWARMFUZZ_CLI) + " verify --witness-dir " +
                               SWARMFUZZ_TEST_DIR + "/witnesses");
  int classified = 0;
  for (sf::dut::BugId id : sf::dut::kAllBugIds) {
    const sf::isa::TestProgram w = sf::dut::witness_program(id);
    const auto ms =
        sf::detector::compare_traces(sf::dut::simulate(w).trace, sf::dut::golden_execute(w));
    classified += sf::detector::detected_bugs(ms) == std::vector<sf::dut::BugId>{id};
  }
  Rng rng(404);
  int false_positives = 0;
  for (int t = 0; t < kTriggerFreePrograms; ++t) {
    sf::isa::TestProgram p = sf::testing::trigger_free_program(20, rng);
    p.id = static_cast<std::uint64_t>(t);
    false_positives +=
        !sf::detector::compare_traces(sf::dut::simulate(p).trace, sf::dut::golden_execute(p)).empty();
  }
  return {builtin == 0 && checked_in == 0 && classified == 6 && false_positives == 0,
          "verify exit " + std::to_string(builtin) + "/" + std::to_string(checked_in) + ", " +
              std::to_string(classified) + "/6 witnesses classified, " +
              std::to_string(false_positives) + " mismatching of " +
              std::to_string(kTriggerFreePrograms) + " trigger-free programs"};
}

// --- directional speedup ----------------------------------------------------

Verdict directional_speedup() {
  using sf::campaign::Variant;
  const Variant variants[] = {Variant::Baseline, Variant::PsoReset, Variant::PsoFuzz};
  std::vector<sf::report::TrialOutcome> outcomes;
  for (Variant v : variants) {
    for (std::size_t j = 0; j < kSpeedupTrials; ++j) {
      sf::campaign::CampaignConfig cfg;
      cfg.variant = v;
      cfg.max_tests = kSpeedupTests;
      cfg.rng_seed = j;
      outcomes.push_back(sf::report::outcome_of(v, j, sf::campaign::run_campaign(cfg)));
    }
  }
  auto median = [&](Variant v, std::size_t bug) {
    std::vector<std::optional<std::uint64_t>> xs;
    for (const auto& o : outcomes) {
      if (o.variant == v) xs.push_back(o.detection[bug]);
    }
    return sf::report::median_tests(xs);
  };
  auto mean_coverage = [&](Variant v) {
    double s = 0;
    for (const auto& o : outcomes) {
      if (o.variant == v) s += static_cast<double>(o.final_coverage());
    }
    return s / kSpeedupTrials;
  };
  auto wins = [&](Variant v) {
    int n = 0;
    for (std::size_t b = 0; b < sf::dut::kNumBugs; ++b) {
      const auto base = median(Variant::Baseline, b);
      const auto mine = median(v, b);
      // Undetected counts as infinitely many tests.
      n += mine && (!base || *mine < *base);
    }
    return n;
  };
  std::string medians;
  for (std::size_t b = 0; b < sf::dut::kNumBugs; ++b) {
    medians += " B" + std::to_string(b + 1) + "=";
    for (Variant v : variants) {
      const auto m = median(v, b);
      medians += (v == Variant::Baseline ? "" : "/") + (m ? fmt("%.0f", *m) : "N.D.");
    }
  }
  const int fuzz_wins = wins(Variant::PsoFuzz);
  const int reset_wins = wins(Variant::PsoReset);
  const double base_cov = mean_coverage(Variant::Baseline);
  const double fuzz_cov = mean_coverage(Variant::PsoFuzz);
  return {fuzz_wins >= kSpeedupMinBugs && reset_wins >= kSpeedupMinBugs && fuzz_cov >= base_cov,
          "bugs faster than baseline: psofuzz " + std::to_string(fuzz_wins) + "/6, pso-reset " +
              std::to_string(reset_wins) + "/6; coverage psofuzz " + fmt("%.1f", fuzz_cov) +
              " vs baseline " + fmt("%.1f", base_cov) + "; medians baseline/pso-reset/psofuzz" +
              medians};
}

// --- CLI determinism --------------------------------------------------------

Verdict cli_determinism() {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::string flags = std::string(SWARMFUZZ_CLI) +
                            " fuzz --variant psofuzz --rng-seed 7 --max-tests 2000 --out ";
  const int ra = shell(flags + a.string());
  const int rb = shell(flags + b.string());
  bool same = ra == 0 && rb == 0;
  for (const char* f : {"campaign.csv", "bugs.csv"}) {
    const std::string x = sf::testing::read_file(a / f);
    same = same && !x.empty() && x == sf::testing::read_file(b / f);
  }
  fs::remove_all(a);
  fs::remove_all(b);
  return {same, "two runs, campaign.csv and bugs.csv " + std::string(same ? "identical" : "differ")};
}

// --- checkpoint fidelity ----------------------------------------------------

Verdict checkpoint_fidelity() {
  const fs::path full = scratch("ckpt_full"), part = scratch("ckpt_part");
  const std::string cli = SWARMFUZZ_CLI;
  const int r1 = shell(cli + " fuzz --rng-seed 21 --max-tests 5000 --out " + full.string());
  const int r2 = shell(cli + " fuzz --rng-seed 21 --max-tests 2500 --out " + part.string());
  const int r3 = shell(cli + " fuzz --max-tests 5000 --resume " + (part / "checkpoint.bin").string() +
                       " --out " + part.string());
  bool same = r1 == 0 && r2 == 0 && r3 == 0;
  int files = 0;
  for (const char* f :
       {"campaign.csv", "bugs.csv", "mismatches.jsonl", "velocity.csv", "checkpoint.bin"}) {
    const std::string x = sf::testing::read_file(full / f);
    const bool eq = !x.empty() && x == sf::testing::read_file(part / f);
    same = same && eq;
    files += eq;
  }

  // Library path: restore at iteration 25 of 50.
  sf::campaign::CampaignConfig cfg;
  cfg.rng_seed = 22;
  cfg.max_tests = ~std::uint64_t{0};
  sf::campaign::Campaign whole(cfg), half(cfg);
  for (int i = 0; i < 50; ++i) whole.step();
  for (int i = 0; i < 25; ++i) half.step();
  fs::create_directories(part);
  half.save_checkpoint(part / "mid.bin");
  sf::campaign::Campaign resumed = sf::campaign::Campaign::restore(part / "mid.bin", cfg);
  for (int i = 0; i < 25; ++i) resumed.step();
  const bool lib = resumed.state() == whole.state();
  fs::remove_all(full);
  fs::remove_all(part);
  return {same && lib, "CLI resume at 2500 of 5000 tests: " + std::to_string(files) +
                           "/5 artifacts identical; library restore at 25 of 50 iterations " +
                           (lib ? "identical" : "differs")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"velocity_position_oracle", 1, velocity_oracle},
      {"reset_monitor_oracle", 10, rstmon_oracle},
      {"simplex_preservation", 10, simplex_preservation},
      {"saturation", 300, saturation},
      {"two_operator_experiment", 60, two_operator},
      {"differential_detection", 120, differential},
      {"directional_speedup", 1800, directional_speedup},
      {"cli_determinism", 120, cli_determinism},
      {"checkpoint_fidelity", 120, checkpoint_fidelity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = v.pass && secs <= c.limit_secs;
    failed += !pass;
    std::printf("%s %zu %s: %s (%.2fs, limit %.0fs)\n", pass ? "PASS" : "FAIL", i + 1, c.name,
                v.detail.c_str(), secs, c.limit_secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
