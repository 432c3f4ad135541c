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

// swarmfuzz: command-line front end.
//
//   swarmfuzz fuzz      run one campaign
//   swarmfuzz bench     all variants x trials, comparison tables
//   swarmfuzz report    rebuild the tables from a bench directory
//   swarmfuzz show-bugs list the injected DUT bugs and their witnesses
//   swarmfuzz verify    check that every witness is detected and classified
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "swarmfuzz/campaign.hpp"
#include "swarmfuzz/detector.hpp"
#include "swarmfuzz/dut.hpp"
#include "swarmfuzz/error.hpp"
#include "swarmfuzz/report.hpp"

namespace {

using namespace swarmfuzz;

constexpr int kExitConfig = 2;

struct Flags {
  std::string variant = "psofuzz";
  std::size_t particles = 10;
  std::size_t seed_len = 20;
  double k = 0.5;
  std::uint32_t beta_m = 3;
  std::uint32_t beta_t = 3;
  std::string target_coverage = "1.0";
  std::uint64_t max_tests = 5000;
  double time_limit_secs = 0;
  std::uint64_t rng_seed = 0;
  std::size_t trials = 10;
  std::string out;
  std::string resume;
  unsigned jobs = 1;
  std::uint64_t checkpoint_every = 0;
  std::string witness_dir;
};

std::string default_out() {
  const char* env = std::getenv("SWARMFUZZ_OUT");
  return env && *env ? env : "swarmfuzz-out";
}

void add_campaign_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--particles", f.particles, "Particles per swarm, one fuzzer thread each")
      ->capture_default_str();
  cmd->add_option("--seed-len", f.seed_len, "Instructions per test program")
      ->capture_default_str();
  cmd->add_option("--k", f.k, "Velocity inertia")->capture_default_str();
  cmd->add_option("--beta-m", f.beta_m, "Reset threshold of the mutation swarm")
      ->capture_default_str();
  cmd->add_option("--beta-t", f.beta_t, "Reset threshold of the seed swarm")
      ->capture_default_str();
  cmd->add_option("--target-coverage", f.target_coverage,
                  "Stop at this coverage: a point count, or a fraction if it has a '.'")
      ->capture_default_str();
  cmd->add_option("--max-tests", f.max_tests, "Test budget")->capture_default_str();
  cmd->add_option("--time-limit-secs", f.time_limit_secs, "Wall-clock budget, 0 = none")
      ->capture_default_str();
  cmd->add_option("--rng-seed", f.rng_seed, "Campaign seed")->capture_default_str();
  cmd->add_option("--out", f.out, "Output directory (default from SWARMFUZZ_OUT)")
      ->capture_default_str();
  cmd->add_option("--jobs", f.jobs, "Simulation worker threads")->capture_default_str();
  cmd->add_option("--checkpoint-every", f.checkpoint_every,
                  "Write checkpoint.bin every N iterations, 0 = only at the end")
      ->capture_default_str();
}

campaign::CampaignConfig to_config(const Flags& f) {
  campaign::CampaignConfig cfg;
  cfg.variant = campaign::parse_variant(f.variant);
  cfg.n_particles = f.particles;
  cfg.program_len = f.seed_len;
  cfg.k = f.k;
  cfg.beta_m = f.beta_m;
  cfg.beta_t = f.beta_t;
  cfg.target_coverage = campaign::TargetCoverage::parse(f.target_coverage);
  cfg.max_tests = f.max_tests;
  cfg.time_limit_secs = f.time_limit_secs;
  cfg.rng_seed = f.rng_seed;
  cfg.out_dir = f.out;
  cfg.jobs = f.jobs;
  cfg.checkpoint_every = f.checkpoint_every;
  cfg.validate();
  return cfg;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  os << text;
  if (!os) throw ConfigError("cannot write " + file.string());
}

void on_sigint(int) { campaign::request_interrupt(); }

int cmd_fuzz(const Flags& f) {
  const campaign::CampaignConfig cfg = to_config(f);
  std::signal(SIGINT, on_sigint);
  campaign::Campaign c = f.resume.empty() ? campaign::Campaign(cfg)
                                          : campaign::Campaign::restore(f.resume, cfg);
  const campaign::CampaignResult r = c.run();
  const auto& st = c.state();
  std::printf("variant %s: %llu iterations, %llu tests, coverage %zu/%zu\n",
              std::string(campaign::variant_name(c.config().variant)).c_str(),
              static_cast<unsigned long long>(st.iteration),
              static_cast<unsigned long long>(st.tests_total), r.coverage.count(),
              dut::coverage_point_count());
  for (dut::BugId id : dut::kAllBugIds) {
    const auto& d = r.first_detection[dut::bug_index(id)];
    std::printf("  %s  %s\n", std::string(dut::bug_info(id).name).c_str(),
                d ? ("detected at test " + std::to_string(*d)).c_str() : "N.D.");
  }
  if (r.interrupted) {
    std::printf("interrupted; resume with --resume %s\n",
                (cfg.out_dir / "checkpoint.bin").string().c_str());
    return 130;
  }
  return 0;
}

void write_tables(const std::filesystem::path& dir,
                  const std::vector<report::TrialOutcome>& outcomes) {
  const report::Tables t = report::build_tables(outcomes);
  write_text(dir / "detection.csv", t.detection);
  write_text(dir / "coverage.csv", t.coverage);
  write_text(dir / "curve.csv", t.curve);
  std::fputs(report::render(outcomes).c_str(), stdout);
}

int cmd_bench(const Flags& f) {
  if (f.trials == 0) throw ConfigError("trials must be at least 1");
  campaign::CampaignConfig cfg = to_config(f);
  std::signal(SIGINT, on_sigint);
  std::filesystem::create_directories(cfg.out_dir);
  const auto outcomes = report::run_bench(cfg, campaign::kAllVariants, f.trials);
  if (campaign::interrupt_requested()) {
    std::fputs("interrupted\n", stderr);
    return 130;
  }
  write_tables(cfg.out_dir, outcomes);
  return 0;
}

int cmd_report(const Flags& f) {
  const auto outcomes = report::load_bench_dir(f.out);
  write_tables(f.out, outcomes);
  return 0;
}

int cmd_show_bugs() {
  for (dut::BugId id : dut::kAllBugIds) {
    const dut::BugInfo& b = dut::bug_info(id);
    std::printf("%s  %s\n    trigger: %s\n    witness:\n", std::string(b.name).c_str(),
                std::string(b.summary).c_str(), std::string(b.trigger).c_str());
    std::istringstream is{std::string(b.witness)};
    for (std::string line; std::getline(is, line);) std::printf("      %s\n", line.c_str());
  }
  return 0;
}

int cmd_verify(const Flags& f) {
  bool all_ok = true;
  for (dut::BugId id : dut::kAllBugIds) {
    const std::string name(dut::bug_info(id).name);
    isa::TestProgram program;
    if (f.witness_dir.empty()) {
      program = dut::witness_program(id);
    } else {
      const std::filesystem::path file = std::filesystem::path(f.witness_dir) / (name + ".s");
      std::ifstream is(file);
      if (!is) {
        std::printf("%s FAIL cannot read %s\n", name.c_str(), file.string().c_str());
        all_ok = false;
        continue;
      }
      std::stringstream ss;
      ss << is.rdbuf();
      try {
        program = isa::parse_program(ss.str());
      } catch (const ParseError& e) {
        std::printf("%s FAIL %s\n", name.c_str(), e.what());
        all_ok = false;
        continue;
      }
    }
    const dut::SimulationResult sim = dut::simulate(program);
    const auto mismatches = detector::compare_traces(sim.trace, dut::golden_execute(program));
    const auto bugs = detector::detected_bugs(mismatches);
    const bool ok = bugs.size() == 1 && bugs.front() == id;
    all_ok = all_ok && ok;
    std::string where = "no mismatch";
    for (const detector::Mismatch& m : mismatches) {
      if (m.matched_bug == id) {
        where = "instruction " + std::to_string(m.instruction_index) + " (" +
                std::string(detector::field_name(m.field)) + ")";
        break;
      }
    }
    std::string got;
    for (dut::BugId b : bugs) got += (got.empty() ? "" : ",") + std::string(dut::bug_info(b).name);
    std::printf("%s %s %s, classified as [%s]\n", name.c_str(), ok ? "ok  " : "FAIL",
                where.c_str(), got.c_str());
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swarmfuzz: PSO-scheduled differential fuzzer for a toy processor"};
  app.require_subcommand(1);
  Flags f;
  f.out = default_out();

  auto* fuzz = app.add_subcommand("fuzz", "Run one campaign");
  fuzz->add_option("--variant", f.variant, "baseline, pso, pso-reset or psofuzz")
      ->capture_default_str();
  add_campaign_flags(fuzz, f);
  fuzz->add_option("--resume", f.resume, "Continue from a checkpoint file");

  auto* bench = app.add_subcommand("bench", "Run every variant for several trials");
  add_campaign_flags(bench, f);
  bench->add_option("--trials", f.trials, "Trials per variant; trial j uses rng-seed + j")
      ->capture_default_str();

  auto* rep = app.add_subcommand("report", "Rebuild the tables from a bench directory");
  rep->add_option("--out", f.out, "Bench directory (default from SWARMFUZZ_OUT)")
      ->capture_default_str();

  auto* show = app.add_subcommand("show-bugs", "List the injected DUT bugs");

  auto* verify = app.add_subcommand("verify", "Run the bug witnesses through the detector");
  verify->add_option("--witness-dir", f.witness_dir,
                     "Read B1.s..B6.s from this directory instead of the built-in copies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (fuzz->parsed()) return cmd_fuzz(f);
    if (bench->parsed()) return cmd_bench(f);
    if (rep->parsed()) return cmd_report(f);
    if (show->parsed()) return cmd_show_bugs();
    if (verify->parsed()) return cmd_verify(f);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
