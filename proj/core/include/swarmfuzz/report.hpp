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

// Cross-trial comparison tables: tests-to-detection medians with speedups,
// coverage totals, and coverage-versus-tests curves.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swarmfuzz/campaign.hpp"

namespace swarmfuzz::report {

struct TrialOutcome {
  campaign::Variant variant = campaign::Variant::Baseline;
  std::size_t trial = 0;
  campaign::DetectionTable detection;
  // (tests_total, coverage) after each iteration.
  std::vector<std::pair<std::uint64_t, std::size_t>> curve;

  std::size_t final_coverage() const { return curve.empty() ? 0 : curve.back().second; }
};

TrialOutcome outcome_of(campaign::Variant v, std::size_t trial,
                        const campaign::CampaignResult& r);

// Median with undetected runs counted as infinitely late. nullopt means the
// median itself is undetected.
std::optional<double> median_tests(std::span<const std::optional<std::uint64_t>> values);

// baseline / variant, formatted as "2.00x"; "N.D." when the variant's median
// is undetected, "inf" when only the baseline's is.
std::string speedup_cell(std::optional<double> baseline, std::optional<double> variant);

struct Tables {
  std::string detection;  // bug,variant,median_tests,speedup,detected
  std::string coverage;   // variant,total_mean[,total_std],increment,speedup
  std::string curve;      // variant,tests,coverage_mean[,coverage_std]
};

// Deviation columns are emitted only with more than one trial per variant.
Tables build_tables(std::span<const TrialOutcome> outcomes);

// Human-readable rendering of the detection and coverage tables.
std::string render(std::span<const TrialOutcome> outcomes);

// Reads <dir>/<variant>/trial_<j>/{campaign,bugs}.csv. Throws ParseError.
std::vector<TrialOutcome> load_bench_dir(const std::filesystem::path& dir);

// Per-trial directory used by bench.
std::filesystem::path trial_dir(const std::filesystem::path& dir, campaign::Variant v,
                                std::size_t trial);

// Runs each variant for `trials` trials; trial j uses base.rng_seed + j for
// every variant. With a non-empty base.out_dir, each trial writes its
// artifacts under trial_dir(base.out_dir, variant, j).
std::vector<TrialOutcome> run_bench(const campaign::CampaignConfig& base,
                                    std::span<const campaign::Variant> variants,
                                    std::size_t trials);

}  // namespace swarmfuzz::report
