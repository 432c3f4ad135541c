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

#include <benchmark/benchmark.h>

#include "swarmfuzz/campaign.hpp"
#include "swarmfuzz/detector.hpp"
#include "swarmfuzz/dut.hpp"
#include "swarmfuzz/mutation.hpp"
#include "swarmfuzz/pso.hpp"
#include "swarmfuzz/seed.hpp"

namespace {

using namespace swarmfuzz;

isa::TestProgram random_program(Rng& rng) {
  return seed::gen_seed(seed::uniform_rows(20), 20, rng);
}

void BM_Simulate(benchmark::State& state) {
  Rng rng(1);
  const isa::TestProgram p = random_program(rng);
  for (auto _ : state) benchmark::DoNotOptimize(dut::simulate(p));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Simulate);

void BM_GoldenAndCompare(benchmark::State& state) {
  Rng rng(2);
  const isa::TestProgram p = random_program(rng);
  const dut::ArchTrace dut_trace = dut::simulate(p).trace;
  for (auto _ : state) {
    benchmark::DoNotOptimize(detector::compare_traces(dut_trace, dut::golden_execute(p)));
  }
}
BENCHMARK(BM_GoldenAndCompare);

void BM_Mutate(benchmark::State& state) {
  Rng rng(3);
  const isa::TestProgram p = random_program(rng);
  const pso::WeightVector w = pso::WeightVector::uniform(mutation::kNumOperators);
  for (auto _ : state) benchmark::DoNotOptimize(mutation::mutate(p, w, rng));
}
BENCHMARK(BM_Mutate);

void BM_GenSeed(benchmark::State& state) {
  Rng rng(4);
  const std::vector<double> rows = seed::uniform_rows(20);
  for (auto _ : state) benchmark::DoNotOptimize(seed::gen_seed(rows, 20, rng));
}
BENCHMARK(BM_GenSeed);

// One RstMon + UpdatePV round over a swarm of `range(0)` particles.
void BM_SwarmUpdate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto rows = static_cast<std::size_t>(state.range(1));
  const std::size_t cols = rows == 1 ? mutation::kNumOperators : isa::kNumInstrTypes;
  Rng rng(5);
  pso::SwarmState swarm = pso::make_swarm(n, rows, cols, rng);
  const pso::PsoConfig cfg;
  pso::FitnessMap f;
  for (auto _ : state) {
    for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<double>(rng.below(200));
    const pso::RstMonResult r = pso::rst_mon(swarm, cfg.beta, f);
    pso::update_pv(swarm, r.reset_set, cfg, rng);
  }
}
BENCHMARK(BM_SwarmUpdate)->Args({10, 1})->Args({10, 20})->Args({64, 1});

void BM_CampaignIteration(benchmark::State& state) {
  campaign::CampaignConfig cfg;
  cfg.variant = static_cast<campaign::Variant>(state.range(0));
  cfg.max_tests = ~std::uint64_t{0};
  campaign::Campaign c(cfg);
  for (auto _ : state) c.step();
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.n_particles));
  state.SetLabel(std::string(campaign::variant_name(cfg.variant)));
}
BENCHMARK(BM_CampaignIteration)->DenseRange(0, 3);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
