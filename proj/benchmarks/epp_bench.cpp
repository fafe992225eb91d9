// Copyright 2026 The epp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "epp/energy.hpp"
#include "epp/experiments.hpp"
#include "epp/purification.hpp"
#include "epp/sdp.hpp"
#include "epp/synthesis.hpp"

namespace epp {
namespace {

PurificationProblem ising_problem(int n, double gamma) {
  return PurificationProblem(2, n, gamma, ising_all_to_all(n, -0.5, -0.3));
}

void BM_StructuralOperators(benchmark::State& state) {
  const auto p = ising_problem(static_cast<int>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(structural_operators(p));
}
BENCHMARK(BM_StructuralOperators)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_SolveMaxSuccess(benchmark::State& state) {
  const auto s = structural_operators(ising_problem(static_cast<int>(state.range(0)), 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(solve_max_success(s));
}
BENCHMARK(BM_SolveMaxSuccess)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_SolveMaxSuccessDirect(benchmark::State& state) {
  const auto s = structural_operators(ising_problem(2, 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(solve_max_success_direct(s));
}
BENCHMARK(BM_SolveMaxSuccessDirect)->Unit(benchmark::kMillisecond);

void BM_BuildDilation(benchmark::State& state) {
  const auto p = ising_problem(static_cast<int>(state.range(0)), 0.5);
  const auto sol = solve_max_success(structural_operators(p));
  for (auto _ : state) benchmark::DoNotOptimize(build_dilation(sol.choi_star, p.energy()));
}
BENCHMARK(BM_BuildDilation)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  const auto sol = solve_max_success(structural_operators(ising_problem(2, 0.5)));
  const auto samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(monte_carlo_validate(sol.choi_star, {2, 2, 0.5, {}}, samples, 1));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples));
}
BENCHMARK(BM_MonteCarlo)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_RunPoint(benchmark::State& state) {
  const auto c = default_sweep_config();
  for (auto _ : state) benchmark::DoNotOptimize(run_point(c, 3, 0.5, 0));
}
BENCHMARK(BM_RunPoint)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace epp

BENCHMARK_MAIN();
