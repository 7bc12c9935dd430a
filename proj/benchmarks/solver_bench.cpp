#include <benchmark/benchmark.h>

#include <vector>

#include "ehsched/baseline.hpp"
#include "ehsched/lab.hpp"
#include "ehsched/offline.hpp"
#include "ehsched/online.hpp"

using namespace ehsched;

namespace {

std::vector<ProblemInstance> instances(std::size_t max_arrivals, std::size_t count) {
  lab::TraceSpec spec;
  spec.max_arrivals = max_arrivals;
  spec.intensity = 2.0;
  spec.horizon = static_cast<double>(max_arrivals);
  std::vector<ProblemInstance> out;
  for (std::size_t i = 0; i < count; ++i) {
    spec.seed = lab::mix_seed(17, i);
    out.push_back(lab::generate_instance(spec));
  }
  return out;
}

void BM_SolvePowerForRatio(benchmark::State& state) {
  const LogRate g;
  double rho = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_power_for_ratio(g, rho));
    rho = rho < 1.4 ? rho * 1.01 : 0.01;
  }
}
BENCHMARK(BM_SolvePowerForRatio);

void BM_OffSolve(benchmark::State& state) {
  const auto insts = instances(static_cast<std::size_t>(state.range(0)), 64);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(offline::off_solve(insts[i++ % insts.size()]).finish());
  }
}
BENCHMARK(BM_OffSolve)->Arg(4)->Arg(12)->Arg(48);

void BM_RunOnline(benchmark::State& state) {
  const auto insts = instances(static_cast<std::size_t>(state.range(0)), 64);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(online::run_online(insts[i++ % insts.size()]).t_finish);
  }
}
BENCHMARK(BM_RunOnline)->Arg(4)->Arg(12)->Arg(48);

void BM_Baseline(benchmark::State& state) {
  const auto insts = instances(static_cast<std::size_t>(state.range(0)), 64);
  const LogRate g;
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& inst = insts[i++ % insts.size()];
    benchmark::DoNotOptimize(baseline::min_finish_unconstrained(inst.tx(), g, inst.bits(), 0.0).finish());
  }
}
BENCHMARK(BM_Baseline)->Arg(12)->Arg(48);

void BM_Oracle(benchmark::State& state) {
  const auto insts = instances(12, 16);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lab::oracle_min_finish(insts[i++ % insts.size()], 1e-3));
  }
}
BENCHMARK(BM_Oracle);

}  // namespace

BENCHMARK_MAIN();
