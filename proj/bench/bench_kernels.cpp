#include <benchmark/benchmark.h>

#include "qmem/experiment.hpp"
#include "qmem/kernels.hpp"

using namespace qmem;

namespace {

const InhomogeneityModel kModel{0.10025, 0.37318, 0.0};

void echo_kernel(const ShotDraw& d, Complex* out) {
  const EchoRecord r = pipeline_record(0.37, PipelineOptions{}, d);
  out[0] = {r.I_half_x, r.I_half_y};
  out[1] = {r.I_threehalf_x, r.I_threehalf_y};
}

void BM_EnsembleSerial(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(ensemble_mean_serial(kModel, state.range(0), 1, 2, echo_kernel));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EnsembleOmp(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(ensemble_mean_omp(kModel, state.range(0), 1, 2, echo_kernel));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void sweep(benchmark::State& state, Exec exec) {
  std::vector<double> th;
  for (int k = 0; k < 16; ++k) th.push_back(-1.5 + 0.2 * k);
  const EnsembleSettings e{kModel, static_cast<int>(state.range(0)), 1, exec};
  for (auto _ : state) benchmark::DoNotOptimize(sweep_theta(th, PipelineOptions{}, e));
}

void BM_SweepSerial(benchmark::State& state) { sweep(state, Exec::Serial); }
void BM_SweepOmp(benchmark::State& state) { sweep(state, Exec::OpenMP); }

}  // namespace

BENCHMARK(BM_EnsembleSerial)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleOmp)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepSerial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepOmp)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
