#include <benchmark/benchmark.h>

#include "pdtc/lattice.hpp"
#include "pdtc/operators.hpp"
#include "pdtc/propagator.hpp"

namespace {

pdtc::SpinGraph graph(int n) {
  return pdtc::normalize_median(pdtc::orient_graph(pdtc::sample_graph(n, 0.9, 1.1, 7)));
}

void BM_HddApply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const pdtc::OperatorSet ops(n);
  const auto hdd = pdtc::build_hdd(graph(n), ops);
  const auto psi = pdtc::initial_state(ops, pdtc::Axis::x).psi;
  pdtc::StateVector out(psi.size());
  for (auto _ : state) {
    hdd.compiled.apply(psi, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(psi.size()));
}
BENCHMARK(BM_HddApply)->DenseRange(8, 14, 2);

void BM_TwoTonePeriod(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto engine = state.range(1) ? pdtc::Engine::dense : pdtc::Engine::matrix_free;
  const pdtc::OperatorSet ops(n);
  const auto hdd = pdtc::build_hdd(graph(n), ops);
  const auto schedule = pdtc::build_two_tone(16, 0.025, 0.0375, 0.075, 1.5707963267948966,
                                             0.98 * 3.141592653589793, 1);
  pdtc::AcDrive drive{1.0 / 3.141592653589793, schedule.resonance_frequencies().front(),
                      1.5707963267948966};
  pdtc::PropagatorOptions opt;
  opt.engine = engine;
  pdtc::Propagator prop(hdd, drive, pdtc::no_disorder(n), opt);
  for (auto _ : state) {
    auto st = pdtc::initial_state(ops, pdtc::Axis::x, schedule.start_time());
    auto trace = prop.evolve(st, schedule);
    benchmark::DoNotOptimize(trace.ix.data());
  }
}
BENCHMARK(BM_TwoTonePeriod)
    ->Args({8, 0})
    ->Args({8, 1})
    ->Args({10, 0})
    ->Args({10, 1})
    ->Args({12, 0})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
