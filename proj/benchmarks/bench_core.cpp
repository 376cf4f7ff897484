#include <benchmark/benchmark.h>

#include "cht/classifier.hpp"
#include "cht/simulator.hpp"

namespace {

const cht::DomainSpec kBox({3.141592653589793, 2.0, 1.0});

cht::SimState state(int n) {
  cht::SimState s;
  s.domain = kBox;
  s.T = 0.24;
  s.u = cht::random_field({n, n, n}, 1e-2, 4, 1);
  return s;
}

void BM_InverseForward(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const cht::SpectralField f = cht::random_field({n, n, n}, 1.0, n - 1, 3);
  for (auto _ : st) {
    const cht::RealGrid g = cht::inverse_transform(f, kBox);
    benchmark::DoNotOptimize(cht::forward_transform(g, kBox));
  }
}
BENCHMARK(BM_InverseForward)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  cht::SimState s = state(n);
  cht::StepConfig c;
  c.grid = {n, n, n};
  c.dt = 1.0;
  c.scheme = st.range(1) ? cht::Scheme::IMEX2 : cht::Scheme::IMEX1;
  cht::Stepper stepper(s, c);
  for (auto _ : st) stepper.step(s);
}
BENCHMARK(BM_Step)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& st) {
  cht::PhysicalParams p;
  p.ubar = 0.3;
  const double L = 2.0 * 3.141592653589793;
  const cht::DomainSpec d(std::array<double, 3>{L, st.range(0) > 1 ? L : 3.0, st.range(0) > 2 ? L : 1.0});
  for (auto _ : st) benchmark::DoNotOptimize(cht::classify_transition(p, d));
}
BENCHMARK(BM_Classify)->DenseRange(1, 3);

}  // namespace
BENCHMARK_MAIN();
