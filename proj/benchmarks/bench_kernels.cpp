// Microbenchmarks for the hot kernels: spectral transforms, the link
// stencil, the Crank-Nicolson solve and a full Strang step.

#include "magnls/propagator.hpp"
#include "magnls/wkb.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace magnls;

namespace {

ComplexField make_field(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) {
    double x = g.dim() == 1 ? g.coord(static_cast<int>(k))
                            : g.coord(static_cast<int>(k) / g.n());
    double env = std::exp(-x * x / 8.0);
    f[k] = env * Complex{u(rng), u(rng)};
  }
  return f;
}

void bench_fft_roundtrip(benchmark::State& state) {
  Grid g(2, static_cast<int>(state.range(0)), 16.0);
  SpectralWorkspace ws(g);
  ComplexField u = make_field(g, 1);
  std::vector<Complex> hat(g.size());
  for (auto _ : state) {
    ws.forward(u.values(), hat);
    ws.inverse(hat, u.values());
    benchmark::DoNotOptimize(u.values().data());
  }
}
BENCHMARK(bench_fft_roundtrip)->Arg(128)->Arg(256);

void bench_link_stencil(benchmark::State& state) {
  Grid g(2, static_cast<int>(state.range(0)), 16.0);
  PotentialSpec pot = PotentialSpec::make_constant_field(1.0);
  LinkSet links = links_from_potential(pot, 0.0, g, 4.0);
  ComplexField u = make_field(g, 2);
  ComplexField out(g);
  for (auto _ : state) {
    magnetic_laplacian_into(u.values(), links, out.values());
    benchmark::DoNotOptimize(out.values().data());
  }
}
BENCHMARK(bench_link_stencil)->Arg(128)->Arg(256);

void bench_cn_step(benchmark::State& state) {
  Grid g(2, static_cast<int>(state.range(0)), 16.0);
  PotentialSpec pot = PotentialSpec::make_constant_field(1.0);
  LinkSet links = links_from_potential(pot, 0.0, g, 4.0);
  LinearStepper stepper(g, 1e-12, 500);
  ComplexField u = make_field(g, 3);
  for (auto _ : state) {
    stepper.step(u, links, 5e-4);
    benchmark::DoNotOptimize(u.values().data());
  }
}
BENCHMARK(bench_cn_step)->Arg(128)->Arg(256);

void bench_strang_step(benchmark::State& state) {
  Grid g(2, static_cast<int>(state.range(0)), 16.0);
  PotentialSpec pot = PotentialSpec::make_constant_field(1.0);
  NonlinearitySpec nl = NonlinearitySpec::make_power(1.0, -1, 0.0);
  SolverConfig cfg;
  cfg.b = 4.0;
  cfg.dt = 5e-4;
  cfg.t_end = 1.0;
  cfg.cn_tolerance = 1e-12;
  ComplexField u = make_field(g, 4);
  double t = 0.0;
  for (auto _ : state) {
    u = strang_step(u, pot, nl, t, cfg.dt, cfg.b, cfg);
    t += cfg.dt;
    benchmark::DoNotOptimize(u.values().data());
  }
}
BENCHMARK(bench_strang_step)->Arg(128);

void bench_wkb_rhs(benchmark::State& state) {
  Grid g(1, static_cast<int>(state.range(0)), 24.0);
  SpectralWorkspace ws(g);
  NonlinearitySpec nl = NonlinearitySpec::make_power(1.0, -1, 2.0);
  PotentialSpec pot = PotentialSpec::make_zero(1);
  WkbState s(g, 1.0 / 8.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    double x = g.coord(static_cast<int>(k));
    s.amplitude[k] = Complex{0.8 * std::exp(-x * x / 2.0), 0.0};
    s.velocity.value(0, k) = 0.3 * std::exp(-x * x / 3.0);
  }
  for (auto _ : state) {
    WkbState rhs = wkb_rhs(s, pot, nl, ws);
    benchmark::DoNotOptimize(rhs.amplitude.values().data());
  }
}
BENCHMARK(bench_wkb_rhs)->Arg(512)->Arg(2048);

} // namespace

BENCHMARK_MAIN();
