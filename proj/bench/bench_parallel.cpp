// Serial vs OpenMP: spectrum over the k grid and the Monte-Carlo ensemble.

#include <benchmark/benchmark.h>

#include "nrad/mc_oracle.hpp"
#include "nrad/rate_engine.hpp"

namespace {

nrad::RateRequest oscillator_request(nrad::RateMode mode) {
  nrad::RateRequest req;
  req.spec = nrad::builtin_harmonic_oscillator(1.0, 1.0, 1.0, 8);
  req.spec.widths.assign(req.spec.dim(), 0.05);
  req.noise = nrad::NoiseModel::exponential(0.5);
  req.mode = mode;
  req.naive = {60.0, 20.0};
  for (int q = 0; q < 64; ++q) req.k_grid.push_back(0.213 + 0.05 * q);  // off the integer resonances
  return req;
}

void BM_SpectrumSerial(benchmark::State& state) {
  const auto req = oscillator_request(static_cast<nrad::RateMode>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nrad::spectrum_serial(req));
}

void BM_SpectrumParallel(benchmark::State& state) {
  const auto req = oscillator_request(static_cast<nrad::RateMode>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nrad::spectrum(req));
}

void BM_Ensemble(benchmark::State& state) {
  const auto spec = nrad::builtin_two_level(1.0, 1.0, 0.7, 0.2);
  const auto noise = nrad::NoiseModel::exponential(1.0);
  nrad::OracleOptions opt;
  opt.parallel = state.range(0) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(nrad::estimate_rate(spec, noise, 0.8, 0, 50.0, 10.0, 400, 7, opt));
}

}  // namespace

BENCHMARK(BM_SpectrumSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectrumParallel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ensemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
