#include <vector>

#include <benchmark/benchmark.h>

#include "qmem/analysis/fits.hpp"
#include "qmem/analysis/spectrum.hpp"
#include "qmem/protocol_engine.hpp"
#include "qmem/runner.hpp"

using namespace qmem;

static void BM_McsRun(benchmark::State& st) {
  ProtocolConfig cfg;
  cfg.M = static_cast<int>(st.range(0));
  cfg.T1_nuc = 0.7;
  cfg.T1_nuc_laser = 210e-6;
  const auto g = ideal_gate_set();
  std::vector<double> phik(cfg.M, 0.01);
  for (auto _ : st) benchmark::DoNotOptimize(mcs_run_phases(cfg, g, {}, 0.02, phik));
  st.SetItemsProcessed(st.iterations() * cfg.M);
}
BENCHMARK(BM_McsRun)->Arg(128)->Arg(1991);

static void BM_PhysicalGates(benchmark::State& st) {
  ProtocolConfig cfg;
  cfg.mode = EvolutionMode::Physical;
  const auto p = SpinSystemParams::defaults();
  for (auto _ : st) benchmark::DoNotOptimize(build_gate_set(cfg, p));
}
BENCHMARK(BM_PhysicalGates);

static void BM_Psd(benchmark::State& st) {
  std::vector<double> x(st.range(0));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.1 * i);
  for (auto _ : st) benchmark::DoNotOptimize(analysis::psd(x, 15e-6, 4));
}
BENCHMARK(BM_Psd)->Arg(1991)->Arg(16384);

static void BM_LorentzianFit(benchmark::State& st) {
  std::vector<double> x(1991);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::cos(0.4 * i) * std::exp(-1e-3 * i);
  const auto s = analysis::psd(x, 15e-6, 4);
  for (auto _ : st) benchmark::DoNotOptimize(analysis::fit_lorentzian(s));
}
BENCHMARK(BM_LorentzianFit);

static void BM_SimulateTrace(benchmark::State& st) {
  ScenarioConfig cfg;
  cfg.protocol.M = 512;
  cfg.protocol.N = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(simulate_trace(cfg, 1));
}
BENCHMARK(BM_SimulateTrace)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
