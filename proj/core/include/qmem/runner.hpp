#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmem/analysis/spectrum.hpp"
#include "qmem/readout_model.hpp"
#include "qmem/scenario.hpp"

namespace qmem {

// Units of work are grouped into fixed blocks; each block is processed by one
// worker and results are merged in block order, so the output never depends
// on the worker count.
inline constexpr int kBlockSize = 64;

// fn(block) for block = 0 .. n_blocks-1 over a small thread pool.
// The first exception thrown by any block is rethrown.
void parallel_blocks(int n_blocks, int workers, const std::function<void(int)>& fn);

// workers <= 0 means hardware concurrency.
int resolve_workers(int workers);

// One simulated time trace for cfg. MCS: N independent runs summed. CS: one
// fresh signal realization per (run, k). QDyne: one ensemble of N sensors
// read out together.
TimeTrace simulate_trace(const ScenarioConfig& cfg, int workers = 1);

// Amplitude decay time of the correlation signal: exp(-t_k / tau).
double correlation_decay_time(const ProtocolConfig& cfg);

struct AnalysisResult {
  analysis::PowerSpectrum spectrum;
  nlohmann::json fits;
  nlohmann::json summary;
};

// Fit failures are recorded in the result, never thrown.
AnalysisResult analyze_trace(const TimeTrace& trace, const ScenarioConfig& cfg);

struct RunBundle {
  TimeTrace trace;
  AnalysisResult analysis;
};

RunBundle run_scenario(const ScenarioConfig& cfg, int workers = 1);

// trace.csv, trace.json, psd.csv, fits.json, summary.json
void write_bundle(const RunBundle& b, const std::filesystem::path& dir);

struct CompareRow {
  Protocol protocol = Protocol::MCS;
  int N = 1;
  double snr = 0.0;
  double signal = 0.0;
  double noise = 0.0;
  double predicted_snr = 0.0;
  double fisher_ratio = 1.0;  // I(N) / I(N_0), leading order
  double f_peak_Hz = 0.0;
  int repetitions = 0;
};

struct CompareTable {
  double f_u_Hz = 0.0;
  double phi_rms = 0.0;
  std::vector<CompareRow> rows;
  // Least-squares log-log slopes; empty when fewer than two N values.
  std::vector<std::pair<Protocol, std::optional<double>>> slopes;
  std::vector<std::pair<Protocol, std::optional<double>>> predicted_slopes;

  std::optional<double> slope(Protocol p) const;
};

// Closed-form SNR of the estimators used by compare_protocols for a weak
// Gaussian signal. QDyne with noiseless readout gives +inf.
double predicted_snr(const ScenarioConfig& cfg, Protocol p, int N);

// Every protocol at every N with `repetitions` independent traces each.
CompareTable compare_protocols(const ScenarioConfig& cfg, std::span<const int> N_list,
                               int repetitions, int workers = 1,
                               std::span<const Protocol> protocols = {});

nlohmann::json to_json(const CompareTable& t);
void write_compare_csv(const CompareTable& t, std::ostream& out);

}  // namespace qmem
