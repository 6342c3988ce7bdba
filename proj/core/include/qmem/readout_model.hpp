#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmem/protocol_engine.hpp"
#include "qmem/rng.hpp"

namespace qmem {

enum class NoiseMode { TwoStage, AveragedPoisson, Noiseless };

std::string_view to_string(NoiseMode m);
NoiseMode noise_mode_from_string(std::string_view s);

struct ReadoutParams {
  double eta0 = 0.03;
  double eta1 = 0.02;
  NoiseMode noise = NoiseMode::TwoStage;

  double eta() const { return 0.5 * (eta0 + eta1); }
  double contrast() const { return eta() > 0.0 ? (eta0 - eta1) / eta() : 0.0; }
  double mean_counts(double p0) const { return eta0 * p0 + eta1 * (1.0 - p0); }
  void validate() const;
};

// One readout of one sensor.
double readout(double p0_e, const ReadoutParams& params, Rng& rng);

// n sensors (or repetitions) with the same p0, summed. Same law as n calls
// to readout() but O(1).
double ensemble_readout(std::int64_t n, double p0_e, const ReadoutParams& params, Rng& rng);

struct TimeTrace {
  double T = 0.0;  // s
  std::vector<double> times;   // T_k = k T
  std::vector<double> counts;  // summed over runs
  std::int64_t n_runs = 0;
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t size() const { return counts.size(); }
};

// Accumulates readout counts run by run.
class TraceAccumulator {
 public:
  TraceAccumulator(int M, double T);

  void add_run(std::span<const PopulationRecord> records, const ReadoutParams& params, Rng& rng);
  // One record stream standing for n sensors read out together.
  void add_ensemble(std::span<const PopulationRecord> records, std::int64_t n,
                    const ReadoutParams& params, Rng& rng);
  void add_counts(int k_index, double counts);
  void merge(const TraceAccumulator& other);
  void bump_runs(std::int64_t n) { n_runs_ += n; }

  TimeTrace finish() const;
  const std::vector<double>& counts() const { return counts_; }

 private:
  double T_;
  std::vector<double> counts_;
  std::int64_t n_runs_ = 0;
};

// All runs must have the same length; throws std::invalid_argument otherwise.
TimeTrace aggregate_trace(std::span<const std::vector<PopulationRecord>> runs, double T,
                          const ReadoutParams& params, Rng& rng);

}  // namespace qmem
