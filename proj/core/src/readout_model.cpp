#include "qmem/readout_model.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace qmem {

namespace {

double poisson(double mean, Rng& rng) {
  if (mean <= 0.0) return 0.0;
  std::poisson_distribution<std::int64_t> d(mean);
  return static_cast<double>(d(rng));
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

std::string_view to_string(NoiseMode m) {
  switch (m) {
    case NoiseMode::TwoStage: return "two-stage";
    case NoiseMode::AveragedPoisson: return "averaged";
    case NoiseMode::Noiseless: return "none";
  }
  return "?";
}

NoiseMode noise_mode_from_string(std::string_view s) {
  if (s == "two-stage") return NoiseMode::TwoStage;
  if (s == "averaged") return NoiseMode::AveragedPoisson;
  if (s == "none") return NoiseMode::Noiseless;
  throw std::invalid_argument("noise must be two-stage, averaged or none; got '" + std::string(s) +
                              "'");
}

void ReadoutParams::validate() const {
  if (!(eta1 >= 0.0)) throw std::invalid_argument("readout.eta1 must be >= 0");
  if (!(eta0 >= eta1)) throw std::invalid_argument("readout.eta0 must be >= eta1");
  if (!(contrast() < 2.0)) throw std::invalid_argument("readout contrast must be < 2");
}

double readout(double p0_e, const ReadoutParams& params, Rng& rng) {
  const double p = clamp01(p0_e);
  switch (params.noise) {
    case NoiseMode::Noiseless:
      return params.mean_counts(p);
    case NoiseMode::AveragedPoisson:
      return poisson(params.mean_counts(p), rng);
    case NoiseMode::TwoStage: {
      std::bernoulli_distribution spin(p);
      return poisson(spin(rng) ? params.eta0 : params.eta1, rng);
    }
  }
  return 0.0;
}

double ensemble_readout(std::int64_t n, double p0_e, const ReadoutParams& params, Rng& rng) {
  if (n < 0) throw std::invalid_argument("ensemble_readout: n must be >= 0");
  const double p = clamp01(p0_e);
  switch (params.noise) {
    case NoiseMode::Noiseless:
      return n * params.mean_counts(p);
    case NoiseMode::AveragedPoisson:
      return poisson(n * params.mean_counts(p), rng);
    case NoiseMode::TwoStage: {
      std::binomial_distribution<std::int64_t> spins(n, p);
      const std::int64_t k = spins(rng);
      return poisson(k * params.eta0 + (n - k) * params.eta1, rng);
    }
  }
  return 0.0;
}

TraceAccumulator::TraceAccumulator(int M, double T) : T_(T), counts_(M, 0.0) {}

void TraceAccumulator::add_run(std::span<const PopulationRecord> records,
                               const ReadoutParams& params, Rng& rng) {
  if (records.size() != counts_.size()) throw std::invalid_argument("run length != M");
  for (std::size_t i = 0; i < records.size(); ++i) counts_[i] += readout(records[i].p0_e, params, rng);
  ++n_runs_;
}

void TraceAccumulator::add_ensemble(std::span<const PopulationRecord> records, std::int64_t n,
                                    const ReadoutParams& params, Rng& rng) {
  if (records.size() != counts_.size()) throw std::invalid_argument("run length != M");
  for (std::size_t i = 0; i < records.size(); ++i) {
    counts_[i] += ensemble_readout(n, records[i].p0_e, params, rng);
  }
  n_runs_ += n;
}

void TraceAccumulator::add_counts(int k_index, double c) { counts_.at(k_index) += c; }

void TraceAccumulator::merge(const TraceAccumulator& other) {
  if (other.counts_.size() != counts_.size()) throw std::invalid_argument("trace length mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  n_runs_ += other.n_runs_;
}

TimeTrace TraceAccumulator::finish() const {
  TimeTrace t;
  t.T = T_;
  t.counts = counts_;
  t.n_runs = n_runs_;
  t.times.resize(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) t.times[i] = (i + 1) * T_;
  return t;
}

TimeTrace aggregate_trace(std::span<const std::vector<PopulationRecord>> runs, double T,
                          const ReadoutParams& params, Rng& rng) {
  if (runs.empty()) throw std::invalid_argument("aggregate_trace: no runs");
  TraceAccumulator acc(static_cast<int>(runs.front().size()), T);
  for (const auto& r : runs) {
    if (r.size() != runs.front().size()) {
      throw std::invalid_argument("aggregate_trace: runs have different lengths");
    }
    acc.add_run(r, params, rng);
  }
  return acc.finish();
}

}  // namespace qmem
