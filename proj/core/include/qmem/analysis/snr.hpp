#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qmem/readout_model.hpp"

namespace qmem::analysis {

// Least-squares amplitude A of A w_k cos(2 pi f t_k), w_k = exp(-t_k/tau),
// after removing the mean. tau may be infinite.
double inphase_amplitude(const TimeTrace& trace, double f, double tau);

// (1/M) sum_k (x_k - mean) exp(-2 pi i f t_k)
std::complex<double> fourier_coefficient(const TimeTrace& trace, double f);

// Mean |Z_n|^2 over bins of the unpadded periodogram at least
// guard_bins away from DC and from f.
double offpeak_noise_power(const TimeTrace& trace, double f, int guard_bins = 5);

struct SnrEstimate {
  double snr = 0.0;
  double signal = 0.0;  // mean in-phase amplitude, or sqrt of excess power
  double noise = 0.0;   // std of the amplitude, or sqrt of noise power
  int repetitions = 0;
};

// mean / std of the in-phase amplitude across independent repetitions;
// for signals with a fixed phase relative to t = 0.
SnrEstimate snr_inphase(std::span<const TimeTrace> reps, double f, double tau);

// sqrt((<|Z(f)|^2> - P_noise) / P_noise); for signals with a random phase
// per repetition.
SnrEstimate snr_power(std::span<const TimeTrace> reps, double f, int guard_bins = 5);

// Least-squares slope of log(y) vs log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace qmem::analysis
