#include "qmem/analysis/snr.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qmem/analysis/spectrum.hpp"
#include "qmem/units.hpp"

namespace qmem::analysis {

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// cos(2 pi f t) with the cycle count reduced first; t f can reach 1e2..1e4
double cycle_phase(double f, double t) { return units::two_pi * std::fmod(f * t, 1.0); }

}  // namespace

double inphase_amplitude(const TimeTrace& trace, double f, double tau) {
  const auto& x = trace.counts;
  if (x.empty()) throw std::invalid_argument("inphase_amplitude: empty trace");
  const double m = mean_of(x);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double t = trace.times[k];
    const double w = std::isfinite(tau) ? std::exp(-t / tau) : 1.0;
    const double b = w * std::cos(cycle_phase(f, t));
    num += (x[k] - m) * b;
    den += b * b;
  }
  return den > 0.0 ? num / den : 0.0;
}

std::complex<double> fourier_coefficient(const TimeTrace& trace, double f) {
  const auto& x = trace.counts;
  const double m = mean_of(x);
  std::complex<double> z = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    z += (x[k] - m) * std::polar(1.0, -cycle_phase(f, trace.times[k]));
  }
  return z / static_cast<double>(x.size());
}

double offpeak_noise_power(const TimeTrace& trace, double f, int guard_bins) {
  const PowerSpectrum s = psd(trace, 1);
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = guard_bins; i + 1 < s.size(); ++i) {
    if (std::abs(s.freq[i] - f) <= guard_bins * s.df) continue;
    sum += 0.5 * s.power[i];  // = |X_n|^2 / M^2
    ++n;
  }
  if (n == 0) throw std::invalid_argument("offpeak_noise_power: no off-peak bins");
  return sum / n;
}

SnrEstimate snr_inphase(std::span<const TimeTrace> reps, double f, double tau) {
  if (reps.size() < 2) throw std::invalid_argument("snr_inphase needs >= 2 repetitions");
  std::vector<double> y;
  y.reserve(reps.size());
  for (const auto& t : reps) y.push_back(inphase_amplitude(t, f, tau));
  const double m = mean_of(y);
  double ss = 0.0;
  for (double v : y) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / (y.size() - 1));
  return SnrEstimate{sd > 0.0 ? m / sd : 0.0, m, sd, static_cast<int>(reps.size())};
}

SnrEstimate snr_power(std::span<const TimeTrace> reps, double f, int guard_bins) {
  if (reps.empty()) throw std::invalid_argument("snr_power needs repetitions");
  double sig = 0.0, noise = 0.0;
  for (const auto& t : reps) {
    sig += std::norm(fourier_coefficient(t, f));
    noise += offpeak_noise_power(t, f, guard_bins);
  }
  sig /= reps.size();
  noise /= reps.size();
  const double excess = std::max(sig - noise, 0.0);
  return SnrEstimate{noise > 0.0 ? std::sqrt(excess / noise) : 0.0, std::sqrt(excess),
                     std::sqrt(noise), static_cast<int>(reps.size())};
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_slope: values must be > 0");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("loglog_slope: degenerate x");
  return (n * sxy - sx * sy) / den;
}

}  // namespace qmem::analysis
