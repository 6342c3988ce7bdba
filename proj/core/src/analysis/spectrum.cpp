#include "qmem/analysis/spectrum.hpp"

#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

#include <fftw3.h>

#include "qmem/units.hpp"

namespace qmem::analysis {

namespace {

// fftw planning is not re-entrant
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::string_view to_string(Window w) { return w == Window::Hann ? "hann" : "rectangular"; }

Window window_from_string(std::string_view s) {
  if (s == "rectangular" || s == "rect") return Window::Rectangular;
  if (s == "hann") return Window::Hann;
  throw std::invalid_argument("window must be 'rectangular' or 'hann'; got '" + std::string(s) +
                              "'");
}

std::size_t PowerSpectrum::peak_index(double f_min) const {
  std::size_t best = 0;
  double bv = -1.0;
  for (std::size_t i = 0; i < power.size(); ++i) {
    if (freq[i] < f_min) continue;
    if (power[i] > bv) {
      bv = power[i];
      best = i;
    }
  }
  return best;
}

PowerSpectrum psd(std::span<const double> x, double T, int pad_factor, Window window) {
  if (x.size() < 2) throw std::invalid_argument("psd needs at least two samples");
  if (!(T > 0.0)) throw std::invalid_argument("psd: sampling interval must be > 0");
  if (pad_factor < 1) throw std::invalid_argument("psd: pad_factor must be >= 1");

  const int M = static_cast<int>(x.size());
  const int L = M * pad_factor;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / M;

  std::vector<double> w(M, 1.0);
  if (window == Window::Hann) {
    for (int i = 0; i < M; ++i) w[i] = 0.5 - 0.5 * std::cos(units::two_pi * i / (M - 1));
  }
  double wss = 0.0;
  for (double v : w) wss += v * v;

  double* in = fftw_alloc_real(L);
  fftw_complex* out = fftw_alloc_complex(L / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_r2c_1d(L, in, out, FFTW_ESTIMATE);
  }
  for (int i = 0; i < M; ++i) in[i] = (x[i] - mean) * w[i];
  for (int i = M; i < L; ++i) in[i] = 0.0;
  fftw_execute(plan);

  PowerSpectrum s;
  const int nb = L / 2 + 1;
  s.freq.resize(nb);
  s.power.resize(nb);
  s.df = 1.0 / (L * T);
  s.pad_factor = pad_factor;
  s.n_samples = M;
  s.window = window;
  for (int n = 0; n < nb; ++n) {
    const double re = out[n][0];
    const double im = out[n][1];
    const bool edge = (n == 0) || (L % 2 == 0 && n == L / 2);
    s.freq[n] = n * s.df;
    s.power[n] = (edge ? 1.0 : 2.0) * (re * re + im * im) / (L * wss);
  }

  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return s;
}

PowerSpectrum psd(const TimeTrace& trace, int pad_factor, Window window) {
  const auto& t = trace.times;
  if (t.size() != trace.counts.size()) throw std::invalid_argument("psd: times/counts mismatch");
  double T = trace.T;
  if (t.size() >= 2) {
    T = t[1] - t[0];
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (std::abs((t[i] - t[i - 1]) - T) > 1e-9 * std::abs(T)) {
        throw std::invalid_argument("psd: trace times are not uniformly sampled");
      }
    }
  }
  return psd(trace.counts, T, pad_factor, window);
}

double refine_peak(const PowerSpectrum& s, std::size_t i) {
  if (i == 0 || i + 1 >= s.size()) return s.freq[i];
  const double a = s.power[i - 1], b = s.power[i], c = s.power[i + 1];
  const double den = a - 2.0 * b + c;
  if (den >= 0.0) return s.freq[i];
  const double d = 0.5 * (a - c) / den;
  return s.freq[i] + d * s.df;
}

double half_max_width(const PowerSpectrum& s, std::size_t i) {
  const double half = 0.5 * s.power[i];
  std::size_t lo = i;
  while (lo > 0 && s.power[lo] > half) --lo;
  std::size_t hi = i;
  while (hi + 1 < s.size() && s.power[hi] > half) ++hi;
  auto cross = [&](std::size_t inner, std::size_t outer) {
    const double pi = s.power[inner], po = s.power[outer];
    if (pi == po) return s.freq[outer];
    const double t = (pi - half) / (pi - po);
    return s.freq[inner] + t * (s.freq[outer] - s.freq[inner]);
  };
  const double f_lo = lo < i ? cross(lo + 1, lo) : s.freq[i];
  const double f_hi = hi > i ? cross(hi - 1, hi) : s.freq[i];
  return f_hi - f_lo;
}

}  // namespace qmem::analysis
