#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "qmem/readout_model.hpp"

namespace qmem::analysis {

enum class Window { Rectangular, Hann };

std::string_view to_string(Window w);
Window window_from_string(std::string_view s);

struct PowerSpectrum {
  std::vector<double> freq;   // Hz, 0 .. 1/(2T)
  std::vector<double> power;  // one-sided; sums to the windowed variance
  double df = 0.0;            // 1 / (pad_factor M T)
  int pad_factor = 1;
  int n_samples = 0;
  Window window = Window::Rectangular;

  std::size_t size() const { return power.size(); }
  std::size_t peak_index(double f_min = 0.0) const;
};

inline constexpr int kDefaultPad = 4;

// Mean-subtracted, windowed, zero-padded periodogram.
PowerSpectrum psd(std::span<const double> samples, double T, int pad_factor = kDefaultPad,
                  Window window = Window::Rectangular);

// Checks uniform sampling of trace.times (throws std::invalid_argument).
PowerSpectrum psd(const TimeTrace& trace, int pad_factor = kDefaultPad,
                  Window window = Window::Rectangular);

// Parabolic refinement of the peak position around bin i.
double refine_peak(const PowerSpectrum& s, std::size_t i);

// Full width at half maximum of the peak at bin i, linear interpolation
// between bins.
double half_max_width(const PowerSpectrum& s, std::size_t i);

}  // namespace qmem::analysis
