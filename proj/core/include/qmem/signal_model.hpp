#pragma once

#include <cstdint>
#include <string_view>

#include "qmem/rng.hpp"

namespace qmem {

enum class SignalMode { Classical, Statistical };

std::string_view to_string(SignalMode m);
SignalMode signal_mode_from_string(std::string_view s);

struct SignalConfig {
  SignalMode mode = SignalMode::Classical;
  double nu_s = 1.0e6;   // Hz
  double B_amp = 0.0;    // G; fixed envelope (classical) or rms (statistical)
  int n_sensors = 1;

  void validate() const;
};

struct SignalRealization {
  double B = 0.0;    // envelope, G
  double xi0 = 0.0;  // phase at T_0, rad
  int sensor_index = 0;
};

// Classical: B = B_amp. Statistical: Gaussian quadratures with
// standard deviation B_amp, i.e. Rayleigh envelope of scale B_amp.
// xi0 uniform on [0, 2pi) in both modes.
SignalRealization draw_realization(const SignalConfig& cfg, Rng& rng, int sensor_index = 0);

// xi0 + 2 pi nu_s dT, reduced to [0, 2pi).
double phase_at(const SignalRealization& r, double nu_s, double delta_T);

// Alias of nu_s under sampling interval T, folded into [0, 1/(2T)].
double undersampled_frequency(double nu_s, double T);

}  // namespace qmem
