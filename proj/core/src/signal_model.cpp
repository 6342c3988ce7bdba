#include "qmem/signal_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qmem/units.hpp"

namespace qmem {

std::string_view to_string(SignalMode m) {
  return m == SignalMode::Classical ? "classical" : "statistical";
}

SignalMode signal_mode_from_string(std::string_view s) {
  if (s == "classical") return SignalMode::Classical;
  if (s == "statistical") return SignalMode::Statistical;
  throw std::invalid_argument("signal.mode must be 'classical' or 'statistical', got '" +
                              std::string(s) + "'");
}

void SignalConfig::validate() const {
  if (!(nu_s > 0.0)) throw std::invalid_argument("signal.nu_s_Hz must be > 0");
  if (!(B_amp >= 0.0)) throw std::invalid_argument("signal.B_gauss must be >= 0");
  if (n_sensors < 1) throw std::invalid_argument("signal.n_sensors must be >= 1");
}

SignalRealization draw_realization(const SignalConfig& cfg, Rng& rng, int sensor_index) {
  std::uniform_real_distribution<double> uni(0.0, units::two_pi);
  SignalRealization r;
  r.sensor_index = sensor_index;
  if (cfg.mode == SignalMode::Classical) {
    r.B = cfg.B_amp;
    r.xi0 = uni(rng);
    return r;
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double x = gauss(rng);
  const double y = gauss(rng);
  r.B = cfg.B_amp * std::hypot(x, y);
  r.xi0 = uni(rng);
  return r;
}

double phase_at(const SignalRealization& r, double nu_s, double delta_T) {
  // fractional cycles first; nu_s * dT can be ~1e4 cycles
  double cycles = std::fmod(nu_s * delta_T, 1.0);
  double x = std::fmod(r.xi0 + units::two_pi * cycles, units::two_pi);
  if (x < 0.0) x += units::two_pi;
  if (x >= units::two_pi) x = 0.0;
  return x;
}

double undersampled_frequency(double nu_s, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("sampling interval T must be > 0");
  const double m = std::round(nu_s * T);
  return std::abs(nu_s - m / T);
}

}  // namespace qmem
