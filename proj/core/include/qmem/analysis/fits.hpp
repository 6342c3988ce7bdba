#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "qmem/analysis/least_squares.hpp"
#include "qmem/analysis/spectrum.hpp"
#include "qmem/spin_system.hpp"

namespace qmem::analysis {

struct FitReport {
  std::string model;
  std::string reason;
  int iterations = 0;
  double residual_std = 0.0;
  double chi2_dof = 0.0;
};

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, FitReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const FitReport& report() const { return report_; }

 private:
  FitReport report_;
};

// b + a sigma^2 / ((x - c)^2 + sigma^2)
struct SpectrumFit {
  double c = 0.0, sigma = 1.0, a = 0.0, b = 0.0;
  double se_c = 0.0, se_sigma = 0.0, se_a = 0.0, se_b = 0.0;
  FitReport report;

  double fwhm() const { return 2.0 * sigma; }
  double peak_value() const { return b + a; }
  double operator()(double x) const;
};

struct LorentzianOptions {
  std::optional<SpectrumFit> guess;
  double window_hz = 0.0;  // fit window half-width around the peak; 0 = automatic
  double f_min = 0.0;      // ignore bins below this when locating the peak
};

SpectrumFit fit_lorentzian(const PowerSpectrum& spec, const LorentzianOptions& opt = {});
SpectrumFit fit_lorentzian(std::span<const double> x, std::span<const double> y,
                           const SpectrumFit& guess);

// b + a sin(2 pi f x + phi) exp(-x / tau)
struct TimeFit {
  double a = 0.0, f = 0.0, phi = 0.0, b = 0.0, tau = 0.0;
  double se_a = 0.0, se_f = 0.0, se_phi = 0.0, se_b = 0.0, se_tau = 0.0;
  FitReport report;

  double operator()(double x) const;
};

struct SinusoidOptions {
  std::optional<TimeFit> guess;
  int pad_factor = 8;
};

// x must be uniformly spaced for the automatic guess.
TimeFit fit_decaying_sinusoid(std::span<const double> x, std::span<const double> y,
                              const SinusoidOptions& opt = {});

// b + sum_i a_i exp(-(x - c_i)^2 / (2 sigma_i^2)); dips sorted by centre.
struct TripleGaussianFit {
  std::array<double, 3> a{}, c{}, sigma{};
  std::array<double, 3> se_a{}, se_c{}, se_sigma{};
  double b = 0.0, se_b = 0.0;
  // normalized |a_i sigma_i|, lowest frequency first
  std::array<double, 3> populations{};
  FitReport report;
};

TripleGaussianFit fit_triple_gaussian(std::span<const double> freq, std::span<const double> y);

// Populations ordered (m_I = +1, 0, -1): the lowest MW line belongs to m_I = +1
// when A_par < 0.
std::array<double, 3> nuclear_populations(const TripleGaussianFit& fit,
                                          const SpinSystemParams& params);

// a J0(2 pi f x); field from 2 pi f = (2/pi) gamma_nv B.
struct BesselFit {
  double a = 0.0, f = 0.0;
  double se_a = 0.0, se_f = 0.0;
  double B_gauss = 0.0, se_B_gauss = 0.0;
  FitReport report;

  double operator()(double x) const;
};

BesselFit fit_bessel_j0(std::span<const double> x, std::span<const double> y,
                        const SpinSystemParams& params);

double field_from_bessel_frequency(double f, const SpinSystemParams& params);
double bessel_frequency_from_field(double B_gauss, const SpinSystemParams& params);

// sigma_noise / f(c) * B_test * sqrt(T_meas). Units follow B_test.
double sensitivity(double peak_value, double noise_std, double B_test, double T_meas);
double sensitivity(const SpectrumFit& fit, double noise_std, double B_test, double T_meas);

// Residual std of a Lorentzian fit over the spectrum bins inside the fit window.
double lorentzian_noise_std(const PowerSpectrum& spec, const SpectrumFit& fit, double window_hz);

nlohmann::json to_json(const FitReport& r);
nlohmann::json to_json(const SpectrumFit& f);
nlohmann::json to_json(const TimeFit& f);
nlohmann::json to_json(const TripleGaussianFit& f);
nlohmann::json to_json(const BesselFit& f);

}  // namespace qmem::analysis
