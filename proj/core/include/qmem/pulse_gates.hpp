#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Core>

#include "qmem/signal_model.hpp"
#include "qmem/spin_system.hpp"

namespace qmem {

using cplx = std::complex<double>;
using Matrix4c = Eigen::Matrix<cplx, 4, 4>;
using Propagator4 = Matrix4c;

enum class PulseKind { StrongMW, SelectiveMW_CnNOTe, SelectiveRF_CeNOTn };

std::string_view to_string(PulseKind k);

struct PulseSpec {
  PulseKind kind = PulseKind::StrongMW;
  double rabi = 0.0;         // rad/s
  double phase = 0.0;        // rad
  double area = 0.0;         // rad, rabi * t
  double detuning_mw = 0.0;  // rad/s
  double detuning_rf = 0.0;  // rad/s

  void validate() const;
};

// max_ij |(U U^dagger - I)_ij|
double unitarity_error(const Matrix4c& U);

Propagator4 strong_mw_propagator(double area, double phase);
Propagator4 cnnote_propagator();
Propagator4 cenotn_propagator();

// diag(1, 1, e^{i phi}, e^{i phi}); conjugation multiplies the electron
// coherences rho_13, rho_24 by e^{-i phi}.
Propagator4 phase_accumulation_propagator(double phi);

// Rotating-frame RWA Hamiltonian with only the drive of spec.kind switched
// on. Selective pulses keep the -A_par offset of |1> so the untargeted
// transition is detuned; the strong drive neglects it.
Matrix4c rwa_hamiltonian(const PulseSpec& spec, const SpinSystemParams& params);

// exp(-i H t), t = area / rabi, by Hermitian eigendecomposition.
// Throws std::runtime_error if the result is not unitary to 1e-12.
Propagator4 finite_duration_propagator(const PulseSpec& spec, const SpinSystemParams& params);

struct XY8Spec {
  int n_repeats = 1;
  double tau = 0.5e-6;  // s, centre-to-centre pi pulse spacing

  double t_dd() const { return 8.0 * n_repeats * tau; }
  void validate() const;

  static double resonant_tau(double nu_s) { return 1.0 / (2.0 * nu_s); }
  static XY8Spec resonant(double nu_s, int n_repeats = 1) {
    return XY8Spec{n_repeats, resonant_tau(nu_s)};
  }
};

inline constexpr double kResonanceTolerance = 1e-3;

struct XY8Phase {
  double phi = 0.0;
  bool resonant = true;
};

// (2/pi) gamma_nv B t_DD cos(xi), xi being the signal phase at the start of
// the acquisition. Off-resonance only clears the flag.
XY8Phase xy8_phase(const XY8Spec& spec, const SpinSystemParams& params, double B, double xi,
                   double nu_s);
XY8Phase xy8_phase(const XY8Spec& spec, const SpinSystemParams& params,
                   const SignalRealization& r, double nu_s);

// Phase prefactor (2/pi) gamma_nv t_DD, rad/G.
double phase_per_gauss(const SpinSystemParams& params, double t_dd);

}  // namespace qmem
