#include "qmem/pulse_gates.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "qmem/units.hpp"

namespace qmem {

namespace {
constexpr cplx I1{0.0, 1.0};
}

std::string_view to_string(PulseKind k) {
  switch (k) {
    case PulseKind::StrongMW: return "strong_mw";
    case PulseKind::SelectiveMW_CnNOTe: return "cnnote";
    case PulseKind::SelectiveRF_CeNOTn: return "cenotn";
  }
  return "?";
}

void PulseSpec::validate() const {
  if (!(area >= 0.0)) throw std::invalid_argument("pulse area must be >= 0");
  if (!(rabi > 0.0)) throw std::invalid_argument("pulse rabi must be > 0 for finite duration");
  if (!std::isfinite(phase) || !std::isfinite(detuning_mw) || !std::isfinite(detuning_rf)) {
    throw std::invalid_argument("pulse phase/detunings must be finite");
  }
}

double unitarity_error(const Matrix4c& U) {
  Matrix4c d = U * U.adjoint() - Matrix4c::Identity();
  return d.cwiseAbs().maxCoeff();
}

Propagator4 strong_mw_propagator(double area, double phase) {
  const double c = std::cos(area / 2.0);
  const double s = std::sin(area / 2.0);
  const cplx up = -I1 * std::exp(-I1 * phase) * s;
  const cplx lo = -I1 * std::exp(I1 * phase) * s;
  Propagator4 U = Propagator4::Zero();
  U(0, 0) = c;
  U(1, 1) = c;
  U(2, 2) = c;
  U(3, 3) = c;
  U(0, 2) = up;
  U(1, 3) = up;
  U(2, 0) = lo;
  U(3, 1) = lo;
  return U;
}

Propagator4 cnnote_propagator() {
  Propagator4 U = Propagator4::Zero();
  U(0, 0) = 1.0;
  U(2, 2) = 1.0;
  U(1, 3) = -I1;
  U(3, 1) = -I1;
  return U;
}

Propagator4 cenotn_propagator() {
  Propagator4 U = Propagator4::Zero();
  U(0, 0) = 1.0;
  U(1, 1) = 1.0;
  U(2, 3) = -I1;
  U(3, 2) = -I1;
  return U;
}

Propagator4 phase_accumulation_propagator(double phi) {
  Propagator4 U = Propagator4::Zero();
  const cplx e = std::exp(I1 * phi);
  U(0, 0) = 1.0;
  U(1, 1) = 1.0;
  U(2, 2) = e;
  U(3, 3) = e;
  return U;
}

Matrix4c rwa_hamiltonian(const PulseSpec& spec, const SpinSystemParams& params) {
  Matrix4c H = Matrix4c::Zero();
  const double dmw = spec.detuning_mw;
  const double drf = spec.detuning_rf;
  H(0, 0) = spec.kind == PulseKind::StrongMW ? 0.0 : -params.A_par;
  H(1, 1) = drf;
  H(2, 2) = -dmw;
  H(3, 3) = drf - dmw;

  const double half = 0.5 * spec.rabi;
  if (spec.kind == PulseKind::SelectiveRF_CeNOTn) {
    const cplx up = half * std::exp(I1 * spec.phase);
    H(0, 1) = up;
    H(1, 0) = std::conj(up);
    H(2, 3) = up;
    H(3, 2) = std::conj(up);
  } else {
    const cplx up = half * std::exp(-I1 * spec.phase);
    H(0, 2) = up;
    H(2, 0) = std::conj(up);
    H(1, 3) = up;
    H(3, 1) = std::conj(up);
  }
  return H;
}

Propagator4 finite_duration_propagator(const PulseSpec& spec, const SpinSystemParams& params) {
  spec.validate();
  if (spec.area == 0.0) return Propagator4::Identity();
  const double t = spec.area / spec.rabi;
  const Matrix4c H = rwa_hamiltonian(spec, params);

  Eigen::SelfAdjointEigenSolver<Matrix4c> es(H);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition of H_rwa failed");
  Eigen::Matrix<cplx, 4, 1> ph;
  for (int i = 0; i < 4; ++i) ph(i) = std::exp(-I1 * (es.eigenvalues()(i) * t));
  Propagator4 U = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();

  const double err = unitarity_error(U);
  if (!(err <= 1e-12)) {
    throw std::runtime_error("finite-duration propagator not unitary (err=" + std::to_string(err) +
                             ")");
  }
  return U;
}

void XY8Spec::validate() const {
  if (n_repeats < 1) throw std::invalid_argument("xy8.n_repeats must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("xy8.tau must be > 0");
}

double phase_per_gauss(const SpinSystemParams& params, double t_dd) {
  return (2.0 / units::pi) * params.gamma_nv * t_dd;
}

XY8Phase xy8_phase(const XY8Spec& spec, const SpinSystemParams& params, double B, double xi,
                   double nu_s) {
  XY8Phase out;
  const double tau0 = XY8Spec::resonant_tau(nu_s);
  out.resonant = std::abs(spec.tau - tau0) / spec.tau <= kResonanceTolerance;
  out.phi = phase_per_gauss(params, spec.t_dd()) * B * std::cos(xi);
  return out;
}

XY8Phase xy8_phase(const XY8Spec& spec, const SpinSystemParams& params,
                   const SignalRealization& r, double nu_s) {
  return xy8_phase(spec, params, r.B, r.xi0, nu_s);
}

}  // namespace qmem
