#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "qmem/density_matrix.hpp"
#include "qmem/pulse_gates.hpp"
#include "qmem/units.hpp"

using namespace qmem;
using C = std::complex<double>;

namespace {

const C I(0.0, 1.0);

Matrix4c mw_literal(double A, double xi) {
  const C c = std::cos(A / 2), s = std::sin(A / 2);
  const C up = -I * std::exp(-I * xi) * s, lo = -I * std::exp(I * xi) * s;
  Matrix4c m;
  m << c, 0, up, 0,
       0, c, 0, up,
       lo, 0, c, 0,
       0, lo, 0, c;
  return m;
}

Matrix4c cnnote_literal() {
  Matrix4c m;
  m << 1, 0, 0, 0,
       0, 0, 0, -I,
       0, 0, 1, 0,
       0, -I, 0, 0;
  return m;
}

Matrix4c cenotn_literal() {
  Matrix4c m;
  m << 1, 0, 0, 0,
       0, 1, 0, 0,
       0, 0, 0, -I,
       0, 0, -I, 0;
  return m;
}

double max_abs(const Matrix4c& m) { return m.cwiseAbs().maxCoeff(); }

std::array<double, 4> pops_after(const Matrix4c& U, const DensityMatrix4& rho) {
  return rho.apply(U).populations();
}

double leakage(const Matrix4c& U, const Matrix4c& ideal) {
  // worst population error over basis inputs
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      worst = std::max(worst, std::abs(std::norm(U(j, i)) - std::norm(ideal(j, i))));
    }
  }
  return worst;
}

}  // namespace

TEST(PulseGates, StrongPulseMatchesLiteralMatrix) {
  for (double A : {0.0, 0.3, units::pi / 2, units::pi, 2.7}) {
    for (double xi : {0.0, units::pi / 2, -units::pi / 2, 1.1}) {
      EXPECT_LT(max_abs(strong_mw_propagator(A, xi) - mw_literal(A, xi)), 1e-15);
    }
  }
}

TEST(PulseGates, StrongPulseZeroAreaIsIdentity) {
  EXPECT_LT(max_abs(strong_mw_propagator(0.0, 0.7) - Matrix4c::Identity()), 1e-15);
}

TEST(PulseGates, StrongPiPulseOnGround) {
  const Matrix4c U = strong_mw_propagator(units::pi, 0.0);
  EXPECT_NEAR(std::abs(U(2, 0) - (-I)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(U(0, 0)), 0.0, 1e-15);
}

TEST(PulseGates, TwoHalfPiYPulsesTransferPopulation) {
  const Matrix4c U = strong_mw_propagator(units::pi / 2, units::pi / 2);
  auto rho = DensityMatrix4::pure(BasisState::E0_N0).apply(U).apply(U);
  EXPECT_NEAR(rho.populations()[2], 1.0, 1e-14);
}

TEST(PulseGates, ConditionalGatesMatchLiteralMatrices) {
  EXPECT_EQ(max_abs(cnnote_propagator() - cnnote_literal()), 0.0);
  EXPECT_EQ(max_abs(cenotn_propagator() - cenotn_literal()), 0.0);
}

TEST(PulseGates, ConditionalGatesSquared) {
  Matrix4c expect = Matrix4c::Identity();
  expect(1, 1) = expect(3, 3) = -1.0;
  EXPECT_LT(max_abs(cnnote_propagator() * cnnote_propagator() - expect), 1e-15);
  const auto rho = DensityMatrix4::diagonal({0.1, 0.2, 0.3, 0.4});
  const auto p = rho.apply(cnnote_propagator()).apply(cnnote_propagator()).populations();
  EXPECT_NEAR(p[1], 0.2, 1e-15);
  const auto q = rho.apply(cenotn_propagator()).apply(cenotn_propagator()).populations();
  EXPECT_NEAR(q[3], 0.4, 1e-15);
}

TEST(PulseGates, CenotnSwapsElectronDownSector) {
  const auto p = pops_after(cenotn_propagator(), DensityMatrix4::diagonal({0.5, 0, 0.5, 0}));
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[2], 0.0, 1e-15);
  EXPECT_NEAR(p[3], 0.5, 1e-15);
}

TEST(PulseGates, AllPropagatorsUnitary) {
  EXPECT_LT(unitarity_error(strong_mw_propagator(1.3, 0.4)), 1e-12);
  EXPECT_LT(unitarity_error(cnnote_propagator()), 1e-12);
  EXPECT_LT(unitarity_error(cenotn_propagator()), 1e-12);
  EXPECT_LT(unitarity_error(phase_accumulation_propagator(0.77)), 1e-12);
}

TEST(PulseGates, StrongDriveIndependentOfNuclearState) {
  const Matrix4c U = strong_mw_propagator(0.9, 0.3);
  const auto a = pops_after(U, DensityMatrix4::pure(BasisState::E0_N0));
  const auto b = pops_after(U, DensityMatrix4::pure(BasisState::E0_N1));
  EXPECT_NEAR(a[0], b[1], 1e-15);
  EXPECT_NEAR(a[2], b[3], 1e-15);
}

TEST(PulseGates, RwaHamiltonianLayout) {
  const auto p = SpinSystemParams::defaults();
  PulseSpec s{PulseKind::SelectiveRF_CeNOTn, 1e5, 0.4, units::pi, 2.0, 3.0};
  const Matrix4c H = rwa_hamiltonian(s, p);
  EXPECT_NEAR((H - H.adjoint()).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  EXPECT_NEAR(H(0, 0).real(), -p.A_par, 1e-9);
  EXPECT_NEAR(H(1, 1).real(), 3.0, 1e-12);
  EXPECT_NEAR(H(2, 2).real(), -2.0, 1e-12);
  EXPECT_NEAR(H(3, 3).real(), 1.0, 1e-12);
  // RF couples 3-4 with e^{i xi}/2 above the diagonal
  EXPECT_NEAR(std::abs(H(2, 3) - 0.5e5 * std::exp(I * 0.4)), 0.0, 1e-9);
  EXPECT_EQ(H(0, 2), C(0.0));
}

TEST(PulseGates, FiniteStrongPulseMatchesIdeal) {
  const auto p = SpinSystemParams::defaults();
  for (double xi : {0.0, units::pi / 2}) {
    PulseSpec s{PulseKind::StrongMW, units::two_pi * 50e6, xi, units::pi, 0.0, 0.0};
    EXPECT_LT(max_abs(finite_duration_propagator(s, p) - strong_mw_propagator(units::pi, xi)), 1e-9);
  }
}

TEST(PulseGates, FiniteZeroAreaIsIdentity) {
  const auto p = SpinSystemParams::defaults();
  PulseSpec s{PulseKind::SelectiveMW_CnNOTe, 1e4, 0.0, 0.0, 0.0, 0.0};
  EXPECT_LT(max_abs(finite_duration_propagator(s, p) - Matrix4c::Identity()), 1e-14);
}

TEST(PulseGates, SelectiveGatesApproachIdeal) {
  const auto p = SpinSystemParams::defaults();
  const double a = std::abs(p.A_par);
  for (auto [kind, ideal] : {std::pair{PulseKind::SelectiveMW_CnNOTe, cnnote_literal()},
                             std::pair{PulseKind::SelectiveRF_CeNOTn, cenotn_literal()}}) {
    double prev = 1.0;
    for (double frac : {0.1, 1.0 / 30.0, 0.01}) {
      PulseSpec s{kind, frac * a, 0.0, units::pi, 0.0, 0.0};
      const Matrix4c U = finite_duration_propagator(s, p);
      EXPECT_LT(unitarity_error(U), 1e-12);
      const double l = leakage(U, ideal);
      EXPECT_LT(l, prev);
      prev = l;
    }
    EXPECT_LE(prev, 1e-3);
  }
}

TEST(PulseGates, PulseSpecValidation) {
  PulseSpec s{PulseKind::StrongMW, 1.0, 0.0, -1.0, 0.0, 0.0};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.area = 1.0;
  s.rabi = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(PulseGates, Xy8PhaseDirectEvaluation) {
  const auto p = SpinSystemParams::defaults();
  const XY8Spec x = XY8Spec::resonant(1e6);
  EXPECT_NEAR(x.t_dd(), 4e-6, 1e-18);
  // (2/pi) * 2pi * 2.803e6 * 0.1428 * 4e-6
  const double expect = 4.0 * 2.803e6 * 0.1428 * 4e-6;
  const auto r = xy8_phase(x, p, 0.1428, 0.0, 1e6);
  EXPECT_NEAR(r.phi, expect, 1e-12);
  EXPECT_NEAR(r.phi, 6.40, 0.01);
  EXPECT_TRUE(r.resonant);
  EXPECT_EQ(xy8_phase(x, p, 0.0, 0.3, 1e6).phi, 0.0);
  EXPECT_NEAR(xy8_phase(x, p, 0.1428, units::pi / 2, 1e6).phi, 0.0, 1e-12);
}

TEST(PulseGates, Xy8OffResonanceOnlyFlags) {
  const auto p = SpinSystemParams::defaults();
  XY8Spec x{1, 0.6e-6};
  const auto r = xy8_phase(x, p, 0.01, 0.0, 1e6);
  EXPECT_FALSE(r.resonant);
  EXPECT_NEAR(r.phi, phase_per_gauss(p, x.t_dd()) * 0.01, 1e-15);
}
