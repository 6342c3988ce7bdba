#include <gtest/gtest.h>

#include <complex>

#include "qmem/density_matrix.hpp"
#include "qmem/pulse_gates.hpp"

using namespace qmem;
using C = std::complex<double>;

TEST(DensityMatrix, DefaultIsGround) {
  DensityMatrix4 r;
  EXPECT_EQ(r(0, 0), C(1.0));
  EXPECT_DOUBLE_EQ(r.trace(), 1.0);
  EXPECT_DOUBLE_EQ(r.p0_electron(), 1.0);
  EXPECT_DOUBLE_EQ(r.memory_polarization(), 1.0);
}

TEST(DensityMatrix, PopulationsAndReductions) {
  const auto r = DensityMatrix4::diagonal({0.1, 0.2, 0.3, 0.4});
  EXPECT_NEAR(r.p0_electron(), 0.3, 1e-15);
  EXPECT_NEAR(r.memory_polarization(), (0.1 + 0.3) - (0.2 + 0.4), 1e-15);
  const Matrix2c e = r.electron_reduced();
  EXPECT_NEAR(e(0, 0).real(), 0.3, 1e-15);
  EXPECT_NEAR(e(1, 1).real(), 0.7, 1e-15);
  const Matrix2c n = r.nuclear_reduced();
  EXPECT_NEAR(n(0, 0).real(), 0.4, 1e-15);
  EXPECT_NEAR(n(1, 1).real(), 0.6, 1e-15);
}

TEST(DensityMatrix, ReducedCoherence) {
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = m(2, 2) = 0.5;
  m(0, 2) = C(0, 0.5);
  m(2, 0) = C(0, -0.5);
  DensityMatrix4 r(m);
  EXPECT_EQ(r.electron_reduced()(0, 1), C(0, 0.5));
  EXPECT_EQ(r.nuclear_reduced()(0, 1), C(0.0));
}

TEST(DensityMatrix, ApplyPreservesTraceAndHermiticity) {
  auto r = DensityMatrix4::diagonal({0.25, 0.25, 0.3, 0.2});
  r.apply_inplace(strong_mw_propagator(0.7, 0.2));
  r.apply_inplace(cenotn_propagator());
  EXPECT_NEAR(r.trace(), 1.0, 1e-14);
  EXPECT_LT(r.hermiticity_error(), 1e-15);
  EXPECT_NO_THROW(r.validate());
}

TEST(DensityMatrix, ValidateRejectsBadStates) {
  EXPECT_THROW(DensityMatrix4::diagonal({0.5, 0.6, 0.0, 0.0}).validate(), std::runtime_error);
  EXPECT_THROW(DensityMatrix4::diagonal({1.2, -0.2, 0.0, 0.0}).validate(), std::runtime_error);
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = 1.0;
  m(0, 1) = C(0.1);
  EXPECT_THROW(DensityMatrix4(m).check_cheap(), std::runtime_error);
}
