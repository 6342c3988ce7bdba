#include "qmem/density_matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace qmem {

DensityMatrix4::DensityMatrix4() : m_(Matrix4c::Zero()) { m_(0, 0) = 1.0; }

DensityMatrix4::DensityMatrix4(const Matrix4c& m) : m_(m) {}

DensityMatrix4 DensityMatrix4::pure(BasisState s) {
  Matrix4c m = Matrix4c::Zero();
  m(index_of(s), index_of(s)) = 1.0;
  return DensityMatrix4(m);
}

DensityMatrix4 DensityMatrix4::diagonal(const std::array<double, 4>& pops) {
  Matrix4c m = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) m(i, i) = pops[i];
  return DensityMatrix4(m);
}

DensityMatrix4 DensityMatrix4::apply(const Matrix4c& U) const {
  return DensityMatrix4(U * m_ * U.adjoint());
}

void DensityMatrix4::apply_inplace(const Matrix4c& U) {
  Matrix4c tmp = U * m_;
  m_.noalias() = tmp * U.adjoint();
}

std::array<double, 4> DensityMatrix4::populations() const {
  return {m_(0, 0).real(), m_(1, 1).real(), m_(2, 2).real(), m_(3, 3).real()};
}

double DensityMatrix4::trace() const { return m_.trace().real(); }

double DensityMatrix4::p0_electron() const { return m_(0, 0).real() + m_(1, 1).real(); }

double DensityMatrix4::memory_polarization() const {
  return (m_(0, 0).real() + m_(2, 2).real()) - (m_(1, 1).real() + m_(3, 3).real());
}

Matrix2c DensityMatrix4::electron_reduced() const {
  Matrix2c r;
  for (int e = 0; e < 2; ++e)
    for (int f = 0; f < 2; ++f) r(e, f) = m_(2 * e, 2 * f) + m_(2 * e + 1, 2 * f + 1);
  return r;
}

Matrix2c DensityMatrix4::nuclear_reduced() const {
  Matrix2c r;
  for (int n = 0; n < 2; ++n)
    for (int k = 0; k < 2; ++k) r(n, k) = m_(n, k) + m_(2 + n, 2 + k);
  return r;
}

double DensityMatrix4::hermiticity_error() const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix4::min_eigenvalue() const {
  // symmetrise first so round-off asymmetry does not leak into the spectrum
  Matrix4c h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix4::check_cheap(double tol) const {
  const double herm = hermiticity_error();
  if (!(herm <= tol)) {
    throw std::runtime_error("density matrix not Hermitian (err=" + std::to_string(herm) + ")");
  }
  const cplx tr = m_.trace();
  if (!(std::abs(tr.real() - 1.0) <= tol) || !(std::abs(tr.imag()) <= tol)) {
    throw std::runtime_error("density matrix trace != 1 (tr=" + std::to_string(tr.real()) + ")");
  }
}

void DensityMatrix4::validate(double tol, double eig_tol) const {
  check_cheap(tol);
  const double lmin = min_eigenvalue();
  if (!(lmin >= -eig_tol)) {
    throw std::runtime_error("density matrix has negative eigenvalue " + std::to_string(lmin));
  }
}

}  // namespace qmem
