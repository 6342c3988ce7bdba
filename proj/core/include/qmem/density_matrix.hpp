#pragma once

#include <array>

#include <Eigen/Core>

#include "qmem/pulse_gates.hpp"
#include "qmem/spin_system.hpp"

namespace qmem {

using Matrix2c = Eigen::Matrix<cplx, 2, 2>;

// Index convention: i = 2*e + n with e = 0 for |0>e, 1 for |-1>e and
// n = 0 for |0>n, 1 for |+1>n.
class DensityMatrix4 {
 public:
  DensityMatrix4();
  explicit DensityMatrix4(const Matrix4c& m);

  static DensityMatrix4 pure(BasisState s);
  static DensityMatrix4 diagonal(const std::array<double, 4>& pops);

  const Matrix4c& matrix() const { return m_; }
  Matrix4c& matrix() { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

  // U rho U^dagger
  DensityMatrix4 apply(const Matrix4c& U) const;
  void apply_inplace(const Matrix4c& U);

  std::array<double, 4> populations() const;
  double trace() const;
  double p0_electron() const;          // P(|0>e)
  double memory_polarization() const;  // P(|0>n) - P(|+1>n)

  Matrix2c electron_reduced() const;  // Tr_n
  Matrix2c nuclear_reduced() const;   // Tr_e

  double hermiticity_error() const;
  double min_eigenvalue() const;

  // Cheap checks (Hermitian, unit trace); throws std::runtime_error.
  void check_cheap(double tol = 1e-12) const;
  // Adds the eigenvalue bound.
  void validate(double tol = 1e-12, double eig_tol = 1e-10) const;

 private:
  Matrix4c m_;
};

}  // namespace qmem
