#include "qmem/spin_system.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qmem/units.hpp"

namespace qmem {

namespace {

void check_projection(int m, const char* what) {
  if (m < -1 || m > 1) {
    throw std::invalid_argument(std::string(what) + " must be in {-1, 0, +1}, got " +
                                std::to_string(m));
  }
}

}  // namespace

SpinSystemParams SpinSystemParams::defaults() {
  using units::two_pi;
  return SpinSystemParams{
      .D = two_pi * 2.87e9,
      .A_par = -two_pi * 2.166e6,
      .P_quad = -two_pi * 4.945e6,
      .gamma_nv = two_pi * 2.803e6,
      .gamma_n = two_pi * 0.308e3,
      .B_z = 2043.763,
  };
}

void SpinSystemParams::validate() const {
  if (!(D > 0.0)) throw std::invalid_argument("spin_system.D must be > 0");
  if (!(B_z >= 0.0)) throw std::invalid_argument("spin_system.B_z must be >= 0");
  if (!(gamma_nv > 0.0)) throw std::invalid_argument("spin_system.gamma_nv must be > 0");
  if (!(gamma_n > 0.0)) throw std::invalid_argument("spin_system.gamma_n must be > 0");
  if (!std::isfinite(A_par) || !std::isfinite(P_quad)) {
    throw std::invalid_argument("spin_system couplings must be finite");
  }
}

std::string_view basis_name(BasisState s) {
  switch (s) {
    case BasisState::E0_N0: return "|0>e|0>n";
    case BasisState::E0_N1: return "|0>e|+1>n";
    case BasisState::Em1_N0: return "|-1>e|0>n";
    case BasisState::Em1_N1: return "|-1>e|+1>n";
  }
  return "?";
}

int EnergyTable::slot(int m_s, int m_I) {
  check_projection(m_s, "m_s");
  check_projection(m_I, "m_I");
  return (m_s + 1) * 3 + (m_I + 1);
}

double EnergyTable::energy(int m_s, int m_I) const { return values_[slot(m_s, m_I)]; }

void EnergyTable::set(int m_s, int m_I, double value) { values_[slot(m_s, m_I)] = value; }

EnergyTable energy_levels(const SpinSystemParams& p) {
  // Diagonal of D Sz^2 + gamma_nv B Sz + A Sz Iz + P (Iz^2 - 2/3) - gamma_n B Iz.
  EnergyTable table;
  for (int ms = -1; ms <= 1; ++ms) {
    for (int mi = -1; mi <= 1; ++mi) {
      const double e = p.D * ms * ms + p.gamma_nv * p.B_z * ms + p.A_par * ms * mi +
                       p.P_quad * (mi * mi - 2.0 / 3.0) - p.gamma_n * p.B_z * mi;
      table.set(ms, mi, e);
    }
  }
  // -2P/3 exactly, independent of round-off in the general expression.
  table.set(0, 0, -2.0 * p.P_quad / 3.0);
  return table;
}

double mw_transition_frequency(const SpinSystemParams& p, int m_I) {
  check_projection(m_I, "m_I");
  return std::abs(p.gamma_nv * p.B_z - p.D + m_I * p.A_par);
}

double rf_transition_frequency(const SpinSystemParams& p) {
  return std::abs(p.P_quad - p.A_par - p.gamma_n * p.B_z);
}

}  // namespace qmem
