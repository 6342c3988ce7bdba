#pragma once

#include <array>
#include <string_view>

namespace qmem {

// NV-centre / 14N parameter set. All couplings are angular frequencies
// (rad/s), gyromagnetic ratios in rad/s/G and the bias field in gauss.
struct SpinSystemParams {
  double D;         // zero-field splitting
  double A_par;     // parallel hyperfine coupling (signed)
  double P_quad;    // 14N quadrupole coupling (signed)
  double gamma_nv;  // electron gyromagnetic ratio
  double gamma_n;   // 14N gyromagnetic ratio
  double B_z;       // bias field along the NV axis

  // Constants of the reference experiment, B_z = 2043.763 G.
  static SpinSystemParams defaults();

  // Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

// Two-qubit working basis. The ordering is fixed across the library:
// index 0..3 <-> |0>e|0>n, |0>e|+1>n, |-1>e|0>n, |-1>e|+1>n.
enum class BasisState : int {
  E0_N0 = 0,
  E0_N1 = 1,
  Em1_N0 = 2,
  Em1_N1 = 3,
};

inline constexpr int index_of(BasisState s) { return static_cast<int>(s); }

// One-based label (|1>..|4>) used in the level scheme.
inline constexpr int label_of(BasisState s) { return static_cast<int>(s) + 1; }

std::string_view basis_name(BasisState s);

// Nine diagonal energies of the full 3x3 (m_s, m_I) manifold, rad/s.
class EnergyTable {
 public:
  EnergyTable() = default;

  double energy(int m_s, int m_I) const;
  void set(int m_s, int m_I, double value);

 private:
  static int slot(int m_s, int m_I);
  std::array<double, 9> values_{};
};

EnergyTable energy_levels(const SpinSystemParams& params);

// |gamma_nv B - D + m_I A_par| for the m_s = 0 <-> -1 line with nuclear
// projection m_I. Throws std::invalid_argument for m_I outside {-1,0,1}.
double mw_transition_frequency(const SpinSystemParams& params, int m_I);

// |P - A_par - gamma_n B|, the m_I = 0 <-> +1 line inside m_s = -1.
double rf_transition_frequency(const SpinSystemParams& params);

}  // namespace qmem
