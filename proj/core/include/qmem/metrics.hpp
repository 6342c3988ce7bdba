#pragma once

#include "qmem/protocol_engine.hpp"

namespace qmem::metrics {

struct AdvantageFactor {
  double f_T = 1.0;
  double time_ratio = 1.0;  // T_tot,CS / T_tot,MCS = f_T^2
};

AdvantageFactor f_T(int M, double T, double T_init);

double total_time_mcs(int M, double T, double T_init);
double total_time_cs(int M, double T, double T_init);

// 1/T~ = 1/T1_nuc + 1/(M_limit T)
double effective_memory_lifetime(double T1_nuc, double M_limit, double T);

// M_limit = T1_nuc_laser / t_laser, the number of lasers to reach 1/e.
double laser_limit(double T1_nuc_laser, double t_laser);

// 0.6645 s/T^2 (B - 50 mT)^2, zero below 50 mT. B in tesla.
double lifetime_vs_field(double B_tesla);

// Opaque scalars are carried as given.
struct ComparisonInputs {
  int M = 1;
  int N = 1;
  double T = 0.0;
  double T_init = 0.0;
  double eta = 1.0;
  double c = 0.0;
  double phi_rms = 0.0;
  double T1_nuc = kForever;
  double T1_nuc_laser = kForever;
  double t_laser = 0.0;
  double B_field = 0.0;  // T
  double delta = 1.0;
  double T_D = 1.0;
  double T_M = 1.0;
  double T_total = 1.0;
  double Delta_T_k = 1.0;
  double omega_u = 1.0;
};

double fisher_cs(const ComparisonInputs& in, bool small_c = false);
double fisher_qdyne(const ComparisonInputs& in, bool small_c = false);

// I(N)/I(1) after eta -> N eta (all protocols) and phi_rms -> phi_rms/sqrt(N)
// (QDyne). small_c uses the leading-order Fisher forms.
double ensemble_scaling(Protocol p, int N, const ComparisonInputs& in, bool small_c = true);

// 1/sqrt(I); throws std::invalid_argument for I <= 0.
double cramer_rao_precision(double fisher_value);

}  // namespace qmem::metrics
