#include "qmem/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace qmem::metrics {

AdvantageFactor f_T(int M, double T, double T_init) {
  if (M < 1) throw std::invalid_argument("f_T: M must be >= 1");
  if (!(T > 0.0) || !(T_init > 0.0)) throw std::invalid_argument("f_T: times must be > 0");
  const double r = T / T_init;
  const double sq = 0.5 * M * (1.0 + (1.0 + r) / (1.0 + M * r));
  return AdvantageFactor{std::sqrt(sq), sq};
}

double total_time_mcs(int M, double T, double T_init) { return T_init + M * T; }

double total_time_cs(int M, double T, double T_init) {
  return M * T_init + 0.5 * M * (M + 1.0) * T;
}

double effective_memory_lifetime(double T1_nuc, double M_limit, double T) {
  if (!(T1_nuc > 0.0) || !(M_limit > 0.0) || !(T > 0.0)) {
    throw std::invalid_argument("effective_memory_lifetime: inputs must be > 0");
  }
  const double inv = (std::isfinite(T1_nuc) ? 1.0 / T1_nuc : 0.0) + 1.0 / (M_limit * T);
  return 1.0 / inv;
}

double laser_limit(double T1_nuc_laser, double t_laser) {
  if (!(t_laser > 0.0)) throw std::invalid_argument("laser_limit: t_laser must be > 0");
  return T1_nuc_laser / t_laser;
}

double lifetime_vs_field(double B) {
  if (!(B >= 0.0)) throw std::invalid_argument("lifetime_vs_field: B must be >= 0");
  constexpr double k = 0.6645;  // s / T^2
  constexpr double B0 = 0.050;  // T
  if (B <= B0) return 0.0;
  return k * (B - B0) * (B - B0);
}

namespace {

double sensitivity_factor(double c, double eta, bool small_c) {
  const double x = c * c * eta;
  return small_c ? x / 4.0 : x / (4.0 + x);
}

}  // namespace

double fisher_cs(const ComparisonInputs& in, bool small_c) {
  const double s = sensitivity_factor(in.c, in.eta, small_c);
  const double p4 = std::pow(in.phi_rms, 4);
  return s * p4 * in.delta * in.delta * std::pow(in.T_D, 3) * in.T_M;
}

double fisher_qdyne(const ComparisonInputs& in, bool small_c) {
  const double s = sensitivity_factor(in.c, in.eta, small_c);
  const double p4 = std::pow(in.phi_rms, 4);
  const double lg = std::log(in.omega_u * in.T_total);
  return s * s * p4 * std::pow(in.T_D, 3) * in.T_total * lg / (in.Delta_T_k * in.Delta_T_k);
}

double ensemble_scaling(Protocol p, int N, const ComparisonInputs& in, bool small_c) {
  if (N < 1) throw std::invalid_argument("ensemble_scaling: N must be >= 1");
  ComparisonInputs one = in;
  ComparisonInputs many = in;
  many.eta = in.eta * N;
  if (p == Protocol::QDyne) {
    many.phi_rms = in.phi_rms / std::sqrt(static_cast<double>(N));
    return fisher_qdyne(many, small_c) / fisher_qdyne(one, small_c);
  }
  return fisher_cs(many, small_c) / fisher_cs(one, small_c);
}

double cramer_rao_precision(double I) {
  if (!(I > 0.0)) throw std::invalid_argument("cramer_rao_precision: Fisher information must be > 0");
  return 1.0 / std::sqrt(I);
}

}  // namespace qmem::metrics
