#include <gtest/gtest.h>

#include <cmath>

#include "qmem/metrics.hpp"

using namespace qmem;
using namespace qmem::metrics;

TEST(Metrics, AdvantageFactorReference) {
  const auto a = f_T(1991, 15.063e-6, 101.57e-6);
  EXPECT_NEAR(a.f_T, 31.6, 0.1);
  EXPECT_NEAR(a.time_ratio, 999.0, 1.0);
  EXPECT_NEAR(a.f_T * a.f_T, a.time_ratio, 1e-9);
}

TEST(Metrics, AdvantageFactorLimits) {
  EXPECT_DOUBLE_EQ(f_T(1, 1e-5, 1e-4).f_T, 1.0);
  // T >> T_init, large M
  const int M = 100000;
  EXPECT_NEAR(f_T(M, 1.0, 1e-9).f_T, std::sqrt(M / 2.0), 1e-3 * std::sqrt(M / 2.0));
}

TEST(Metrics, TimeLedgersAreConsistent) {
  for (int M : {1, 7, 1991}) {
    for (double T : {1e-6, 15.063e-6}) {
      const double Ti = 101.57e-6;
      EXPECT_NEAR(f_T(M, T, Ti).time_ratio * total_time_mcs(M, T, Ti), total_time_cs(M, T, Ti),
                  1e-12 * total_time_cs(M, T, Ti));
      EXPECT_DOUBLE_EQ(total_time_mcs(M, T, Ti), Ti + M * T);
      EXPECT_NEAR(total_time_cs(M, T, Ti), M * Ti + M * (M + 1) / 2.0 * T, 1e-15);
    }
  }
}

TEST(Metrics, EffectiveLifetime) {
  EXPECT_NEAR(effective_memory_lifetime(0.7, 1050, 15.063e-6), 15.47e-3, 0.01e-3);
  EXPECT_DOUBLE_EQ(effective_memory_lifetime(kForever, 1050, 15.063e-6), 1050 * 15.063e-6);
  EXPECT_NEAR(laser_limit(210e-6, 200e-9), 1050.0, 1e-9);
}

TEST(Metrics, LifetimeVsField) {
  EXPECT_NEAR(lifetime_vs_field(0.2043763), 15.84e-3, 0.01e-3);
  EXPECT_NEAR(lifetime_vs_field(0.2044), 15.8e-3, 0.1e-3);
  EXPECT_EQ(lifetime_vs_field(0.05), 0.0);
  EXPECT_EQ(lifetime_vs_field(0.01), 0.0);
  EXPECT_NEAR(lifetime_vs_field(0.1172), 3.0e-3, 0.05e-3);
  double prev = 0.0;
  for (double B = 0.051; B < 1.0; B += 0.01) {
    EXPECT_GT(lifetime_vs_field(B), prev);
    prev = lifetime_vs_field(B);
  }
}

namespace {

ComparisonInputs inputs() {
  ComparisonInputs in;
  in.eta = 0.025;
  in.c = 0.4;
  in.phi_rms = 0.05;
  in.delta = 0.3;
  in.T_D = 4e-6;
  in.T_M = 0.015;
  in.T_total = 0.03;
  in.Delta_T_k = 15e-6;
  in.omega_u = 2 * M_PI * 4182.0;
  return in;
}

}  // namespace

TEST(Metrics, FisherForms) {
  auto in = inputs();
  const double x = in.c * in.c * in.eta;
  const double base = std::pow(in.phi_rms, 4) * in.delta * in.delta * std::pow(in.T_D, 3) * in.T_M;
  EXPECT_NEAR(fisher_cs(in), x / (4 + x) * base, 1e-30);
  EXPECT_NEAR(fisher_cs(in, true), x / 4 * base, 1e-30);
  EXPECT_NEAR(fisher_cs(in, true) / fisher_cs(in), 1.0, 2 * x);
  const double i0 = fisher_cs(in), q0 = fisher_qdyne(in);
  in.phi_rms *= 2;
  EXPECT_NEAR(fisher_cs(in) / i0, 16.0, 1e-9);
  EXPECT_NEAR(fisher_qdyne(in) / q0, 16.0, 1e-9);
  in.phi_rms = 0.0;
  EXPECT_EQ(fisher_cs(in), 0.0);
  EXPECT_EQ(fisher_qdyne(in), 0.0);
}

TEST(Metrics, EnsembleScaling) {
  const auto in = inputs();
  EXPECT_NEAR(ensemble_scaling(Protocol::CS, 4, in), 4.0, 1e-12);
  EXPECT_NEAR(ensemble_scaling(Protocol::MCS, 64, in), 64.0, 1e-12);
  for (int N : {1, 4, 16, 64, 1000}) EXPECT_NEAR(ensemble_scaling(Protocol::QDyne, N, in), 1.0, 1e-12);
  for (auto p : {Protocol::MCS, Protocol::CS, Protocol::QDyne}) {
    EXPECT_NEAR(ensemble_scaling(p, 1, in), 1.0, 1e-15);
  }
  EXPECT_THROW(ensemble_scaling(Protocol::CS, 0, in), std::invalid_argument);
}

TEST(Metrics, CramerRao) {
  EXPECT_DOUBLE_EQ(cramer_rao_precision(4.0), 0.5);
  EXPECT_NEAR(cramer_rao_precision(4.0 * 9) / cramer_rao_precision(4.0), 1.0 / 3, 1e-15);
  const auto in = inputs();
  const double i1 = fisher_cs(in, true);
  const double i16 = i1 * ensemble_scaling(Protocol::CS, 16, in);
  EXPECT_NEAR(cramer_rao_precision(i16) / cramer_rao_precision(i1), 0.25, 1e-12);
  EXPECT_THROW(cramer_rao_precision(0.0), std::invalid_argument);
}
