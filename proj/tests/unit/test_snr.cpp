#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qmem/analysis/snr.hpp"

using namespace qmem;
using namespace qmem::analysis;

namespace {

TimeTrace trace_of(std::vector<double> y, double T) {
  TimeTrace t;
  t.T = T;
  t.counts = std::move(y);
  for (std::size_t k = 0; k < t.counts.size(); ++k) t.times.push_back((k + 1) * T);
  return t;
}

}  // namespace

TEST(Snr, InphaseAmplitudeExact) {
  const double T = 1e-3, f = 31.25, tau = 0.2;
  std::vector<double> y;
  for (int k = 1; k <= 512; ++k) {
    const double t = k * T;
    y.push_back(5.0 + 0.3 * std::exp(-t / tau) * std::cos(2 * M_PI * f * t));
  }
  // mean removal leaks a little of the decaying envelope
  EXPECT_NEAR(inphase_amplitude(trace_of(y, T), f, tau), 0.3, 3e-3);
  std::vector<double> z;
  for (int k = 1; k <= 512; ++k) z.push_back(-0.2 * std::cos(2 * M_PI * f * k * T));
  EXPECT_NEAR(inphase_amplitude(trace_of(z, T), f, kForever), -0.2, 1e-12);
}

TEST(Snr, FourierCoefficient) {
  const double T = 1e-3, f = 62.5;
  std::vector<double> y;
  for (int k = 1; k <= 256; ++k) y.push_back(std::cos(2 * M_PI * f * k * T + 0.7));
  const auto z = fourier_coefficient(trace_of(y, T), f);
  EXPECT_NEAR(std::abs(z), 0.5, 1e-12);
  EXPECT_NEAR(std::arg(z), 0.7, 1e-12);
}

TEST(Snr, WhiteNoiseFloor) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 2.0);
  std::vector<double> y(4096);
  for (auto& v : y) v = g(rng);
  // E|Z|^2 = sigma^2 / M
  EXPECT_NEAR(offpeak_noise_power(trace_of(y, 1e-3), 100.0) * 4096, 4.0, 0.2);
}

TEST(Snr, InphaseSnr) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  const double T = 1e-3, f = 50.0, A = 0.1;
  const int M = 400;
  std::vector<TimeTrace> reps;
  for (int r = 0; r < 400; ++r) {
    std::vector<double> y;
    for (int k = 1; k <= M; ++k) y.push_back(A * std::cos(2 * M_PI * f * k * T) + g(rng));
    reps.push_back(trace_of(y, T));
  }
  const auto e = snr_inphase(reps, f, kForever);
  // sd of the LS amplitude = sigma sqrt(2/M)
  const double sd = std::sqrt(2.0 / M);
  EXPECT_NEAR(e.noise, sd, 0.1 * sd);
  EXPECT_NEAR(e.snr, A / sd, 0.2 * A / sd + 0.1);
  EXPECT_THROW(snr_inphase(std::span<const TimeTrace>(reps.data(), 1), f, kForever),
               std::invalid_argument);
}

TEST(Snr, PowerSnrRandomPhase) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0, 2 * M_PI);
  const double T = 1e-3, f = 125.0, A = 0.2;
  const int M = 800;
  std::vector<TimeTrace> reps;
  for (int r = 0; r < 300; ++r) {
    const double ph = u(rng);
    std::vector<double> y;
    for (int k = 1; k <= M; ++k) y.push_back(A * std::cos(2 * M_PI * f * k * T + ph) + g(rng));
    reps.push_back(trace_of(y, T));
  }
  const auto e = snr_power(reps, f);
  // |Z|^2 = A^2/4 on top of the noise 1/M
  const double expect = std::sqrt((A * A / 4) / (1.0 / M));
  EXPECT_NEAR(e.snr, expect, 0.1 * expect);
}

TEST(Snr, LogLogSlope) {
  const std::vector<double> x = {1, 4, 16, 64};
  std::vector<double> y;
  for (double v : x) y.push_back(3 * std::pow(v, 0.5));
  EXPECT_NEAR(loglog_slope(x, y), 0.5, 1e-12);
  EXPECT_THROW(loglog_slope(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
  EXPECT_THROW(loglog_slope(std::vector<double>{1, 2}, std::vector<double>{1, -1}), std::invalid_argument);
}
