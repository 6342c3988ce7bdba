#include "qmem/analysis/fits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/QR>

#include "qmem/units.hpp"

namespace qmem::analysis {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kJ0FirstZero = 2.404825557695773;

FitReport make_report(const std::string& model, const LmResult& r) {
  return FitReport{model, r.reason, r.iterations, r.residual_std, r.chi2_dof};
}

void require_converged(const std::string& model, const LmResult& r) {
  if (!r.converged || !r.params.allFinite()) {
    throw FitError(model + " fit did not converge: " + r.reason, make_report(model, r));
  }
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  const double t = pos - i;
  return i + 1 < v.size() ? v[i] * (1 - t) + v[i + 1] * t : v[i];
}

void check_xy(std::span<const double> x, std::span<const double> y, std::size_t min_n,
              const std::string& model) {
  if (x.size() != y.size()) throw std::invalid_argument(model + ": x/y length mismatch");
  if (x.size() < min_n) {
    throw FitError(model + ": not enough points", FitReport{model, "too few points", 0, 0, 0});
  }
}

}  // namespace

// ---- Lorentzian ----

double SpectrumFit::operator()(double x) const {
  const double d = x - c;
  return b + a * sigma * sigma / (d * d + sigma * sigma);
}

SpectrumFit fit_lorentzian(std::span<const double> x, std::span<const double> y,
                           const SpectrumFit& guess) {
  const std::string model = "lorentzian";
  check_xy(x, y, 5, model);
  const int n = static_cast<int>(x.size());
  ResidualFn fn = [&](const VectorXd& p, VectorXd& r, MatrixXd* J) {
    const double c = p(0), s = p(1), a = p(2), b = p(3);
    const double s2 = s * s;
    for (int i = 0; i < n; ++i) {
      const double d = x[i] - c;
      const double q = d * d + s2;
      const double L = s2 / q;
      r(i) = b + a * L - y[i];
      if (J) {
        (*J)(i, 0) = a * s2 * 2.0 * d / (q * q);
        (*J)(i, 1) = a * 2.0 * s * d * d / (q * q);
        (*J)(i, 2) = L;
        (*J)(i, 3) = 1.0;
      }
    }
  };
  VectorXd p0(4);
  p0 << guess.c, guess.sigma, guess.a, guess.b;
  const LmResult r = levenberg_marquardt(fn, p0, n);
  require_converged(model, r);

  SpectrumFit out;
  out.c = r.params(0);
  out.sigma = std::abs(r.params(1));
  out.a = r.params(2);
  out.b = r.params(3);
  out.se_c = r.std_errors(0);
  out.se_sigma = r.std_errors(1);
  out.se_a = r.std_errors(2);
  out.se_b = r.std_errors(3);
  out.report = make_report(model, r);
  if (!(out.sigma > 0.0) || !(out.a > 0.0)) {
    throw FitError("lorentzian fit found no positive peak", out.report);
  }
  return out;
}

SpectrumFit fit_lorentzian(const PowerSpectrum& spec, const LorentzianOptions& opt) {
  if (spec.size() < 8) {
    throw FitError("lorentzian: spectrum too short", FitReport{"lorentzian", "too few bins", 0, 0, 0});
  }
  const double f_min = opt.f_min > 0.0 ? opt.f_min : spec.freq[1];
  const std::size_t ip = spec.peak_index(f_min);
  const double pmax = spec.power[ip];
  if (!(pmax > 0.0)) {
    throw FitError("lorentzian: spectrum has no peak", FitReport{"lorentzian", "flat spectrum", 0, 0, 0});
  }

  SpectrumFit g;
  if (opt.guess) {
    g = *opt.guess;
  } else {
    g.b = quantile(spec.power, 0.5);
    g.a = pmax - g.b;
    g.c = refine_peak(spec, ip);
    g.sigma = std::max(0.5 * half_max_width(spec, ip), spec.df);
  }
  double half = opt.window_hz;
  if (!(half > 0.0)) half = std::max(10.0 * g.sigma, 20.0 * spec.df);

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (std::abs(spec.freq[i] - g.c) <= half && spec.freq[i] >= f_min) {
      xs.push_back(spec.freq[i]);
      ys.push_back(spec.power[i]);
    }
  }
  return fit_lorentzian(xs, ys, g);
}

double lorentzian_noise_std(const PowerSpectrum& spec, const SpectrumFit& fit, double window_hz) {
  double ss = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (std::abs(spec.freq[i] - fit.c) > window_hz) continue;
    const double d = spec.power[i] - fit(spec.freq[i]);
    ss += d * d;
    ++n;
  }
  return n > 0 ? std::sqrt(ss / n) : 0.0;
}

// ---- decaying sinusoid ----

double TimeFit::operator()(double x) const {
  const double decay = std::isfinite(tau) ? std::exp(-x / tau) : 1.0;
  return b + a * std::sin(units::two_pi * f * x + phi) * decay;
}

TimeFit fit_decaying_sinusoid(std::span<const double> x, std::span<const double> y,
                              const SinusoidOptions& opt) {
  const std::string model = "decaying_sinusoid";
  check_xy(x, y, 8, model);
  const int n = static_cast<int>(x.size());

  TimeFit g;
  if (opt.guess) {
    g = *opt.guess;
  } else {
    const double dx = x[1] - x[0];
    const PowerSpectrum s = psd(y, dx, opt.pad_factor);
    const std::size_t ip = s.peak_index(s.freq[1]);
    if (!(s.power[ip] > 0.0)) {
      throw FitError(model + ": data has no oscillating component",
                     FitReport{model, "flat spectrum", 0, 0, 0});
    }
    g.f = refine_peak(s, ip);

    // linear least squares in (alpha, beta, b) on a grid of decay rates
    const double span = x[n - 1] - x[0];
    std::vector<double> rates{0.0};
    for (int i = 0; i < 40; ++i) rates.push_back(std::pow(10.0, -1.3 + 2.6 * i / 39.0) / span);
    double best = std::numeric_limits<double>::infinity();
    for (double gam : rates) {
      MatrixXd A(n, 3);
      VectorXd yy(n);
      for (int i = 0; i < n; ++i) {
        const double th = units::two_pi * g.f * x[i];
        const double E = std::exp(-gam * (x[i] - x[0]));
        A(i, 0) = std::sin(th) * E;
        A(i, 1) = std::cos(th) * E;
        A(i, 2) = 1.0;
        yy(i) = y[i];
      }
      const VectorXd sol = A.colPivHouseholderQr().solve(yy);
      const double sse = (A * sol - yy).squaredNorm();
      if (sse < best) {
        best = sse;
        const double amp = std::hypot(sol(0), sol(1)) * std::exp(gam * x[0]);
        g.a = amp;
        g.phi = std::atan2(sol(1), sol(0));
        g.b = sol(2);
        g.tau = gam > 0.0 ? 1.0 / gam : std::numeric_limits<double>::infinity();
      }
    }
  }

  ResidualFn fn = [&](const VectorXd& p, VectorXd& r, MatrixXd* J) {
    const double a = p(0), f = p(1), ph = p(2), b = p(3), gam = p(4);
    for (int i = 0; i < n; ++i) {
      const double th = units::two_pi * f * x[i] + ph;
      const double E = std::exp(-gam * x[i]);
      const double s = std::sin(th), c = std::cos(th);
      r(i) = b + a * s * E - y[i];
      if (J) {
        (*J)(i, 0) = s * E;
        (*J)(i, 1) = a * c * E * units::two_pi * x[i];
        (*J)(i, 2) = a * c * E;
        (*J)(i, 3) = 1.0;
        (*J)(i, 4) = -x[i] * a * s * E;
      }
    }
  };
  VectorXd p0(5);
  p0 << g.a, g.f, g.phi, g.b, (std::isfinite(g.tau) && g.tau > 0.0 ? 1.0 / g.tau : 0.0);
  const LmResult r = levenberg_marquardt(fn, p0, n);
  require_converged(model, r);

  TimeFit out;
  out.a = r.params(0);
  out.f = r.params(1);
  out.phi = r.params(2);
  out.b = r.params(3);
  const double gam = r.params(4);
  out.se_a = r.std_errors(0);
  out.se_f = r.std_errors(1);
  out.se_phi = r.std_errors(2);
  out.se_b = r.std_errors(3);
  out.report = make_report(model, r);
  if (out.a < 0.0) {
    out.a = -out.a;
    out.phi += units::pi;
  }
  out.phi = std::remainder(out.phi, units::two_pi);
  if (out.f < 0.0) {
    out.f = -out.f;
    out.phi = std::remainder(units::pi - out.phi, units::two_pi);
  }
  if (gam > 0.0) {
    out.tau = 1.0 / gam;
    out.se_tau = r.std_errors(4) / (gam * gam);
  } else {
    out.tau = std::numeric_limits<double>::infinity();
    out.se_tau = std::numeric_limits<double>::infinity();
  }
  if (!(out.a > 3.0 * out.se_a)) {
    throw FitError(model + ": amplitude not significant (a=" + std::to_string(out.a) +
                       ", se=" + std::to_string(out.se_a) + ")",
                   out.report);
  }
  return out;
}

// ---- triple Gaussian ----

TripleGaussianFit fit_triple_gaussian(std::span<const double> freq, std::span<const double> y) {
  const std::string model = "triple_gaussian";
  check_xy(freq, y, 12, model);
  const int n = static_cast<int>(freq.size());
  const auto [mn, mx] = std::minmax_element(freq.begin(), freq.end());
  const double x0 = 0.5 * (*mn + *mx);
  const double scale = (*mx - *mn) > 0.0 ? (*mx - *mn) : 1.0;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = (freq[i] - x0) / scale;

  // dips as peaks of the depth below the baseline
  std::vector<double> yv(y.begin(), y.end());
  const double b0 = quantile(yv, 0.9);
  std::vector<double> depth(n);
  for (int i = 0; i < n; ++i) {
    const double lo = y[std::max(i - 1, 0)], hi = y[std::min(i + 1, n - 1)];
    depth[i] = b0 - (lo + y[i] + hi) / 3.0;
  }
  const double dmax = *std::max_element(depth.begin(), depth.end());
  if (!(dmax > 0.0)) {
    throw FitError(model + ": no dips found", FitReport{model, "flat data", 0, 0, 0});
  }
  std::vector<int> cand;
  for (int i = 1; i + 1 < n; ++i) {
    if (depth[i] >= depth[i - 1] && depth[i] > depth[i + 1] && depth[i] > 0.05 * dmax) {
      cand.push_back(i);
    }
  }
  std::sort(cand.begin(), cand.end(), [&](int a, int b) { return depth[a] > depth[b]; });
  std::vector<int> picked;
  for (int c : cand) {
    bool ok = true;
    for (int p : picked) {
      // resolvable: the depth must recover between the two minima
      const int lo = std::min(c, p), hi = std::max(c, p);
      double valley = std::numeric_limits<double>::infinity();
      for (int k = lo; k <= hi; ++k) valley = std::min(valley, depth[k]);
      if (valley > 0.8 * std::min(depth[c], depth[p])) ok = false;
    }
    if (ok) picked.push_back(c);
    if (picked.size() == 3) break;
  }
  if (picked.size() < 3) {
    throw FitError(model + ": fewer than three resolvable dips",
                   FitReport{model, "found " + std::to_string(picked.size()) + " dips", 0, 0, 0});
  }
  std::sort(picked.begin(), picked.end());

  VectorXd p0(10);
  p0(0) = b0;
  for (int j = 0; j < 3; ++j) {
    const int c = picked[j];
    const double half = 0.5 * depth[c];
    int lo = c, hi = c;
    while (lo > 0 && depth[lo] > half) --lo;
    while (hi + 1 < n && depth[hi] > half) ++hi;
    double w = (xs[hi] - xs[lo]) / 2.3548;
    if (j > 0) w = std::min(w, 0.5 * (xs[c] - xs[picked[j - 1]]));
    if (j < 2) w = std::min(w, 0.5 * (xs[picked[j + 1]] - xs[c]));
    w = std::max(w, std::abs(xs[std::min(c + 1, n - 1)] - xs[c]));
    p0(1 + 3 * j) = -depth[c];
    p0(2 + 3 * j) = xs[c];
    p0(3 + 3 * j) = w;
  }

  ResidualFn fn = [&](const VectorXd& p, VectorXd& r, MatrixXd* J) {
    for (int i = 0; i < n; ++i) {
      double v = p(0);
      if (J) (*J)(i, 0) = 1.0;
      for (int j = 0; j < 3; ++j) {
        const double a = p(1 + 3 * j), c = p(2 + 3 * j), s = p(3 + 3 * j);
        const double d = xs[i] - c;
        const double G = std::exp(-0.5 * d * d / (s * s));
        v += a * G;
        if (J) {
          (*J)(i, 1 + 3 * j) = G;
          (*J)(i, 2 + 3 * j) = a * G * d / (s * s);
          (*J)(i, 3 + 3 * j) = a * G * d * d / (s * s * s);
        }
      }
      r(i) = v - y[i];
    }
  };
  const LmResult r = levenberg_marquardt(fn, p0, n);
  require_converged(model, r);

  TripleGaussianFit out;
  out.report = make_report(model, r);
  out.b = r.params(0);
  out.se_b = r.std_errors(0);
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](int u, int v) { return r.params(2 + 3 * u) < r.params(2 + 3 * v); });
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int j = order[k];
    out.a[k] = r.params(1 + 3 * j);
    out.c[k] = r.params(2 + 3 * j) * scale + x0;
    out.sigma[k] = std::abs(r.params(3 + 3 * j)) * scale;
    out.se_a[k] = r.std_errors(1 + 3 * j);
    out.se_c[k] = r.std_errors(2 + 3 * j) * scale;
    out.se_sigma[k] = r.std_errors(3 + 3 * j) * scale;
    out.populations[k] = std::abs(out.a[k] * out.sigma[k]);
    total += out.populations[k];
  }
  if (!(total > 0.0)) throw FitError(model + ": zero total dip area", out.report);
  for (double& p : out.populations) p /= total;
  return out;
}

std::array<double, 3> nuclear_populations(const TripleGaussianFit& fit,
                                          const SpinSystemParams& params) {
  // mw line position grows with m_I * A_par
  if (params.A_par < 0.0) return fit.populations;
  return {fit.populations[2], fit.populations[1], fit.populations[0]};
}

// ---- Bessel J0 ----

double field_from_bessel_frequency(double f, const SpinSystemParams& params) {
  return units::pi * units::pi * f / params.gamma_nv;
}

double bessel_frequency_from_field(double B_gauss, const SpinSystemParams& params) {
  return B_gauss * params.gamma_nv / (units::pi * units::pi);
}

double BesselFit::operator()(double x) const { return a * std::cyl_bessel_j(0.0, units::two_pi * f * x); }

BesselFit fit_bessel_j0(std::span<const double> x, std::span<const double> y,
                        const SpinSystemParams& params) {
  const std::string model = "bessel_j0";
  check_xy(x, y, 4, model);
  const int n = static_cast<int>(x.size());

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return x[a] < x[b]; });
  double ymax = 0.0;
  for (int i = 0; i < n; ++i) ymax = std::max(ymax, std::abs(y[i]));
  if (!(ymax > 0.0)) throw FitError(model + ": all-zero data", FitReport{model, "degenerate", 0, 0, 0});

  const double y0 = y[idx[0]];
  double x_zero = -1.0;
  for (int k = 1; k < n; ++k) {
    const double ya = y[idx[k - 1]], yb = y[idx[k]];
    if ((ya > 0.0) != (yb > 0.0) && ya != yb) {
      const double xa = x[idx[k - 1]], xb = x[idx[k]];
      x_zero = xa + (xb - xa) * ya / (ya - yb);
      break;
    }
  }
  if (!(x_zero > 0.0)) {
    throw FitError(model + ": data does not reach the first J0 zero",
                   FitReport{model, "no sign change", 0, 0, 0});
  }
  const double f0 = kJ0FirstZero / (units::two_pi * x_zero);
  const double j_first = std::cyl_bessel_j(0.0, units::two_pi * f0 * x[idx[0]]);
  const double a0 = std::abs(j_first) > 0.2 ? y0 / j_first : (y0 >= 0 ? ymax : -ymax);

  ResidualFn fn = [&](const VectorXd& p, VectorXd& r, MatrixXd* J) {
    const double a = p(0), f = p(1);
    for (int i = 0; i < n; ++i) {
      const double z = units::two_pi * f * x[i];
      const double j0 = std::cyl_bessel_j(0.0, z);
      r(i) = a * j0 - y[i];
      if (J) {
        (*J)(i, 0) = j0;
        (*J)(i, 1) = -a * std::cyl_bessel_j(1.0, z) * units::two_pi * x[i];
      }
    }
  };
  VectorXd p0(2);
  p0 << a0, f0;
  const LmResult r = levenberg_marquardt(fn, p0, n);
  require_converged(model, r);

  BesselFit out;
  out.a = r.params(0);
  out.f = std::abs(r.params(1));
  out.se_a = r.std_errors(0);
  out.se_f = r.std_errors(1);
  out.report = make_report(model, r);
  out.B_gauss = field_from_bessel_frequency(out.f, params);
  out.se_B_gauss = field_from_bessel_frequency(out.se_f, params);
  if (!(std::abs(out.a) > 3.0 * out.se_a)) {
    throw FitError(model + ": amplitude not significant", out.report);
  }
  return out;
}

// ---- sensitivity ----

double sensitivity(double peak_value, double noise_std, double B_test, double T_meas) {
  if (!(peak_value > 0.0)) throw std::invalid_argument("sensitivity: peak value must be > 0");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("sensitivity: noise std must be >= 0");
  if (!(T_meas >= 0.0)) throw std::invalid_argument("sensitivity: T_meas must be >= 0");
  return noise_std / peak_value * B_test * std::sqrt(T_meas);
}

double sensitivity(const SpectrumFit& fit, double noise_std, double B_test, double T_meas) {
  return sensitivity(fit.peak_value(), noise_std, B_test, T_meas);
}

// ---- json ----

nlohmann::json to_json(const FitReport& r) {
  return {{"model", r.model},
          {"status", r.reason},
          {"iterations", r.iterations},
          {"residual_std", r.residual_std},
          {"chi2_dof", r.chi2_dof}};
}

nlohmann::json to_json(const SpectrumFit& f) {
  return {{"center_Hz", f.c},     {"sigma_Hz", f.sigma},       {"fwhm_Hz", f.fwhm()},
          {"amplitude", f.a},     {"offset", f.b},             {"se_center_Hz", f.se_c},
          {"se_sigma_Hz", f.se_sigma}, {"se_amplitude", f.se_a}, {"se_offset", f.se_b},
          {"report", to_json(f.report)}};
}

nlohmann::json to_json(const TimeFit& f) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"amplitude", f.a},   {"frequency_Hz", f.f},   {"phase_rad", f.phi},
          {"offset", f.b},      {"tau_decay_s", num(f.tau)}, {"se_amplitude", f.se_a},
          {"se_frequency_Hz", f.se_f}, {"se_phase_rad", f.se_phi}, {"se_offset", f.se_b},
          {"se_tau_decay_s", num(f.se_tau)}, {"report", to_json(f.report)}};
}

nlohmann::json to_json(const TripleGaussianFit& f) {
  return {{"amplitudes", f.a}, {"centers_Hz", f.c},     {"sigmas_Hz", f.sigma},
          {"offset", f.b},     {"populations", f.populations}, {"report", to_json(f.report)}};
}

nlohmann::json to_json(const BesselFit& f) {
  return {{"amplitude", f.a},  {"frequency_Hz", f.f}, {"se_amplitude", f.se_a},
          {"se_frequency_Hz", f.se_f}, {"B_gauss", f.B_gauss}, {"se_B_gauss", f.se_B_gauss},
          {"report", to_json(f.report)}};
}

}  // namespace qmem::analysis
