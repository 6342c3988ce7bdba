#include "qmem/analysis/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace qmem::analysis {

using Eigen::MatrixXd;
using Eigen::VectorXd;

LmResult levenberg_marquardt(const ResidualFn& f, VectorXd p, int n, const LmOptions& opt) {
  const int np = static_cast<int>(p.size());
  LmResult res;
  VectorXd r(n);
  MatrixXd J(n, np);
  f(p, r, &J);
  double cost = 0.5 * r.squaredNorm();
  if (!std::isfinite(cost)) {
    res.params = p;
    res.reason = "non-finite residuals at the initial guess";
    return res;
  }

  double lambda = opt.lambda0;
  VectorXd r_new(n);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (cost <= opt.abs_cost_tol) {
      res.converged = true;
      res.reason = "cost below absolute tolerance";
      break;
    }
    const MatrixXd A = J.transpose() * J;
    const VectorXd g = J.transpose() * r;
    VectorXd d = A.diagonal().cwiseMax(1e-300);

    bool accepted = false;
    bool small_step = false;
    double new_cost = cost;
    VectorXd p_new;
    for (int tries = 0; tries < 60; ++tries) {
      MatrixXd Ad = A;
      Ad.diagonal() += lambda * d;
      const VectorXd step = Ad.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      if (step.norm() <= opt.step_tol * (p.norm() + opt.step_tol)) {
        small_step = true;
        break;
      }
      p_new = p + step;
      f(p_new, r_new, nullptr);
      new_cost = 0.5 * r_new.squaredNorm();
      if (std::isfinite(new_cost) && new_cost < cost) {
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (small_step) {
      res.converged = true;
      res.reason = "step below tolerance";
      break;
    }
    if (!accepted) {
      // no descent direction left at any damping: treat as a stationary point
      res.converged = true;
      res.reason = "no further decrease";
      break;
    }
    const double rel = (cost - new_cost) / std::max(cost, 1e-300);
    p = p_new;
    f(p, r, &J);
    cost = 0.5 * r.squaredNorm();
    lambda = std::max(lambda / 10.0, 1e-12);
    if (rel < opt.rel_cost_tol) {
      res.converged = true;
      res.reason = "relative cost change below tolerance";
      ++it;
      break;
    }
  }
  if (!res.converged) res.reason = "iteration limit reached";

  res.params = p;
  res.cost = cost;
  res.iterations = it;
  const int dof = std::max(n - np, 1);
  const double s2 = 2.0 * cost / dof;
  res.chi2_dof = s2;
  res.residual_std = std::sqrt(2.0 * cost / n);
  const MatrixXd A = J.transpose() * J;
  Eigen::FullPivLU<MatrixXd> lu(A);
  if (lu.isInvertible()) {
    res.covariance = s2 * lu.inverse();
  } else {
    res.covariance = MatrixXd::Constant(np, np, std::numeric_limits<double>::infinity());
  }
  res.std_errors = res.covariance.diagonal().cwiseAbs().cwiseSqrt();
  return res;
}

MatrixXd numeric_jacobian(const ResidualFn& f, const VectorXd& p, int n, double rel_step) {
  const int np = static_cast<int>(p.size());
  MatrixXd J(n, np);
  VectorXd rp(n), rm(n);
  for (int j = 0; j < np; ++j) {
    const double h = rel_step * std::max(std::abs(p(j)), 1.0);
    VectorXd q = p;
    q(j) = p(j) + h;
    f(q, rp, nullptr);
    q(j) = p(j) - h;
    f(q, rm, nullptr);
    J.col(j) = (rp - rm) / (2.0 * h);
  }
  return J;
}

}  // namespace qmem::analysis
