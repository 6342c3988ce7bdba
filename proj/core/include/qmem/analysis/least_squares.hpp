#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

namespace qmem::analysis {

// r(p) = model(p) - data. J, when non-null, is filled with dr/dp
// (already sized n_residuals x n_params).
using ResidualFn = std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r,
                                      Eigen::MatrixXd* J)>;

struct LmOptions {
  int max_iterations = 500;
  double rel_cost_tol = 1e-10;
  double abs_cost_tol = 1e-300;
  double step_tol = 1e-14;
  double lambda0 = 1e-3;
};

struct LmResult {
  Eigen::VectorXd params;
  Eigen::VectorXd std_errors;
  Eigen::MatrixXd covariance;
  double cost = 0.0;  // 0.5 * sum r^2
  double residual_std = 0.0;
  double chi2_dof = 0.0;  // sum r^2 / (n - p)
  int iterations = 0;
  bool converged = false;
  std::string reason;
};

// Levenberg-Marquardt with Marquardt diagonal scaling. Standard errors are
// s^2 (J^T J)^-1 with s^2 = sum r^2 / (n - p).
LmResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd p0, int n_residuals,
                             const LmOptions& opt = {});

// Central differences, step h_j = rel_step * max(|p_j|, 1).
Eigen::MatrixXd numeric_jacobian(const ResidualFn& f, const Eigen::VectorXd& p, int n_residuals,
                                 double rel_step = 1e-6);

}  // namespace qmem::analysis
