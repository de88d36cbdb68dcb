#pragma once

#include <vector>

#include "varxid/simulate.hpp"

namespace varxid {

struct SolverConfig {
  int max_iters = 5000;
  double rel_tol = 1e-10;
  double kkt_tol = 1e-8;
  double admm_rho = 1.0;
  bool acceleration = true;
  bool trace_objective = false;  // record per-iteration objective (diagnostics)
};

struct Estimate {
  Matrix theta_hat;
  double lambda_used = 0.0;
  int iters = 0;
  bool converged = false;
  double kkt_residual = 0.0;
  double objective = 0.0;
  bool unique_solution = true;  // least squares: false when Z^T Z is singular
  std::vector<double> objective_trace;
};

// which stacking produced the data; the closed form on the assembled (Z, X) is identical
enum class LsMode { pooled_final_state, stacked_trajectory };

// minimizes (1/N) ||X - Z Theta||_F^2; pseudoinverse (minimum-Frobenius) solution with
// unique_solution = false when Z^T Z is singular
Estimate least_squares(const RegressionData& data, LsMode mode = LsMode::pooled_final_state);

// proximal gradient (optional momentum with adaptive restart) on
// (1/2N) ||X - Z Theta||_F^2 + lambda ||Theta||_nuc, step 1/L, L = ||Z^T Z / N||_op
Estimate nuclear_reg_solve(const RegressionData& data, double lambda,
                           const SolverConfig& cfg = {});

// min ||Theta||_nuc s.t. Z Theta = X, via alternating SVT / affine projection with dual
// splitting; throws numerical_error when the constraint set is empty
Estimate nuclear_min_exact(const RegressionData& data, const SolverConfig& cfg = {});

// lambda_N = 4 alpha sqrt((n+m)/N)
double lambda_rule(int n, int m, int N, double alpha);

// alpha^2 = 2 sigma_w^2 ((32 sqrt(6) + 1) beta^2 + gamma_max)
double alpha_param(double sigma_w, double beta, double gamma_max);

// normalized first-order optimality residual ||grad + lambda G||_F / (lambda sqrt(n (n+m)))
// with G the nearest nuclear-norm subgradient at theta_hat
double kkt_check(const Matrix& theta_hat, const RegressionData& data, double lambda);

}  // namespace varxid
