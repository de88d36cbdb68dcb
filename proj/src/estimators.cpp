#include "varxid/estimators.hpp"

#include <Eigen/QR>
#include <cmath>

namespace varxid {

static void check_data(const RegressionData& data, const char* who) {
  if (data.Z.rows() < 1 || data.Z.cols() < 1)
    throw std::invalid_argument(std::string(who) + ": empty Z");
  if (data.X.rows() != data.Z.rows())
    throw std::invalid_argument(std::string(who) + ": X and Z row counts differ");
  if (!data.Z.allFinite() || !data.X.allFinite())
    throw std::invalid_argument(std::string(who) + ": non-finite data");
}

Estimate least_squares(const RegressionData& data, LsMode) {
  check_data(data, "least_squares");
  const double N = static_cast<double>(data.num_samples());
  const auto p = data.Z.cols();

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(data.Z);
  cod.setThreshold(1e-12);
  Estimate est;
  est.theta_hat = cod.solve(data.X);  // minimum-Frobenius-norm least-squares solution
  est.unique_solution = (cod.rank() == p);
  est.converged = true;
  est.iters = 0;
  est.lambda_used = 0.0;
  Matrix resid = data.Z * est.theta_hat - data.X;
  est.objective = resid.squaredNorm() / N;
  // lambda-free residual: normalized gradient norm of the quadratic loss
  est.kkt_residual = (data.Z.transpose() * resid / N).norm() /
                     std::sqrt(static_cast<double>(p * data.X.cols()));
  return est;
}

double lambda_rule(int n, int m, int N, double alpha) {
  if (n < 1 || m < 1 || N < 1 || alpha <= 0.0)
    throw std::invalid_argument("lambda_rule: all arguments must be positive");
  return 4.0 * alpha * std::sqrt(static_cast<double>(n + m) / N);
}

double alpha_param(double sigma_w, double beta, double gamma_max) {
  if (sigma_w < 0.0 || beta < 0.0 || gamma_max < 0.0)
    throw std::invalid_argument("alpha_param: arguments must be >= 0");
  const double c = 32.0 * std::sqrt(6.0) + 1.0;
  return std::sqrt(2.0 * sigma_w * sigma_w * (c * beta * beta + gamma_max));
}

double kkt_check(const Matrix& theta_hat, const RegressionData& data, double lambda) {
  check_data(data, "kkt_check");
  if (lambda <= 0.0) throw std::invalid_argument("kkt_check: lambda must be > 0");
  if (theta_hat.rows() != data.Z.cols() || theta_hat.cols() != data.X.cols())
    throw std::invalid_argument("kkt_check: theta_hat shape mismatch");
  const double N = static_cast<double>(data.num_samples());
  Matrix grad = data.Z.transpose() * (data.Z * theta_hat - data.X) / N;

  SvdFactors f = svd(theta_hat);
  const double pos_tol = 1e-10 * std::max(f.singulars(0), 1e-300);
  int pos = 0;
  for (int i = 0; i < f.singulars.size(); ++i)
    if (f.singulars(i) > pos_tol) ++pos;

  Matrix G = Matrix::Zero(theta_hat.rows(), theta_hat.cols());
  if (pos > 0) {
    G = f.left.leftCols(pos) * f.right.leftCols(pos).transpose();
  }
  // free part: project -grad/lambda onto the null frame, clip singular values at 1
  Matrix P = -grad / lambda;
  if (pos > 0) {
    P -= f.left.leftCols(pos) * (f.left.leftCols(pos).transpose() * P);
    P -= (P * f.right.leftCols(pos)) * f.right.leftCols(pos).transpose();
  }
  if (P.norm() > 0.0) {
    SvdFactors pf = svd(P);
    Vector clipped = pf.singulars.cwiseMin(1.0);
    G += pf.left * clipped.asDiagonal() * pf.right.transpose();
  }
  const double denom =
      lambda * std::sqrt(static_cast<double>(theta_hat.rows() * theta_hat.cols()));
  return (grad + lambda * G).norm() / denom;
}

static double reg_objective(const RegressionData& data, const Matrix& theta, double lambda) {
  const double N = static_cast<double>(data.num_samples());
  return 0.5 / N * (data.X - data.Z * theta).squaredNorm() + lambda * nuclear_norm(theta);
}

Estimate nuclear_reg_solve(const RegressionData& data, double lambda, const SolverConfig& cfg) {
  check_data(data, "nuclear_reg_solve");
  if (lambda < 0.0) throw std::invalid_argument("nuclear_reg_solve: lambda must be >= 0");
  const double N = static_cast<double>(data.num_samples());
  const auto p = data.Z.cols();
  const auto q = data.X.cols();

  Estimate est;
  est.lambda_used = lambda;

  const double z_top = operator_norm(data.Z);
  const double L = z_top * z_top / N;
  if (L == 0.0) {  // Z = 0: loss constant, penalty alone -> zero
    est.theta_hat = Matrix::Zero(p, q);
    est.converged = true;
    est.kkt_residual = 0.0;
    est.objective = reg_objective(data, est.theta_hat, lambda);
    return est;
  }
  const double step = 1.0 / L;

  Matrix theta = Matrix::Zero(p, q);
  Matrix y = theta;
  double t = 1.0;
  double obj_prev = reg_objective(data, theta, lambda);
  if (cfg.trace_objective) est.objective_trace.push_back(obj_prev);

  for (int k = 1; k <= cfg.max_iters; ++k) {
    Matrix grad = data.Z.transpose() * (data.Z * y - data.X) / N;
    Matrix theta_new = svt(y - step * grad, step * lambda);
    const double obj_new = reg_objective(data, theta_new, lambda);

    if (cfg.acceleration) {
      if (obj_new > obj_prev) {  // adaptive restart: drop momentum
        t = 1.0;
        y = theta_new;
      } else {
        const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = theta_new + ((t - 1.0) / t_new) * (theta_new - theta);
        t = t_new;
      }
    } else {
      y = theta_new;
    }

    const double rel = (theta_new - theta).norm() / std::max(1.0, theta_new.norm());
    theta = theta_new;
    obj_prev = obj_new;
    est.iters = k;
    if (cfg.trace_objective) est.objective_trace.push_back(obj_new);

    if (rel < cfg.rel_tol) {
      if (lambda == 0.0) { est.converged = true; break; }
      est.kkt_residual = kkt_check(theta, data, lambda);
      if (est.kkt_residual <= cfg.kkt_tol) { est.converged = true; break; }
    }
  }
  est.theta_hat = theta;
  if (lambda == 0.0)
    est.kkt_residual = (data.Z.transpose() * (data.Z * theta - data.X) / N).norm() /
                       std::sqrt(static_cast<double>(p * q));
  else if (!est.converged)
    est.kkt_residual = kkt_check(theta, data, lambda);
  est.objective = reg_objective(data, theta, lambda);
  return est;
}

Estimate nuclear_min_exact(const RegressionData& data, const SolverConfig& cfg) {
  check_data(data, "nuclear_min_exact");
  const auto p = data.Z.cols();
  const auto q = data.X.cols();

  // rank-revealing factorization of Z, cached for every affine projection
  SvdFactors zf = svd(data.Z);
  const double rank_tol = 1e-10 * std::max(zf.singulars(0), 1e-300);
  int rank_z = 0;
  for (int i = 0; i < zf.singulars.size(); ++i)
    if (zf.singulars(i) > rank_tol) ++rank_z;

  if (rank_z == 0) {
    if (data.X.norm() > 0.0)
      throw numerical_error("nuclear_min_exact: Z = 0 but X != 0, constraint set empty");
    Estimate est;
    est.theta_hat = Matrix::Zero(p, q);
    est.converged = true;
    return est;
  }

  Matrix Uz = zf.left.leftCols(rank_z);
  Matrix Vz = zf.right.leftCols(rank_z);
  Vector sz = zf.singulars.head(rank_z);

  // consistency: X must lie in the column space of Z
  const double infeas = (data.X - Uz * (Uz.transpose() * data.X)).norm();
  if (infeas > 1e-8 * std::max(1.0, data.X.norm()))
    throw numerical_error("nuclear_min_exact: inconsistent constraints, residual floor " +
                          std::to_string(infeas));

  auto project_feasible = [&](const Matrix& P) -> Matrix {
    Matrix R = data.Z * P - data.X;                     // N x q
    Matrix coef = ((Uz.transpose() * R).array().colwise() / sz.array()).matrix();
    return P - Vz * coef;
  };

  Estimate est;
  Matrix zvar = project_feasible(Matrix::Zero(p, q));   // min-Frobenius feasible start

  if (rank_z == p) {  // constraint set is a single point
    est.theta_hat = zvar;
    est.converged = true;
    est.iters = 0;
    est.objective = nuclear_norm(zvar);
    est.kkt_residual = (data.Z * zvar - data.X).norm() / std::max(1.0, data.X.norm());
    return est;
  }

  const double rho = cfg.admm_rho;
  if (rho <= 0.0) throw std::invalid_argument("nuclear_min_exact: admm_rho must be > 0");
  Matrix u = Matrix::Zero(p, q);
  Matrix x(p, q);
  double primal_rel = 0.0;
  for (int k = 1; k <= cfg.max_iters; ++k) {
    x = svt(zvar - u, 1.0 / rho);
    Matrix z_new = project_feasible(x + u);
    u += x - z_new;
    const double dz = (z_new - zvar).norm();
    zvar = z_new;
    est.iters = k;
    primal_rel = (x - zvar).norm() / std::max(1.0, zvar.norm());
    const double rel_change = dz / std::max(1.0, zvar.norm());
    if (primal_rel <= cfg.kkt_tol && rel_change < cfg.rel_tol) {
      est.converged = true;
      break;
    }
  }
  est.theta_hat = zvar;  // feasible iterate
  const double constraint_rel = (data.Z * zvar - data.X).norm() / std::max(1.0, data.X.norm());
  est.kkt_residual = std::max(constraint_rel, primal_rel);
  est.objective = nuclear_norm(zvar);
  return est;
}

}  // namespace varxid
