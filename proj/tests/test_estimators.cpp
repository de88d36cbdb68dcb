#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "varxid/estimators.hpp"
#include "varxid/rng.hpp"
#include "varxid/simulate.hpp"

using namespace varxid;

namespace {

RegressionData make_data(const Matrix& Z, const Matrix& X) {
  RegressionData data;
  data.Z = Z;
  data.X = X;
  return data;
}

RegressionData synthetic_regression(Rng& rng, int N, int p, int q, Matrix* theta_out) {
  Matrix Z = testutil::gaussian(rng, N, p);
  Matrix theta = testutil::gaussian(rng, p, q);
  if (theta_out) *theta_out = theta;
  return make_data(Z, Z * theta);
}

double reg_objective(const RegressionData& data, const Matrix& theta, double lambda) {
  const double N = data.num_samples();
  return 0.5 / N * (data.X - data.Z * theta).squaredNorm() + lambda * nuclear_norm(theta);
}

Matrix truncate_rank(const Matrix& M, int r) {
  SvdFactors f = svd(M);
  return f.left.leftCols(r) * f.singulars.head(r).asDiagonal() * f.right.leftCols(r).transpose();
}

// independent reference for the constrained nuclear minimizer: alternate between the
// rank-r manifold and the affine constraint set
Matrix alternating_projection_oracle(const RegressionData& data, int r, int iters) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(data.Z);
  cod.setThreshold(1e-12);
  auto to_feasible = [&](const Matrix& P) -> Matrix {
    return P - cod.solve(data.Z * P - data.X);
  };
  Matrix T = to_feasible(Matrix::Zero(data.Z.cols(), data.X.cols()));
  for (int k = 0; k < iters; ++k) T = to_feasible(truncate_rank(T, r));
  return T;
}

}  // namespace

TEST_CASE("least squares solves the normal equations on full-rank data") {
  Rng rng(17);
  Matrix theta;
  RegressionData data = synthetic_regression(rng, 40, 5, 3, &theta);
  data.X += 0.01 * testutil::gaussian(rng, 40, 3);

  Estimate est = least_squares(data);
  Matrix gram = data.Z.transpose() * data.Z;
  Matrix normal = gram.ldlt().solve(data.Z.transpose() * data.X);
  CHECK((est.theta_hat - normal).norm() <= 1e-10 * (1.0 + normal.norm()));
  CHECK(est.unique_solution);
  CHECK(est.converged);
  CHECK(est.iters == 0);
  const double resid = (data.Z * est.theta_hat - data.X).squaredNorm() / 40.0;
  CHECK(est.objective == doctest::Approx(resid).epsilon(1e-12));

  RegressionData clean = synthetic_regression(rng, 30, 6, 4, &theta);
  Estimate exact = least_squares(clean);
  CHECK((exact.theta_hat - theta).norm() <= 1e-10 * (1.0 + theta.norm()));

  RegressionData eye = make_data(Matrix::Identity(4, 4), testutil::gaussian(rng, 4, 2));
  Estimate id = least_squares(eye);
  CHECK((id.theta_hat - eye.X).norm() <= 1e-12 * (1.0 + eye.X.norm()));

  Estimate pooled = least_squares(data, LsMode::pooled_final_state);
  Estimate stacked = least_squares(data, LsMode::stacked_trajectory);
  CHECK((pooled.theta_hat - stacked.theta_hat).norm() == 0.0);
}

TEST_CASE("least squares falls back to the pseudoinverse on degenerate designs") {
  Rng rng(23);
  Matrix Z(12, 3);
  Z.col(0) = testutil::gaussian(rng, 12, 1);
  Z.col(1) = testutil::gaussian(rng, 12, 1);
  Z.col(2) = Z.col(0) + Z.col(1);
  Matrix X = testutil::gaussian(rng, 12, 2);
  Estimate est = least_squares(make_data(Z, X));
  CHECK_FALSE(est.unique_solution);

  Eigen::JacobiSVD<Matrix> jsvd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  jsvd.setThreshold(1e-10);
  Matrix pinv_sol = jsvd.solve(X);
  CHECK((est.theta_hat - pinv_sol).norm() <= 1e-8 * (1.0 + pinv_sol.norm()));

  Matrix wide = testutil::gaussian(rng, 2, 5);
  Matrix wx = testutil::gaussian(rng, 2, 2);
  Estimate under = least_squares(make_data(wide, wx));
  CHECK_FALSE(under.unique_solution);
  CHECK((wide * under.theta_hat - wx).norm() <= 1e-10 * (1.0 + wx.norm()));
}

TEST_CASE("penalty weight rule and noise amplitude match their closed forms") {
  CHECK(lambda_rule(4, 2, 100, 2.5) == doctest::Approx(2.449489742783178).epsilon(1e-15));
  CHECK(lambda_rule(4, 2, 400, 2.5) ==
        doctest::Approx(0.5 * lambda_rule(4, 2, 100, 2.5)).epsilon(1e-15));

  CHECK(alpha_param(0.1, 2.0, 3.0) == doctest::Approx(2.531934782241623).epsilon(1e-13));
  const double a111 = alpha_param(1.0, 1.0, 1.0);
  CHECK(a111 * a111 == doctest::Approx(160.76734353812338).epsilon(1e-13));
  CHECK(alpha_param(2.0, 0.0, 3.0) == doctest::Approx(2.0 * std::sqrt(6.0)).epsilon(1e-13));
  // scale equivariance in the noise level
  CHECK(alpha_param(0.3, 1.7, 2.2) ==
        doctest::Approx(3.0 * alpha_param(0.1, 1.7, 2.2)).epsilon(1e-13));

  CHECK_THROWS_AS(lambda_rule(0, 2, 100, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lambda_rule(4, 2, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lambda_rule(4, 2, 100, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_param(-0.1, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_param(0.1, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("stationarity residual is zero only at the true minimizer in 1-d") {
  // scalar problem: Z = ones, X = 2*ones, lambda = 0.5 -> minimizer theta = 1.5
  RegressionData data = make_data(Matrix::Ones(4, 1), 2.0 * Matrix::Ones(4, 1));
  auto kkt_at = [&](double v) {
    Matrix theta(1, 1);
    theta(0, 0) = v;
    return kkt_check(theta, data, 0.5);
  };
  CHECK(kkt_at(1.5) <= 1e-12);
  CHECK(kkt_at(2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kkt_at(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kkt_at(0.0) == doctest::Approx(3.0).epsilon(1e-12));

  CHECK_THROWS_AS(kkt_check(Matrix::Zero(1, 1), data, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(kkt_check(Matrix::Zero(2, 2), data, 0.5), std::invalid_argument);
}

TEST_CASE("penalized solver returns the exact zero matrix once the penalty dominates") {
  Rng rng(37);
  RegressionData data = synthetic_regression(rng, 30, 5, 4, nullptr);
  const double lambda_star = operator_norm(data.Z.transpose() * data.X / 30.0);

  Estimate zeroed = nuclear_reg_solve(data, 1.01 * lambda_star);
  CHECK(zeroed.converged);
  CHECK(zeroed.theta_hat.norm() == 0.0);

  Estimate alive = nuclear_reg_solve(data, 0.5 * lambda_star);
  CHECK(alive.converged);
  CHECK(alive.theta_hat.norm() > 0.0);
}

TEST_CASE("plain proximal iteration never increases the objective") {
  Rng rng(41);
  Matrix theta;
  RegressionData data = synthetic_regression(rng, 25, 6, 4, &theta);
  data.X += 0.05 * testutil::gaussian(rng, 25, 4);

  SolverConfig cfg;
  cfg.acceleration = false;
  cfg.trace_objective = true;
  cfg.max_iters = 300;
  cfg.rel_tol = 0.0;  // run the full budget so the trace is long
  Estimate est = nuclear_reg_solve(data, 0.05, cfg);

  REQUIRE(est.objective_trace.size() >= 2);
  CHECK(est.objective_trace.front() ==
        doctest::Approx(reg_objective(data, Matrix::Zero(6, 4), 0.05)).epsilon(1e-12));
  for (std::size_t k = 0; k + 1 < est.objective_trace.size(); ++k)
    CHECK(est.objective_trace[k + 1] <= est.objective_trace[k] * (1.0 + 1e-12) + 1e-15);
  CHECK(est.objective_trace.back() == doctest::Approx(est.objective).epsilon(1e-12));
}

TEST_CASE("vanishing penalty reproduces least squares on well-conditioned data") {
  Rng rng(53);
  Matrix theta;
  RegressionData data = synthetic_regression(rng, 50, 4, 3, &theta);
  data.X += 0.02 * testutil::gaussian(rng, 50, 3);

  const double lambda = 1e-4;
  Estimate ls = least_squares(data);
  Estimate reg = nuclear_reg_solve(data, lambda);
  REQUIRE(reg.converged);
  SvdFactors f = svd(Matrix(data.Z.transpose() * data.Z / 50.0));
  const double curv = f.singulars(f.singulars.size() - 1);
  CHECK((reg.theta_hat - ls.theta_hat).norm() <= 10.0 * lambda / curv);
}

TEST_CASE("converged penalized estimates satisfy their reported optimality") {
  Rng rng(61);
  RegressionData data = synthetic_regression(rng, 40, 6, 5, nullptr);
  data.X += 0.1 * testutil::gaussian(rng, 40, 5);
  const double lambda = 0.3 * operator_norm(data.Z.transpose() * data.X / 40.0);

  Estimate est = nuclear_reg_solve(data, lambda);
  REQUIRE(est.converged);
  SolverConfig cfg;
  CHECK(est.kkt_residual <= cfg.kkt_tol);
  CHECK(std::abs(kkt_check(est.theta_hat, data, lambda) - est.kkt_residual) <= 1e-12);
  CHECK(est.objective ==
        doctest::Approx(reg_objective(data, est.theta_hat, lambda)).epsilon(1e-12));
  CHECK(est.lambda_used == lambda);
  CHECK(est.iters >= 1);
}

TEST_CASE("constrained minimizer handles point, empty, and trivial feasible sets") {
  Rng rng(71);
  Matrix Z = testutil::gaussian(rng, 5, 5);
  Matrix X = testutil::gaussian(rng, 5, 3);
  Estimate point = nuclear_min_exact(make_data(Z, X));
  CHECK(point.converged);
  CHECK(point.iters == 0);
  Matrix direct = Eigen::PartialPivLU<Matrix>(Z).solve(X);
  CHECK((point.theta_hat - direct).norm() <= 1e-10 * (1.0 + direct.norm()));
  CHECK(point.objective == doctest::Approx(nuclear_norm(direct)).epsilon(1e-10));

  Matrix wide = testutil::gaussian(rng, 3, 6);
  Estimate zero = nuclear_min_exact(make_data(wide, Matrix::Zero(3, 2)));
  CHECK(zero.converged);
  CHECK(zero.theta_hat.norm() == 0.0);

  Matrix bad_z(2, 2);
  bad_z << 1, 0, 1, 0;
  Matrix bad_x(2, 1);
  bad_x << 1, -1;
  CHECK_THROWS_AS(nuclear_min_exact(make_data(bad_z, bad_x)), numerical_error);

  Estimate all_zero = nuclear_min_exact(make_data(Matrix::Zero(3, 4), Matrix::Zero(3, 2)));
  CHECK(all_zero.converged);
  CHECK(all_zero.theta_hat.norm() == 0.0);
  CHECK_THROWS_AS(nuclear_min_exact(make_data(Matrix::Zero(3, 4), Matrix::Ones(3, 2))),
                  numerical_error);
}

TEST_CASE("constrained minimizer recovers a planted low-rank system exactly") {
  SystemModel model = generate_system(10, 10, 1, 0.9, SingularSpec{}, 2718);
  DistSpec input{DistFamily::gaussian, 1.0, 10};
  RegressionData data = collect_repeated(model, 100, 2, input, std::nullopt, 3141);
  Matrix theta_star = model.theta_star();

  Estimate est = nuclear_min_exact(data);
  REQUIRE(est.converged);
  CHECK((est.theta_hat - theta_star).norm() <= 1e-6 * theta_star.norm());

  Matrix oracle = alternating_projection_oracle(data, model.rank_r, 500);
  CHECK((est.theta_hat - oracle).norm() <= 1e-6 * (1.0 + theta_star.norm()));
}

TEST_CASE("estimator entry points reject malformed requests") {
  Rng rng(83);
  RegressionData data = synthetic_regression(rng, 10, 3, 2, nullptr);

  RegressionData mismatched = data;
  mismatched.X = testutil::gaussian(rng, 9, 2);
  CHECK_THROWS_AS(least_squares(mismatched), std::invalid_argument);
  CHECK_THROWS_AS(nuclear_reg_solve(mismatched, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(nuclear_min_exact(mismatched), std::invalid_argument);

  RegressionData infected = data;
  infected.Z(0, 0) = std::nan("");
  CHECK_THROWS_AS(least_squares(infected), std::invalid_argument);

  CHECK_THROWS_AS(nuclear_reg_solve(data, -0.1), std::invalid_argument);

  SolverConfig bad_rho;
  bad_rho.admm_rho = 0.0;
  Matrix wide = testutil::gaussian(rng, 3, 6);
  Matrix theta6 = testutil::gaussian(rng, 6, 2);
  CHECK_THROWS_AS(nuclear_min_exact(make_data(wide, wide * theta6), bad_rho),
                  std::invalid_argument);
}
