#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "varxid/linalg.hpp"

namespace varxid {

// x(t+1) = A x(t) + B u(t) + w(t); coefficient matrix theta_star = [A, B]^T, rank rank_r
struct SystemModel {
  Matrix A;  // n x n
  Matrix B;  // n x m
  int rank_r = 0;
  double sigma_w = 0.0;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  Matrix theta_star() const;
};

enum class DistFamily { gaussian, uniform, rademacher };

// zero-mean scalar family applied coordinatewise; scale is the sub-Gaussian parameter
// (gaussian: std dev, uniform: half-width a, rademacher: magnitude)
struct DistSpec {
  DistFamily family = DistFamily::gaussian;
  double scale = 1.0;
  int dim = 0;

  double subgaussian_sigma() const { return scale; }
  double variance() const;
};

struct Trajectory {
  std::vector<Vector> states;  // x(0..T0), x(0) = 0
  std::vector<Vector> inputs;  // u(0..T0-1)
  std::vector<Vector> noises;  // w(0..T0-1), zeros when noiseless
};

// repeated-sampling regression: row i of Z is [x_i(T0-1); u_i(T0-1)], row i of X is x_i(T0),
// row i of W is w_i(T0-1); X = Z theta_star + W exactly
struct RegressionData {
  Matrix X;                      // N x n
  Matrix Z;                      // N x (n+m)
  std::optional<Matrix> W;       // N x n
  std::optional<Matrix> Sigma;   // (n+m) x (n+m) population covariance of a Z row

  int num_samples() const { return static_cast<int>(Z.rows()); }
};

struct SingularSpec {
  enum class Kind { equal, geometric };
  Kind kind = Kind::equal;
  double ratio = 0.5;  // geometric only; sigma_k = ratio^k, k = 0..r-1
};

// random rank-r system in its identifiable parameterization (rowspace(A) inside col([A,B]),
// so the transition matrix acts only on the input-reachable subspace); singular values of
// theta_star follow `spec`, A rescaled if its spectral radius exceeds the cap
SystemModel generate_system(int n, int m, int r, double spectral_radius_cap,
                            const SingularSpec& spec, std::uint64_t seed);

Trajectory simulate_trajectory(const SystemModel& model, int T0, const DistSpec& input,
                               const std::optional<DistSpec>& noise, std::uint64_t seed);

// N independent trajectories; trajectory i uses sub-stream derive_seed(seed, i)
RegressionData collect_repeated(const SystemModel& model, int N, int T0, const DistSpec& input,
                                const std::optional<DistSpec>& noise, std::uint64_t seed);

// within-trajectory stacking: rows t of Z are [x(t); u(t)], rows of X are x(t+1)
RegressionData stack_trajectory(const Trajectory& traj);

// VARX(d) lift x(t+1) = sum_k A_k x(t-k) + B u(t): top block row [A_0 ... A_{d-1}], input [B;0;...].
// companion_form zeroes everything below the top row (the literal display);
// companion_form_shifted puts identities on the sub-diagonal so past states propagate
SystemModel companion_form(const std::vector<Matrix>& A_list, const Matrix& B);
SystemModel companion_form_shifted(const std::vector<Matrix>& A_list, const Matrix& B);

// sub-Gaussian parameter of a Z row:
// sigma_z^2 = sum_{k=0}^{T0-2} (||A^{T0-2-k} B||_op^2 sigma_u^2 + ||A^{T0-2-k}||_op^2 sigma_w^2) + sigma_u^2
double subgaussian_param(const SystemModel& model, int T0, double sigma_u, double sigma_w);

// exact covariance of a Z row: blockdiag(Sigma_x, var_u I_m) with
// Sigma_x = sum_{k=0}^{T0-2} A^k (var_u B B^T + var_w I) (A^k)^T
Matrix population_covariance(const SystemModel& model, int T0, const DistSpec& input,
                             const std::optional<DistSpec>& noise);

}  // namespace varxid
