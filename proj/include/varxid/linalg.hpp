#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace varxid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// hard numerical failures (SVD non-convergence, infeasible constraint set, ...)
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// thin SVD: left (d1 x d), singulars (d, non-increasing, >= 0), right (d2 x d)
struct SvdFactors {
  Matrix left;
  Vector singulars;
  Matrix right;

  Matrix reconstruct() const { return left * singulars.asDiagonal() * right.transpose(); }
};

SvdFactors svd(const Matrix& M);

enum class NormKind { nuclear, operator_norm, frobenius };

double nuclear_norm(const Matrix& M);
double operator_norm(const Matrix& M);
double frobenius_norm(const Matrix& M);
double matrix_norm(const Matrix& M, NormKind kind);

// singular value thresholding: U diag(max(s_i - tau, 0)) V^T, the nuclear-norm prox
Matrix svt(const Matrix& M, double tau);

// rank-r frame of a reference matrix; numerical rank must equal r (tol 1e-8 * s_1)
struct SubspaceFrame {
  Matrix col_basis;  // d1 x r, orthonormal
  Matrix row_basis;  // d2 x r, orthonormal
  int rank = 0;
};

SubspaceFrame subspace_frame(const Matrix& theta_star, int r);

// model subspace M = {U U^T D V V^T}, its hull's complement M_bar_perp = (I-UU^T) D (I-VV^T),
// and the hull M_bar = complement of M_bar_perp
enum class Subspace { model, model_bar, model_bar_perp };

Matrix project(const SubspaceFrame& frame, const Matrix& delta, Subspace target);

// split at spectral threshold tau: s_size = #{sigma_j > tau}, tail keeps sigma <= tau;
// radius = sum_j sigma_j^q (q = 0 counts nonzero singulars), the smallest ball containing theta
struct LqSplit {
  int s_size = 0;
  Matrix tail;
  double tail_nuclear = 0.0;
  double radius = 0.0;
};

LqSplit lq_threshold_split(const Matrix& theta, double q, double tau);

double lq_radius(const Matrix& theta, double q);

}  // namespace varxid
