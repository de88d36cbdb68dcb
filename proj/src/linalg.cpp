#include "varxid/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace varxid {

static void require_finite(const Matrix& M, const char* who) {
  if (!M.allFinite())
    throw std::invalid_argument(std::string(who) + ": matrix has non-finite entries");
}

SvdFactors svd(const Matrix& M) {
  require_finite(M, "svd");
  if (M.rows() == 0 || M.cols() == 0) throw std::invalid_argument("svd: empty matrix");
  Eigen::BDCSVD<Matrix> dec(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success)
    throw numerical_error("svd: decomposition failed on " + std::to_string(M.rows()) + "x" +
                          std::to_string(M.cols()) + " matrix");
  return SvdFactors{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

double nuclear_norm(const Matrix& M) { return svd(M).singulars.sum(); }

double operator_norm(const Matrix& M) {
  require_finite(M, "operator_norm");
  return svd(M).singulars(0);
}

double frobenius_norm(const Matrix& M) {
  require_finite(M, "frobenius_norm");
  return M.norm();
}

double matrix_norm(const Matrix& M, NormKind kind) {
  switch (kind) {
    case NormKind::nuclear: return nuclear_norm(M);
    case NormKind::operator_norm: return operator_norm(M);
    case NormKind::frobenius: return frobenius_norm(M);
  }
  throw std::invalid_argument("matrix_norm: unknown kind");
}

Matrix svt(const Matrix& M, double tau) {
  if (tau < 0.0) throw std::invalid_argument("svt: tau must be >= 0");
  if (tau == 0.0) return M;  // exact pass-through
  SvdFactors f = svd(M);
  Vector s = (f.singulars.array() - tau).max(0.0);
  return f.left * s.asDiagonal() * f.right.transpose();
}

SubspaceFrame subspace_frame(const Matrix& theta_star, int r) {
  if (r < 1 || r > std::min(theta_star.rows(), theta_star.cols()))
    throw std::invalid_argument("subspace_frame: r out of range");
  SvdFactors f = svd(theta_star);
  const double tol = 1e-8 * f.singulars(0);
  int numerical_rank = 0;
  for (int i = 0; i < f.singulars.size(); ++i)
    if (f.singulars(i) > tol) ++numerical_rank;
  if (numerical_rank != r)
    throw std::invalid_argument("subspace_frame: numerical rank " + std::to_string(numerical_rank) +
                                " does not match requested r = " + std::to_string(r));
  return SubspaceFrame{f.left.leftCols(r), f.right.leftCols(r), r};
}

Matrix project(const SubspaceFrame& frame, const Matrix& delta, Subspace target) {
  if (delta.rows() != frame.col_basis.rows() || delta.cols() != frame.row_basis.rows())
    throw std::invalid_argument("project: delta shape does not match frame");
  const Matrix& U = frame.col_basis;
  const Matrix& V = frame.row_basis;
  switch (target) {
    case Subspace::model:
      return U * (U.transpose() * delta * V) * V.transpose();
    case Subspace::model_bar_perp: {
      Matrix left = delta - U * (U.transpose() * delta);       // (I - UU^T) delta
      return left - (left * V) * V.transpose();                // ... (I - VV^T)
    }
    case Subspace::model_bar:
      return delta - project(frame, delta, Subspace::model_bar_perp);
  }
  throw std::invalid_argument("project: unknown target");
}

double lq_radius(const Matrix& theta, double q) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("lq_radius: q must be in [0,1]");
  SvdFactors f = svd(theta);
  const double cutoff = 1e-12 * std::max(f.singulars(0), 1e-300);
  double radius = 0.0;
  for (int i = 0; i < f.singulars.size(); ++i) {
    const double s = f.singulars(i);
    if (s <= cutoff) continue;
    radius += (q == 0.0) ? 1.0 : std::pow(s, q);
  }
  return radius;
}

LqSplit lq_threshold_split(const Matrix& theta, double q, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("lq_threshold_split: tau must be > 0");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("lq_threshold_split: q must be in [0,1]");
  SvdFactors f = svd(theta);
  LqSplit out;
  Vector tail_s = f.singulars;
  const double cutoff = 1e-12 * std::max(f.singulars(0), 1e-300);
  for (int i = 0; i < f.singulars.size(); ++i) {
    const double s = f.singulars(i);
    if (s > tau) {
      ++out.s_size;
      tail_s(i) = 0.0;  // head goes to the rank-|S| part
    } else {
      out.tail_nuclear += s;
    }
    if (s > cutoff) out.radius += (q == 0.0) ? 1.0 : std::pow(s, q);
  }
  out.tail = f.left * tail_s.asDiagonal() * f.right.transpose();
  return out;
}

}  // namespace varxid
