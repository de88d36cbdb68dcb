#include "varxid/certify.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "varxid/rng.hpp"

namespace varxid {

double exact_recovery_threshold() { return 5.0 - 2.0 * std::sqrt(6.0); }

static Matrix gaussian_matrix(Rng& rng, int rows, int cols) {
  Matrix G(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) G(i, j) = rng.gaussian();
  return G;
}

// unit-Frobenius rank-<=order probe with the same row/column dimensions as the design
static Matrix rank_probe(Rng& rng, int p, int q, int order) {
  Matrix D = gaussian_matrix(rng, p, order) * gaussian_matrix(rng, q, order).transpose();
  const double f = D.norm();
  if (f == 0.0) return Matrix::Zero(p, q);
  return D / f;
}

static WeakRipEstimate finalize_rip(int order, double K1, double K2, int samples,
                                    double ratio_min, double ratio_max) {
  WeakRipEstimate est;
  est.order = order;
  est.K1 = K1;
  est.K2 = K2;
  est.samples = samples;
  est.ratio_min = ratio_min;
  est.ratio_max = ratio_max;
  const double delta = std::max({1.0 - ratio_min / K1, ratio_max / K2 - 1.0, 0.0});
  if (delta < 1.0) est.delta_hat = delta;
  return est;
}

WeakRipEstimate empirical_weak_rip(const Matrix& Z, int order, double K1, double K2, int trials,
                                   std::uint64_t seed) {
  if (trials < 100) throw std::invalid_argument("empirical_weak_rip: trials must be >= 100");
  if (K1 <= 0.0 || K2 < K1) throw std::invalid_argument("empirical_weak_rip: need 0 < K1 <= K2");
  if (order < 1) throw std::invalid_argument("empirical_weak_rip: order must be >= 1");
  const int p = static_cast<int>(Z.cols());
  // the extreme ratios are invariant to the probe column count (only the left factors and
  // spectrum enter ||Z D||_F), so any q >= order certifies the same constant
  const int q = std::max(std::max(1, p / 2), order);
  const double sqrtN = std::sqrt(static_cast<double>(Z.rows()));
  Rng rng(seed);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int t = 0; t < trials; ++t) {
    Matrix D = rank_probe(rng, p, q, order);
    const double ratio = (Z * D).norm() / sqrtN;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return finalize_rip(order, K1, K2, trials, lo, hi);
}

std::vector<WeakRipEstimate> empirical_weak_rip_profile(const Matrix& Z,
                                                        const std::vector<int>& orders, double K1,
                                                        double K2, int trials_per_order,
                                                        std::uint64_t seed) {
  if (trials_per_order < 100)
    throw std::invalid_argument("empirical_weak_rip_profile: trials must be >= 100");
  if (K1 <= 0.0 || K2 < K1)
    throw std::invalid_argument("empirical_weak_rip_profile: need 0 < K1 <= K2");
  if (orders.empty() || orders.front() < 1)
    throw std::invalid_argument("empirical_weak_rip_profile: orders must be >= 1");
  for (std::size_t i = 1; i < orders.size(); ++i)
    if (orders[i] < orders[i - 1])
      throw std::invalid_argument("empirical_weak_rip_profile: orders must be non-decreasing");
  const int p = static_cast<int>(Z.cols());
  const int q = std::max(std::max(1, p / 2), orders.back());
  const double sqrtN = std::sqrt(static_cast<double>(Z.rows()));

  std::vector<WeakRipEstimate> out;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  int pooled = 0;
  for (std::size_t oi = 0; oi < orders.size(); ++oi) {
    Rng rng(derive_seed(seed, oi));
    for (int t = 0; t < trials_per_order; ++t) {
      Matrix D = rank_probe(rng, p, q, orders[oi]);
      const double ratio = (Z * D).norm() / sqrtN;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    pooled += trials_per_order;
    out.push_back(finalize_rip(orders[oi], K1, K2, pooled, lo, hi));
  }
  return out;
}

int s_value(double K1, double K2) {
  if (K1 <= 0.0 || K2 < K1) throw std::invalid_argument("s_value: need 0 < K1 <= K2");
  if (K1 == K2) return 1;
  const double ratio = K2 / K1;
  return static_cast<int>(std::floor(ratio * ratio)) + 1;
}

RecoveryVerdict recovery_verdict(const std::optional<double>& delta_2r,
                                 const std::optional<double>& delta_high, int s) {
  RecoveryVerdict v;
  v.s = s;
  v.uniqueness = delta_2r.has_value() && *delta_2r < 1.0;
  v.exact_recovery = delta_high.has_value() && *delta_high < exact_recovery_threshold();
  return v;
}

double CovarianceDeviation::bound_at(double delta, double beta) const {
  const double a = static_cast<double>(ambient) / num_samples;
  return 16.0 * std::sqrt(6.0) * beta * beta * (std::sqrt(a) + a) + delta * beta * beta;
}

CovarianceDeviation covariance_deviation(const Matrix& Z, const Matrix& Sigma) {
  if (Sigma.rows() != Z.cols() || Sigma.cols() != Z.cols())
    throw std::invalid_argument("covariance_deviation: Sigma shape mismatch");
  CovarianceDeviation out;
  out.ambient = static_cast<int>(Z.cols());
  out.num_samples = static_cast<int>(Z.rows());
  Matrix emp = Z.transpose() * Z / static_cast<double>(Z.rows());
  out.dev = operator_norm(emp - Sigma);
  return out;
}

CrossTerm cross_term(const Matrix& Z, const Matrix& W, double alpha) {
  if (Z.rows() != W.rows()) throw std::invalid_argument("cross_term: row counts differ");
  if (alpha <= 0.0) throw std::invalid_argument("cross_term: alpha must be > 0");
  const double N = static_cast<double>(Z.rows());
  CrossTerm out;
  out.value = operator_norm(Z.transpose() * W / N);
  out.threshold = 2.0 * alpha * std::sqrt(static_cast<double>(Z.cols()) / N);
  return out;
}

CurvatureEstimate curvature_estimate(const Matrix& Z, int trials, std::uint64_t seed,
                                     int probe_cols) {
  if (trials < 1) throw std::invalid_argument("curvature_estimate: trials must be >= 1");
  const int p = static_cast<int>(Z.cols());
  const int q = probe_cols > 0 ? probe_cols : p;
  Matrix emp = Z.transpose() * Z / static_cast<double>(Z.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(emp);
  if (es.info() != Eigen::Success) throw numerical_error("curvature_estimate: eigensolver failed");
  CurvatureEstimate out;
  out.curvature = std::max(es.eigenvalues().minCoeff(), 0.0);

  Rng rng(seed);
  double lo = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    Matrix D = gaussian_matrix(rng, p, q);
    const double dn = operator_norm(D);
    if (dn == 0.0) continue;
    lo = std::min(lo, operator_norm(emp * D) / dn);
  }
  out.sampled_min = lo;
  return out;
}

BoundPredictions predict_bounds(const BoundParams& p) {
  if (p.n < 1 || p.m < 1 || p.N < 1 || p.r < 1)
    throw std::invalid_argument("predict_bounds: dimensions must be positive");
  if (p.K <= 0.0 || p.gamma_min <= 0.0 || p.lambda < 0.0 || p.alpha < 0.0)
    throw std::invalid_argument("predict_bounds: K and gamma_min must be > 0");
  const double root = std::sqrt(static_cast<double>(p.n + p.m) / p.N);
  BoundPredictions b;
  b.op_deterministic = 3.0 * p.lambda / p.K;
  b.op_corollary_stmt = 12.0 * p.alpha / p.gamma_min * root;
  b.op_corollary_proof = 24.0 * p.alpha / p.gamma_min * root;
  b.frob_remark = 96.0 * std::sqrt(2.0 * p.r) * p.alpha / p.gamma_min * root;
  b.op_lq = std::max(32.0 * p.tau_N * p.R_q / p.K, 6.0 * p.lambda / p.K);
  return b;
}

ConeCheck cone_check(const Matrix& delta_hat, const SubspaceFrame& frame, int r) {
  if (r < 1) throw std::invalid_argument("cone_check: r must be >= 1");
  ConeCheck out;
  Matrix perp = project(frame, delta_hat, Subspace::model_bar_perp);
  Matrix bar = delta_hat - perp;
  out.nuc_perp = nuclear_norm(perp);
  out.nuc_bar = nuclear_norm(bar);
  out.nuc_total = nuclear_norm(delta_hat);
  out.frob_total = delta_hat.norm();
  const double eps = 1e-15 * std::max(out.frob_total, 1e-300);
  out.cone_ratio = out.nuc_perp / (3.0 * std::max(out.nuc_bar, eps));
  out.nuc_vs_frob =
      out.nuc_total / (4.0 * std::sqrt(2.0 * r) * std::max(out.frob_total, 1e-300));
  return out;
}

static std::optional<double> delta_at_index(const CertReport& rep, std::size_t i) {
  if (i >= rep.weak_rip.size()) return std::nullopt;
  return rep.weak_rip[i].delta_hat;
}

bool CertReport::uniqueness_ok() const {
  auto d = delta_at_index(*this, 1);
  return d.has_value() && *d < 1.0;
}

bool CertReport::exact_recovery_ok() const {
  auto d = delta_at_index(*this, 2);
  return d.has_value() && *d < exact_recovery_threshold();
}

bool CertReport::lambda_premise_ok() const { return lambda >= 2.0 * cross_term_value; }

}  // namespace varxid
