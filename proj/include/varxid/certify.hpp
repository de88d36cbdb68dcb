#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "varxid/linalg.hpp"

namespace varxid {

// exact-recovery threshold for the restricted-isometry constant: 5 - 2 sqrt(6)
double exact_recovery_threshold();

// Monte Carlo restricted-isometry estimate at a given rank order:
// delta_hat is the smallest delta >= 0 with K1 (1-delta) <= ||Z D||_F / sqrt(N) <= K2 (1+delta)
// over the sampled unit-Frobenius rank-<=order probes; nullopt when no delta < 1 works
struct WeakRipEstimate {
  int order = 0;
  double K1 = 0.0, K2 = 0.0;
  std::optional<double> delta_hat;
  int samples = 0;
  double ratio_min = 0.0, ratio_max = 0.0;
};

WeakRipEstimate empirical_weak_rip(const Matrix& Z, int order, double K1, double K2, int trials,
                                   std::uint64_t seed);

// multi-order profile with nested sample pools (probes at lower orders are reused at higher
// ones), so delta_hat is non-decreasing in the order by construction
std::vector<WeakRipEstimate> empirical_weak_rip_profile(const Matrix& Z,
                                                        const std::vector<int>& orders, double K1,
                                                        double K2, int trials_per_order,
                                                        std::uint64_t seed);

// 1 when K1 == K2, otherwise floor((K2/K1)^2) + 1
int s_value(double K1, double K2);

struct RecoveryVerdict {
  bool uniqueness = false;      // delta at order 2r < 1
  bool exact_recovery = false;  // delta at order (2+3s)r < 5 - 2 sqrt(6)
  int s = 1;
};

RecoveryVerdict recovery_verdict(const std::optional<double>& delta_2r,
                                 const std::optional<double>& delta_high, int s);

// dev = ||Z^T Z / N - Sigma||_op with its concentration envelope
struct CovarianceDeviation {
  double dev = 0.0;
  int ambient = 0;      // n + m
  int num_samples = 0;  // N

  // 16 sqrt(6) beta^2 (sqrt(a/N) + a/N) + delta beta^2, a = ambient
  double bound_at(double delta, double beta) const;
};

CovarianceDeviation covariance_deviation(const Matrix& Z, const Matrix& Sigma);

struct CrossTerm {
  double value = 0.0;      // ||Z^T W / N||_op
  double threshold = 0.0;  // 2 alpha sqrt((n+m)/N)
};

CrossTerm cross_term(const Matrix& Z, const Matrix& W, double alpha);

// certified curvature of the quadratic loss: sigma_min(Z^T Z / N), plus a sampled
// cross-check min ||Sigma_hat D||_op over unit-operator-norm probes
struct CurvatureEstimate {
  double curvature = 0.0;
  double sampled_min = 0.0;
};

CurvatureEstimate curvature_estimate(const Matrix& Z, int trials, std::uint64_t seed,
                                     int probe_cols = -1);

struct BoundParams {
  double K = 0.0;          // curvature (sigma_min of the empirical covariance)
  double lambda = 0.0;
  double alpha = 0.0;
  double gamma_min = 0.0;  // smallest eigenvalue of the population covariance
  int n = 0, m = 0, N = 0, r = 0;
  double R_q = 0.0;        // spectral lq-ball radius (approximately-low-rank bound)
  double tau_N = 0.0;      // curvature slack (0 in the exactly-low-rank regime)
};

// named error envelopes implied by the premises; the *_stmt / *_proof pair exposes the
// stated 12x rate alongside the 24x rate the proof chain actually yields
struct BoundPredictions {
  double op_deterministic = 0.0;  // 3 lambda / K
  double op_corollary_stmt = 0.0;   // 12 alpha / gamma_min * sqrt((n+m)/N)
  double op_corollary_proof = 0.0;  // 24 alpha / gamma_min * sqrt((n+m)/N)
  double frob_remark = 0.0;         // 96 sqrt(2r) alpha / gamma_min * sqrt((n+m)/N)
  double op_lq = 0.0;               // max(32 tau_N R_q / K, 6 lambda / K)
};

BoundPredictions predict_bounds(const BoundParams& p);

// cone geometry of an error matrix against the rank-r frame of the truth;
// cone_ratio folds in the lemma's factor 3, so <= 1 certifies the cone inequality
struct ConeCheck {
  double cone_ratio = 0.0;   // ||D_perp||_nuc / (3 max(||D_bar||_nuc, eps))
  double nuc_vs_frob = 0.0;  // ||D||_nuc / (4 sqrt(2r) ||D||_F)
  double nuc_perp = 0.0, nuc_bar = 0.0, nuc_total = 0.0, frob_total = 0.0;
};

ConeCheck cone_check(const Matrix& delta_hat, const SubspaceFrame& frame, int r);

// aggregate certificate; booleans are recomputed from the stored numerics on every call
struct CertReport {
  std::vector<WeakRipEstimate> weak_rip;  // orders r, 2r, (2+3s)r
  double curvature_K = 0.0;
  double cov_dev_op = 0.0;
  double cross_term_value = 0.0;
  double cross_term_threshold = 0.0;
  double lambda = 0.0;
  int s = 1;
  BoundPredictions predicted;

  bool uniqueness_ok() const;
  bool exact_recovery_ok() const;
  bool lambda_premise_ok() const;
};

}  // namespace varxid
