#include "varxid/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

#include "varxid/rng.hpp"

namespace varxid {

Matrix SystemModel::theta_star() const {
  Matrix theta(A.rows() + B.cols(), A.rows());
  theta.topRows(A.rows()) = A.transpose();
  theta.bottomRows(B.cols()) = B.transpose();
  return theta;
}

double DistSpec::variance() const {
  switch (family) {
    case DistFamily::gaussian: return scale * scale;
    case DistFamily::uniform: return scale * scale / 3.0;
    case DistFamily::rademacher: return scale * scale;
  }
  throw std::invalid_argument("DistSpec: unknown family");
}

static void validate_spec(const DistSpec& s, const char* who) {
  if (s.scale <= 0.0) throw std::invalid_argument(std::string(who) + ": scale must be > 0");
  if (s.dim < 1) throw std::invalid_argument(std::string(who) + ": dim must be >= 1");
}

static Vector sample_vector(Rng& rng, const DistSpec& s) {
  Vector v(s.dim);
  switch (s.family) {
    case DistFamily::gaussian:
      for (int i = 0; i < s.dim; ++i) v(i) = s.scale * rng.gaussian();
      break;
    case DistFamily::uniform:
      for (int i = 0; i < s.dim; ++i) v(i) = rng.uniform_sym(s.scale);
      break;
    case DistFamily::rademacher:
      for (int i = 0; i < s.dim; ++i) v(i) = rng.rademacher(s.scale);
      break;
  }
  return v;
}

static Matrix gaussian_matrix(Rng& rng, int rows, int cols) {
  Matrix G(rows, cols);
  for (int j = 0; j < cols; ++j)       // column-major fill: stable stream order
    for (int i = 0; i < rows; ++i) G(i, j) = rng.gaussian();
  return G;
}

static Matrix orth(const Matrix& G) {  // thin Q factor
  Eigen::HouseholderQR<Matrix> qr(G);
  return qr.householderQ() * Matrix::Identity(G.rows(), G.cols());
}

static double spectral_radius(const Matrix& A) {
  Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw numerical_error("spectral_radius: eigensolver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

static int numerical_rank(const Matrix& M) {
  SvdFactors f = svd(M);
  const double tol = 1e-8 * f.singulars(0);
  int r = 0;
  for (int i = 0; i < f.singulars.size(); ++i)
    if (f.singulars(i) > tol) ++r;
  return r;
}

SystemModel generate_system(int n, int m, int r, double spectral_radius_cap,
                            const SingularSpec& spec, std::uint64_t seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("generate_system: n, m must be >= 1");
  if (r < 1 || r > std::min(n, n + m))
    throw std::invalid_argument("generate_system: r out of range");
  if (spectral_radius_cap <= 0.0)
    throw std::invalid_argument("generate_system: spectral_radius_cap must be > 0");
  if (spec.kind == SingularSpec::Kind::geometric && (spec.ratio <= 0.0 || spec.ratio > 1.0))
    throw std::invalid_argument("generate_system: geometric ratio must be in (0,1]");

  Rng rng(seed);
  // right factor first, then left factor with its state block drawn inside col(right):
  // keeps the transition matrix supported on the reachable subspace (identifiable form)
  Matrix right = orth(gaussian_matrix(rng, n, r));                 // n x r
  Matrix top = right * gaussian_matrix(rng, r, r);                 // n x r
  Matrix bottom = gaussian_matrix(rng, m, r);                      // m x r
  Matrix stacked(n + m, r);
  stacked.topRows(n) = top;
  stacked.bottomRows(m) = bottom;
  Matrix left = orth(stacked);                                     // (n+m) x r

  Vector d(r);
  for (int k = 0; k < r; ++k)
    d(k) = (spec.kind == SingularSpec::Kind::equal) ? 1.0 : std::pow(spec.ratio, k);

  Matrix theta = left * d.asDiagonal() * right.transpose();        // (n+m) x n
  SystemModel model;
  model.A = theta.topRows(n).transpose();
  model.B = theta.bottomRows(m).transpose();
  model.rank_r = r;

  const double rho = spectral_radius(model.A);
  if (rho > spectral_radius_cap) model.A *= spectral_radius_cap / rho;

  if (numerical_rank(model.theta_star()) != r)
    throw numerical_error("generate_system: rank drifted away from r");
  return model;
}

Trajectory simulate_trajectory(const SystemModel& model, int T0, const DistSpec& input,
                               const std::optional<DistSpec>& noise, std::uint64_t seed) {
  if (T0 < 2) throw std::invalid_argument("simulate_trajectory: T0 must be >= 2");
  validate_spec(input, "simulate_trajectory input");
  if (input.dim != model.m())
    throw std::invalid_argument("simulate_trajectory: input dim must equal m");
  if (noise) {
    validate_spec(*noise, "simulate_trajectory noise");
    if (noise->dim != model.n())
      throw std::invalid_argument("simulate_trajectory: noise dim must equal n");
  }

  Rng rng(seed);
  Trajectory traj;
  traj.states.reserve(T0 + 1);
  traj.inputs.reserve(T0);
  traj.noises.reserve(T0);
  traj.states.push_back(Vector::Zero(model.n()));
  for (int t = 0; t < T0; ++t) {
    Vector u = sample_vector(rng, input);
    Vector w = noise ? sample_vector(rng, *noise) : Vector(Vector::Zero(model.n()));
    // x(t+1) = A x(t) + B u(t) + w(t)
    Vector x_next = model.A * traj.states.back() + model.B * u + w;
    traj.inputs.push_back(std::move(u));
    traj.noises.push_back(std::move(w));
    traj.states.push_back(std::move(x_next));
  }
  return traj;
}

RegressionData collect_repeated(const SystemModel& model, int N, int T0, const DistSpec& input,
                                const std::optional<DistSpec>& noise, std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("collect_repeated: N must be >= 1");
  const int n = model.n(), m = model.m();
  RegressionData data;
  data.X.resize(N, n);
  data.Z.resize(N, n + m);
  data.W.emplace(N, n);
  for (int i = 0; i < N; ++i) {
    Trajectory traj = simulate_trajectory(model, T0, input, noise, derive_seed(seed, i));
    data.Z.row(i).head(n) = traj.states[T0 - 1];
    data.Z.row(i).tail(m) = traj.inputs[T0 - 1];
    data.X.row(i) = traj.states[T0];
    data.W->row(i) = traj.noises[T0 - 1];
  }
  data.Sigma = population_covariance(model, T0, input, noise);
  return data;
}

RegressionData stack_trajectory(const Trajectory& traj) {
  const int T0 = static_cast<int>(traj.inputs.size());
  if (T0 < 1 || traj.states.size() != static_cast<std::size_t>(T0) + 1 ||
      traj.noises.size() != static_cast<std::size_t>(T0))
    throw std::invalid_argument("stack_trajectory: inconsistent trajectory");
  const int n = static_cast<int>(traj.states[0].size());
  const int m = static_cast<int>(traj.inputs[0].size());
  RegressionData data;
  data.X.resize(T0, n);
  data.Z.resize(T0, n + m);
  data.W.emplace(T0, n);
  for (int t = 0; t < T0; ++t) {
    data.Z.row(t).head(n) = traj.states[t];
    data.Z.row(t).tail(m) = traj.inputs[t];
    data.X.row(t) = traj.states[t + 1];
    data.W->row(t) = traj.noises[t];
  }
  return data;
}

static void check_companion_args(const std::vector<Matrix>& A_list, const Matrix& B) {
  if (A_list.empty()) throw std::invalid_argument("companion_form: empty A list");
  const auto n = A_list.front().rows();
  for (const Matrix& A : A_list)
    if (A.rows() != n || A.cols() != n)
      throw std::invalid_argument("companion_form: all A_k must be n x n");
  if (B.rows() != n) throw std::invalid_argument("companion_form: B must have n rows");
}

static SystemModel companion_impl(const std::vector<Matrix>& A_list, const Matrix& B,
                                  bool shifted) {
  check_companion_args(A_list, B);
  const int d = static_cast<int>(A_list.size());
  const int n = static_cast<int>(A_list.front().rows());
  const int m = static_cast<int>(B.cols());
  SystemModel model;
  model.A = Matrix::Zero(d * n, d * n);
  for (int k = 0; k < d; ++k) model.A.block(0, k * n, n, n) = A_list[k];
  if (shifted)
    for (int k = 0; k + 1 < d; ++k)
      model.A.block((k + 1) * n, k * n, n, n) = Matrix::Identity(n, n);
  model.B = Matrix::Zero(d * n, m);
  model.B.topRows(n) = B;
  model.rank_r = numerical_rank(model.theta_star());
  model.sigma_w = 0.0;
  return model;
}

SystemModel companion_form(const std::vector<Matrix>& A_list, const Matrix& B) {
  return companion_impl(A_list, B, false);
}

SystemModel companion_form_shifted(const std::vector<Matrix>& A_list, const Matrix& B) {
  return companion_impl(A_list, B, true);
}

double subgaussian_param(const SystemModel& model, int T0, double sigma_u, double sigma_w) {
  if (T0 < 2) throw std::invalid_argument("subgaussian_param: T0 must be >= 2");
  if (sigma_u <= 0.0) throw std::invalid_argument("subgaussian_param: sigma_u must be > 0");
  if (sigma_w < 0.0) throw std::invalid_argument("subgaussian_param: sigma_w must be >= 0");
  double total = sigma_u * sigma_u;  // the u(T0-1) block
  Matrix Ak = Matrix::Identity(model.n(), model.n());  // A^{T0-2-k} for k = T0-2 down to 0
  for (int k = T0 - 2; k >= 0; --k) {
    const double nB = operator_norm(Ak * model.B);
    const double nA = operator_norm(Ak);
    total += nB * nB * sigma_u * sigma_u + nA * nA * sigma_w * sigma_w;
    if (k > 0) Ak = model.A * Ak;
  }
  return std::sqrt(total);
}

Matrix population_covariance(const SystemModel& model, int T0, const DistSpec& input,
                             const std::optional<DistSpec>& noise) {
  if (T0 < 2) throw std::invalid_argument("population_covariance: T0 must be >= 2");
  validate_spec(input, "population_covariance input");
  if (input.dim != model.m())
    throw std::invalid_argument("population_covariance: input dim must equal m");
  if (noise && noise->dim != model.n())
    throw std::invalid_argument("population_covariance: noise dim must equal n");
  const int n = model.n(), m = model.m();
  const double var_u = input.variance();
  const double var_w = noise ? noise->variance() : 0.0;

  Matrix core = var_u * (model.B * model.B.transpose());
  core += var_w * Matrix::Identity(n, n);
  Matrix sigma_x = Matrix::Zero(n, n);
  Matrix Ak = Matrix::Identity(n, n);
  for (int k = 0; k <= T0 - 2; ++k) {
    sigma_x += Ak * core * Ak.transpose();
    if (k < T0 - 2) Ak = model.A * Ak;
  }

  Matrix sigma = Matrix::Zero(n + m, n + m);
  sigma.topLeftCorner(n, n) = 0.5 * (sigma_x + sigma_x.transpose());  // enforce symmetry
  sigma.bottomRightCorner(m, m) = var_u * Matrix::Identity(m, m);
  return sigma;
}

}  // namespace varxid
