#include "varxid/experiments.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <thread>

#include "varxid/io.hpp"
#include "varxid/rng.hpp"

namespace varxid {

using nlohmann::json;

DistSpec ExperimentConfig::input_spec() const { return DistSpec{input_family, sigma_u, m}; }

std::optional<DistSpec> ExperimentConfig::noise_spec() const {
  if (!noise_family) return std::nullopt;
  return DistSpec{*noise_family, sigma_w, n};
}

static DistFamily family_from_string(const std::string& s) {
  if (s == "gaussian") return DistFamily::gaussian;
  if (s == "uniform") return DistFamily::uniform;
  if (s == "rademacher") return DistFamily::rademacher;
  throw config_error("unknown family: " + s);
}

static std::string family_to_string(DistFamily f) {
  switch (f) {
    case DistFamily::gaussian: return "gaussian";
    case DistFamily::uniform: return "uniform";
    case DistFamily::rademacher: return "rademacher";
  }
  return "?";
}

static ExperimentKind kind_from_string(const std::string& s) {
  if (s == "phase_transition" || s == "phase-transition") return ExperimentKind::phase_transition;
  if (s == "error_scaling" || s == "error-scaling") return ExperimentKind::error_scaling;
  if (s == "bounds_check" || s == "bounds-check") return ExperimentKind::bounds_check;
  if (s == "rip_profile" || s == "rip-profile") return ExperimentKind::rip_profile;
  throw config_error("unknown experiment: " + s);
}

static std::string kind_to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::phase_transition: return "phase_transition";
    case ExperimentKind::error_scaling: return "error_scaling";
    case ExperimentKind::bounds_check: return "bounds_check";
    case ExperimentKind::rip_profile: return "rip_profile";
  }
  return "?";
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    cfg.experiment = kind_from_string(j.at("experiment").get<std::string>());
    cfg.n = j.at("n").get<int>();
    cfg.m = j.at("m").get<int>();
    cfg.r = j.at("r").get<int>();
    cfg.T0 = j.at("T0").get<int>();
    cfg.N_grid = j.at("N_grid").get<std::vector<int>>();
    cfg.trials_per_cell = j.at("trials_per_cell").get<int>();
    cfg.input_family = family_from_string(j.value("input_family", std::string("gaussian")));
    if (j.contains("noise_family") && !j.at("noise_family").is_null()) {
      const auto s = j.at("noise_family").get<std::string>();
      if (s != "none") cfg.noise_family = family_from_string(s);
    }
    cfg.sigma_u = j.value("sigma_u", 1.0);
    cfg.sigma_w = j.value("sigma_w", 0.0);
    cfg.spectral_radius_cap = j.value("spectral_radius_cap", 0.9);
    if (j.contains("singular_spec")) {
      const auto s = j.at("singular_spec").get<std::string>();
      if (s == "equal") {
        cfg.singulars.kind = SingularSpec::Kind::equal;
      } else if (s == "geometric") {
        cfg.singulars.kind = SingularSpec::Kind::geometric;
        cfg.singulars.ratio = j.value("singular_ratio", 0.5);
      } else {
        throw config_error("unknown singular_spec: " + s);
      }
    }
    cfg.master_seed = j.value("master_seed", std::uint64_t{0});
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      cfg.solver.max_iters = s.value("max_iters", cfg.solver.max_iters);
      cfg.solver.rel_tol = s.value("rel_tol", cfg.solver.rel_tol);
      cfg.solver.kkt_tol = s.value("kkt_tol", cfg.solver.kkt_tol);
      cfg.solver.admm_rho = s.value("admm_rho", cfg.solver.admm_rho);
      cfg.solver.acceleration = s.value("acceleration", cfg.solver.acceleration);
    }
    cfg.output_dir = j.value("output_dir", std::string("out"));
  } catch (const json::exception& e) {
    throw config_error(std::string("config parse: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  json j;
  try {
    j = io::read_json_file(path);
  } catch (const std::exception& e) {
    throw config_error(std::string("config load: ") + e.what());
  }
  return config_from_json(j);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n < 1 || cfg.m < 1) throw config_error("n and m must be >= 1");
  if (cfg.r < 1 || cfg.r > std::min(cfg.n, cfg.n + cfg.m)) throw config_error("r out of range");
  if (cfg.T0 < 2) throw config_error("T0 must be >= 2");
  if (cfg.N_grid.empty()) throw config_error("N_grid must be non-empty");
  int prev = 0;
  for (int N : cfg.N_grid) {
    if (N <= prev) throw config_error("N_grid must be strictly increasing and positive");
    prev = N;
  }
  if (cfg.trials_per_cell < 1) throw config_error("trials_per_cell must be >= 1");
  if (cfg.sigma_u <= 0.0) throw config_error("sigma_u must be > 0");
  if (cfg.noise_family && cfg.sigma_w <= 0.0)
    throw config_error("sigma_w must be > 0 when noise_family present");
  if (cfg.spectral_radius_cap <= 0.0) throw config_error("spectral_radius_cap must be > 0");
  if (cfg.solver.max_iters < 1) throw config_error("solver.max_iters must be >= 1");
  if (cfg.solver.rel_tol <= 0.0 || cfg.solver.kkt_tol <= 0.0)
    throw config_error("solver tolerances must be > 0");
  if (cfg.solver.admm_rho <= 0.0) throw config_error("solver.admm_rho must be > 0");
  if (cfg.experiment == ExperimentKind::error_scaling ||
      cfg.experiment == ExperimentKind::bounds_check) {
    if (!cfg.noise_family) throw config_error(kind_to_string(cfg.experiment) + " needs noise");
  }
  if (cfg.experiment == ExperimentKind::error_scaling &&
      cfg.N_grid.back() < 8 * cfg.N_grid.front())
    throw config_error("error_scaling needs an N_grid spanning >= 3 octaves");
  if (cfg.experiment == ExperimentKind::phase_transition && cfg.noise_family)
    throw config_error("phase_transition is a noiseless experiment");
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = kind_to_string(cfg.experiment);
  j["n"] = cfg.n;
  j["m"] = cfg.m;
  j["r"] = cfg.r;
  j["T0"] = cfg.T0;
  j["N_grid"] = cfg.N_grid;
  j["trials_per_cell"] = cfg.trials_per_cell;
  j["input_family"] = family_to_string(cfg.input_family);
  j["noise_family"] = cfg.noise_family ? family_to_string(*cfg.noise_family) : "none";
  j["sigma_u"] = cfg.sigma_u;
  j["sigma_w"] = cfg.sigma_w;
  j["spectral_radius_cap"] = cfg.spectral_radius_cap;
  j["singular_spec"] = cfg.singulars.kind == SingularSpec::Kind::equal ? "equal" : "geometric";
  if (cfg.singulars.kind == SingularSpec::Kind::geometric)
    j["singular_ratio"] = cfg.singulars.ratio;
  j["master_seed"] = cfg.master_seed;
  j["solver"] = {{"max_iters", cfg.solver.max_iters},
                 {"rel_tol", cfg.solver.rel_tol},
                 {"kkt_tol", cfg.solver.kkt_tol},
                 {"admm_rho", cfg.solver.admm_rho},
                 {"acceleration", cfg.solver.acceleration}};
  j["output_dir"] = cfg.output_dir;
  return j;
}

int worker_count() {
  if (const char* env = std::getenv("VARXID_THREADS")) {
    const int k = std::atoi(env);
    if (k >= 1) return k;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// runs f(0..count-1) on the worker pool; each slot writes only its own result,
// so aggregation downstream is order-deterministic
template <typename F>
static void parallel_for(int count, F&& f) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) f(i);
    });
  for (auto& th : pool) th.join();
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return (v.size() % 2) ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

static double sigma_min_eig(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw numerical_error("eigensolver failed");
  return es.eigenvalues().minCoeff();
}

static double sigma_max_eig(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw numerical_error("eigensolver failed");
  return es.eigenvalues().maxCoeff();
}

namespace {

struct TrialErrors {
  double op = 0.0, frob = 0.0, nuc = 0.0;
};

TrialErrors errors_against(const Matrix& theta_hat, const Matrix& theta_star) {
  Matrix d = theta_hat - theta_star;
  TrialErrors e;
  e.frob = d.norm();
  if (e.frob > 0.0) {
    SvdFactors f = svd(d);
    e.op = f.singulars(0);
    e.nuc = f.singulars.sum();
  }
  return e;
}

long elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               t0)
      .count();
}

}  // namespace

std::vector<CellResult> run_phase_transition(const ExperimentConfig& cfg,
                                             std::vector<TrialRecord>* rows) {
  validate(cfg);
  if (cfg.noise_family) throw config_error("phase_transition is a noiseless experiment");
  std::vector<CellResult> cells;
  for (int N : cfg.N_grid) {
    std::vector<TrialRecord> recs(cfg.trials_per_cell);
    parallel_for(cfg.trials_per_cell, [&](int t) {
      const auto t0 = std::chrono::steady_clock::now();
      const std::uint64_t trial_seed = derive_seed(cfg.master_seed, N, t);
      SystemModel model = generate_system(cfg.n, cfg.m, cfg.r, cfg.spectral_radius_cap,
                                          cfg.singulars, derive_seed(trial_seed, 1));
      RegressionData data = collect_repeated(model, N, cfg.T0, cfg.input_spec(), std::nullopt,
                                             derive_seed(trial_seed, 2));
      Estimate est = nuclear_min_exact(data, cfg.solver);
      Matrix theta = model.theta_star();
      TrialErrors e = errors_against(est.theta_hat, theta);
      TrialRecord rec;
      rec.experiment = "phase_transition";
      rec.N = N;
      rec.trial = t;
      rec.seed = trial_seed;
      rec.success = (e.frob <= 1e-3 * theta.norm()) ? 1 : 0;
      rec.op_err = e.op;
      rec.frob_err = e.frob;
      rec.nuc_err = e.nuc;
      rec.lambda = 0.0;
      rec.kkt_residual = est.kkt_residual;
      rec.wall_ms = elapsed_ms(t0);
      recs[t] = std::move(rec);
    });
    CellResult cell;
    cell.N = N;
    std::vector<double> ops, frobs;
    for (const auto& rec : recs) {
      cell.success_rate += rec.success;
      ops.push_back(rec.op_err);
      frobs.push_back(rec.frob_err);
      cell.wall_ms += rec.wall_ms;
    }
    cell.success_rate /= cfg.trials_per_cell;
    cell.median_op_err = median(ops);
    cell.median_frob_err = median(frobs);
    cells.push_back(cell);
    if (rows) rows->insert(rows->end(), recs.begin(), recs.end());
  }
  return cells;
}

// shared noisy pipeline: generate, solve the regularized program with the plug-in lambda,
// evaluate the premise, the deterministic operator-norm chain, and the cone inequalities
static TrialRecord noisy_trial(const ExperimentConfig& cfg, const char* name, int N, int t) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t trial_seed = derive_seed(cfg.master_seed, N, t);
  SystemModel model = generate_system(cfg.n, cfg.m, cfg.r, cfg.spectral_radius_cap, cfg.singulars,
                                      derive_seed(trial_seed, 1));
  RegressionData data = collect_repeated(model, N, cfg.T0, cfg.input_spec(), cfg.noise_spec(),
                                         derive_seed(trial_seed, 2));
  const double gamma_max = sigma_max_eig(*data.Sigma);
  const double sigma_z = subgaussian_param(model, cfg.T0, cfg.sigma_u, cfg.sigma_w);
  const double alpha = alpha_param(cfg.sigma_w, sigma_z, gamma_max);
  const double lambda = lambda_rule(cfg.n, cfg.m, N, alpha);

  Estimate est = nuclear_reg_solve(data, lambda, cfg.solver);
  Matrix theta = model.theta_star();
  TrialErrors e = errors_against(est.theta_hat, theta);

  const double N_d = static_cast<double>(N);
  Matrix emp = data.Z.transpose() * data.Z / N_d;
  const double K_hat = std::max(sigma_min_eig(emp), 0.0);
  const double cross = operator_norm(data.Z.transpose() * (*data.W) / N_d);
  const bool premise = lambda >= 2.0 * cross;
  const double slack = 10.0 * cfg.solver.kkt_tol * e.frob;

  TrialRecord rec;
  rec.experiment = name;
  rec.N = N;
  rec.trial = t;
  rec.seed = trial_seed;
  rec.success = est.converged ? 1 : 0;
  rec.op_err = e.op;
  rec.frob_err = e.frob;
  rec.nuc_err = e.nuc;
  rec.lambda = lambda;
  rec.kkt_residual = est.kkt_residual;
  rec.premise_held = premise ? 1 : 0;
  if (premise && K_hat > 0.0) {
    rec.bound = 3.0 * lambda / K_hat + slack;
    bool ok = e.op <= rec.bound;
    SubspaceFrame frame = subspace_frame(theta, cfg.r);
    ConeCheck cc = cone_check(est.theta_hat - theta, frame, cfg.r);
    ok = ok && cc.nuc_perp <= 3.0 * cc.nuc_bar + slack;
    ok = ok && cc.nuc_total <= 4.0 * std::sqrt(2.0 * cfg.r) * cc.frob_total + slack;
    rec.violated = ok ? 0 : 1;
  }
  rec.wall_ms = elapsed_ms(t0);
  return rec;
}

static std::vector<CellResult> run_noisy(const ExperimentConfig& cfg, const char* name,
                                         std::vector<TrialRecord>* rows) {
  std::vector<CellResult> cells;
  for (int N : cfg.N_grid) {
    std::vector<TrialRecord> recs(cfg.trials_per_cell);
    parallel_for(cfg.trials_per_cell, [&](int t) { recs[t] = noisy_trial(cfg, name, N, t); });
    CellResult cell;
    cell.N = N;
    std::vector<double> ops, frobs;
    int held = 0, violated = 0;
    for (const auto& rec : recs) {
      cell.success_rate += rec.success;
      ops.push_back(rec.op_err);
      frobs.push_back(rec.frob_err);
      held += rec.premise_held;
      violated += rec.violated;
      cell.wall_ms += rec.wall_ms;
    }
    cell.success_rate /= cfg.trials_per_cell;
    cell.median_op_err = median(ops);
    cell.median_frob_err = median(frobs);
    cell.bound_violation_rate = held > 0 ? static_cast<double>(violated) / held : 0.0;
    cells.push_back(cell);
    if (rows) rows->insert(rows->end(), recs.begin(), recs.end());
  }
  return cells;
}

static double fit_slope(const std::vector<CellResult>& cells) {
  // least-squares slope of log(median op err) on log(N)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (const auto& c : cells) {
    if (c.median_op_err <= 0.0) continue;
    const double x = std::log(static_cast<double>(c.N));
    const double y = std::log(c.median_op_err);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++k;
  }
  if (k < 2) throw numerical_error("fit_slope: need >= 2 cells with positive median error");
  const double denom = k * sxx - sx * sx;
  if (denom == 0.0) throw numerical_error("fit_slope: degenerate N grid");
  return (k * sxy - sx * sy) / denom;
}

ErrorScalingResult run_error_scaling(const ExperimentConfig& cfg, std::vector<TrialRecord>* rows) {
  validate(cfg);
  ErrorScalingResult out;
  out.cells = run_noisy(cfg, "error_scaling", rows);
  out.fitted_slope = fit_slope(out.cells);
  return out;
}

std::vector<CellResult> run_bounds_check(const ExperimentConfig& cfg,
                                         std::vector<TrialRecord>* rows) {
  validate(cfg);
  return run_noisy(cfg, "bounds_check", rows);
}

std::vector<RipProfileEntry> run_rip_profile(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<RipProfileEntry> out;
  const int trials = std::max(cfg.trials_per_cell, 100);
  for (int N : cfg.N_grid) {
    const std::uint64_t cell_seed = derive_seed(cfg.master_seed, N, 0);
    SystemModel model = generate_system(cfg.n, cfg.m, cfg.r, cfg.spectral_radius_cap,
                                        cfg.singulars, derive_seed(cell_seed, 1));
    RegressionData data = collect_repeated(model, N, cfg.T0, cfg.input_spec(), cfg.noise_spec(),
                                           derive_seed(cell_seed, 2));
    const double gmin = std::max(sigma_min_eig(*data.Sigma), 0.0);
    const double gmax = sigma_max_eig(*data.Sigma);
    if (gmin <= 0.0) {
      // population covariance singular: no K1 > 0 exists, record failed estimates
      for (int order : {cfg.r, 2 * cfg.r}) {
        WeakRipEstimate est;
        est.order = order;
        est.samples = 0;
        out.push_back({N, est});
      }
      continue;
    }
    const double K1 = std::sqrt(gmin), K2 = std::sqrt(gmax);
    const int s = s_value(K1, K2);
    // orders r, 2r, (2+3s)r clamped to the state dimension (rank cannot exceed it)
    std::vector<int> orders{cfg.r, std::min(2 * cfg.r, cfg.n), std::min((2 + 3 * s) * cfg.r, cfg.n)};
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
    auto ests = empirical_weak_rip_profile(data.Z, orders, K1, K2, trials,
                                           derive_seed(cell_seed, 3));
    for (const auto& est : ests) out.push_back({N, est});
  }
  return out;
}

static std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trial_csv(const std::string& path, const std::vector<TrialRecord>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trial_csv: cannot open " + path);
  out << "experiment,N,trial,seed,success,op_err,frob_err,nuc_err,lambda,kkt_residual,"
         "premise_held,bound,violated,wall_ms\n";
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.N << ',' << r.trial << ',' << r.seed << ',' << r.success
        << ',' << fmt17(r.op_err) << ',' << fmt17(r.frob_err) << ',' << fmt17(r.nuc_err) << ','
        << fmt17(r.lambda) << ',' << fmt17(r.kkt_residual) << ',' << r.premise_held << ','
        << fmt17(r.bound) << ',' << r.violated << ',' << r.wall_ms << "\n";
  }
}

void write_cell_csv(const std::string& path, const std::string& experiment,
                    const std::vector<CellResult>& cells) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_cell_csv: cannot open " + path);
  out << "experiment,N,success_rate,median_op_err,median_frob_err,bound_violation_rate,wall_ms\n";
  for (const auto& c : cells) {
    out << experiment << ',' << c.N << ',' << fmt17(c.success_rate) << ','
        << fmt17(c.median_op_err) << ',' << fmt17(c.median_frob_err) << ','
        << fmt17(c.bound_violation_rate) << ',' << c.wall_ms << "\n";
  }
}

static void write_two_column(const std::string& path,
                             const std::vector<std::pair<double, double>>& xy) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (const auto& [x, y] : xy) out << fmt17(x) << ' ' << fmt17(y) << "\n";
}

void run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  io::write_json_file(cfg.output_dir + "/config.json", config_to_json(cfg));

  const std::string name = kind_to_string(cfg.experiment);
  std::vector<TrialRecord> rows;
  json summary;
  summary["experiment"] = name;

  switch (cfg.experiment) {
    case ExperimentKind::phase_transition: {
      auto cells = run_phase_transition(cfg, &rows);
      write_trial_csv(cfg.output_dir + "/trials.csv", rows);
      write_cell_csv(cfg.output_dir + "/cells.csv", name, cells);
      std::vector<std::pair<double, double>> xy;
      json jcells = json::array();
      for (const auto& c : cells) {
        xy.emplace_back(c.N, c.success_rate);
        jcells.push_back({{"N", c.N},
                          {"success_rate", c.success_rate},
                          {"median_op_err", c.median_op_err},
                          {"median_frob_err", c.median_frob_err}});
      }
      write_two_column(cfg.output_dir + "/phase_transition.dat", xy);
      summary["cells"] = std::move(jcells);
      break;
    }
    case ExperimentKind::error_scaling: {
      auto res = run_error_scaling(cfg, &rows);
      write_trial_csv(cfg.output_dir + "/trials.csv", rows);
      write_cell_csv(cfg.output_dir + "/cells.csv", name, res.cells);
      std::vector<std::pair<double, double>> xy;
      json jcells = json::array();
      for (const auto& c : res.cells) {
        xy.emplace_back(c.N, c.median_op_err);
        jcells.push_back({{"N", c.N},
                          {"median_op_err", c.median_op_err},
                          {"median_frob_err", c.median_frob_err},
                          {"bound_violation_rate", c.bound_violation_rate}});
      }
      write_two_column(cfg.output_dir + "/error_scaling.dat", xy);
      summary["cells"] = std::move(jcells);
      summary["fitted_slope"] = res.fitted_slope;
      break;
    }
    case ExperimentKind::bounds_check: {
      auto cells = run_bounds_check(cfg, &rows);
      write_trial_csv(cfg.output_dir + "/trials.csv", rows);
      write_cell_csv(cfg.output_dir + "/cells.csv", name, cells);
      std::vector<std::pair<double, double>> xy;
      json jcells = json::array();
      for (const auto& c : cells) {
        xy.emplace_back(c.N, c.bound_violation_rate);
        jcells.push_back({{"N", c.N},
                          {"median_op_err", c.median_op_err},
                          {"bound_violation_rate", c.bound_violation_rate}});
      }
      write_two_column(cfg.output_dir + "/bounds_check.dat", xy);
      summary["cells"] = std::move(jcells);
      break;
    }
    case ExperimentKind::rip_profile: {
      auto entries = run_rip_profile(cfg);
      std::ofstream out(cfg.output_dir + "/rip_profile.csv");
      if (!out) throw std::runtime_error("cannot open rip_profile.csv");
      out << "experiment,N,order,delta_hat,ratio_min,ratio_max,K1,K2,samples,failed\n";
      json jlist = json::array();
      std::map<int, std::vector<std::pair<double, double>>> per_order;
      for (const auto& [N, est] : entries) {
        out << name << ',' << N << ',' << est.order << ','
            << (est.delta_hat ? fmt17(*est.delta_hat) : "") << ',' << fmt17(est.ratio_min) << ','
            << fmt17(est.ratio_max) << ',' << fmt17(est.K1) << ',' << fmt17(est.K2) << ','
            << est.samples << ',' << (est.delta_hat ? 0 : 1) << "\n";
        json je = io::to_json(est);
        je["N"] = N;
        jlist.push_back(std::move(je));
        if (est.delta_hat) per_order[est.order].emplace_back(N, *est.delta_hat);
      }
      for (const auto& [order, xy] : per_order)
        write_two_column(cfg.output_dir + "/rip_profile_order" + std::to_string(order) + ".dat",
                         xy);
      summary["entries"] = std::move(jlist);
      break;
    }
  }
  io::write_json_file(cfg.output_dir + "/summary.json", summary);
}

}  // namespace varxid
