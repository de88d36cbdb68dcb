// varxid CLI: simulate datasets, fit estimates, and run the batch experiments.
// Exit codes: 0 success, 2 configuration / usage problem, 3 numerical failure.
#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "varxid/estimators.hpp"
#include "varxid/experiments.hpp"
#include "varxid/io.hpp"
#include "varxid/rng.hpp"

using namespace varxid;
namespace fs = std::filesystem;

namespace {

struct ExperimentCli {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int trials = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  ExperimentKind kind = ExperimentKind::phase_transition;
};

struct SimulateCli {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

struct EstimateCli {
  std::string data_dir;
  std::string config_path;
  std::string out_dir = "out";
  std::string method = "nuclear";
  double lambda = 0.0;
  CLI::Option* lambda_opt = nullptr;
};

ExperimentConfig load_config_checked(const std::string& path) {
  try {
    return load_config(path);
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw config_error(std::string("cannot load '") + path + "': " + e.what());
  }
}

void run_experiment_cmd(const ExperimentCli& cli, const std::string& name) {
  ExperimentConfig cfg = load_config_checked(cli.config_path);
  cfg.experiment = cli.kind;
  if (*cli.seed_opt) cfg.master_seed = cli.seed;
  if (*cli.out_opt) cfg.output_dir = cli.out_dir;
  if (*cli.trials_opt) cfg.trials_per_cell = cli.trials;
  validate(cfg);
  run_experiment(cfg);
  std::printf("%s: outputs under %s\n", name.c_str(), cfg.output_dir.c_str());
}

void run_simulate_cmd(const SimulateCli& cli) {
  ExperimentConfig cfg = load_config_checked(cli.config_path);
  if (*cli.seed_opt) cfg.master_seed = cli.seed;
  if (*cli.out_opt) cfg.output_dir = cli.out_dir;
  if (cfg.N_grid.empty()) throw config_error("N_grid must contain at least one sample count");

  const int N = cfg.N_grid.front();
  SystemModel model = generate_system(cfg.n, cfg.m, cfg.r, cfg.spectral_radius_cap, cfg.singulars,
                                      derive_seed(cfg.master_seed, 1));
  RegressionData data = collect_repeated(model, N, cfg.T0, cfg.input_spec(), cfg.noise_spec(),
                                         derive_seed(cfg.master_seed, 2));

  fs::create_directories(cfg.output_dir);
  nlohmann::json sys;
  sys["A"] = io::matrix_to_json(model.A);
  sys["B"] = io::matrix_to_json(model.B);
  sys["rank_r"] = model.rank_r;
  sys["T0"] = cfg.T0;
  sys["N"] = N;
  sys["sigma_u"] = cfg.sigma_u;
  sys["sigma_w"] = cfg.sigma_w;
  sys["seed"] = cfg.master_seed;
  io::write_json_file(cfg.output_dir + "/system.json", sys);
  io::write_json_file(cfg.output_dir + "/data.json", io::to_json(data));
  io::save_regression_csv(cfg.output_dir, data);
  std::printf("simulate: N=%d trajectories (n=%d, m=%d, T0=%d) under %s\n", N, cfg.n, cfg.m,
              cfg.T0, cfg.output_dir.c_str());
}

SolverConfig solver_from_optional_config(const std::string& path) {
  SolverConfig s;
  if (path.empty()) return s;
  try {
    nlohmann::json j = io::read_json_file(path);
    if (j.contains("solver")) {
      const auto& js = j.at("solver");
      if (js.contains("max_iters")) s.max_iters = js.at("max_iters").get<int>();
      if (js.contains("rel_tol")) s.rel_tol = js.at("rel_tol").get<double>();
      if (js.contains("kkt_tol")) s.kkt_tol = js.at("kkt_tol").get<double>();
      if (js.contains("admm_rho")) s.admm_rho = js.at("admm_rho").get<double>();
      if (js.contains("acceleration")) s.acceleration = js.at("acceleration").get<bool>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad solver config: ") + e.what());
  } catch (const std::exception& e) {
    throw config_error(std::string("cannot load '") + path + "': " + e.what());
  }
  return s;
}

void run_estimate_cmd(const EstimateCli& cli) {
  if (cli.method == "nuclear" && !*cli.lambda_opt)
    throw config_error("--lambda is required when --method nuclear");

  RegressionData data;
  try {
    data = io::load_regression_csv(cli.data_dir);
  } catch (const std::exception& e) {
    throw config_error(std::string("cannot load data from '") + cli.data_dir + "': " + e.what());
  }

  SolverConfig solver = solver_from_optional_config(cli.config_path);
  Estimate est;
  if (cli.method == "ls")
    est = least_squares(data);
  else if (cli.method == "nuclear")
    est = nuclear_reg_solve(data, cli.lambda, solver);
  else
    est = nuclear_min_exact(data, solver);

  fs::create_directories(cli.out_dir);
  io::write_json_file(cli.out_dir + "/estimate.json", io::to_json(est));
  std::printf(
      "estimate: method=%s iters=%d converged=%d kkt_residual=%.3g objective=%.6g -> "
      "%s/estimate.json\n",
      cli.method.c_str(), est.iters, est.converged ? 1 : 0, est.kkt_residual, est.objective,
      cli.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "identify low-rank coefficient matrices of linear dynamical systems from repeated "
      "input-state samples"};
  app.require_subcommand(1);

  SimulateCli sim;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "draw a random system and write one repeated-sampling dataset");
  sim_cmd->add_option("--config", sim.config_path, "experiment JSON (n, m, r, T0, N_grid, ...)")
      ->required();
  sim.seed_opt = sim_cmd->add_option("--seed", sim.seed, "override master_seed");
  sim.out_opt = sim_cmd->add_option("--out", sim.out_dir, "override output directory");
  sim_cmd->callback([&sim] { run_simulate_cmd(sim); });

  EstimateCli est;
  auto* est_cmd = app.add_subcommand("estimate", "fit a coefficient matrix to a saved dataset");
  est_cmd->add_option("--data", est.data_dir, "directory holding Z.csv and X.csv")->required();
  est_cmd->add_option("--method", est.method, "ls | nuclear | exact (default nuclear)")
      ->check(CLI::IsMember({"ls", "nuclear", "exact"}));
  est.lambda_opt = est_cmd->add_option("--lambda", est.lambda, "nuclear-norm penalty weight");
  est_cmd->add_option("--config", est.config_path,
                      "JSON file whose solver block tunes the optimizer");
  est_cmd->add_option("--out", est.out_dir, "output directory (default out)");
  est_cmd->callback([&est] { run_estimate_cmd(est); });

  std::array<ExperimentCli, 4> exps;
  const std::array<std::pair<const char*, ExperimentKind>, 4> kinds = {{
      {"phase-transition", ExperimentKind::phase_transition},
      {"error-scaling", ExperimentKind::error_scaling},
      {"bounds-check", ExperimentKind::bounds_check},
      {"rip-profile", ExperimentKind::rip_profile},
  }};
  const std::array<const char*, 4> descs = {
      "noiseless recovery success rate across sample counts",
      "operator-norm error decay against its predicted envelopes",
      "per-trial penalty premise and error-chain verification",
      "sampled restricted-isometry distortion across probe orders",
  };
  for (int i = 0; i < 4; ++i) {
    ExperimentCli& e = exps[i];
    e.kind = kinds[i].second;
    auto* cmd = app.add_subcommand(kinds[i].first, descs[i]);
    cmd->add_option("--config", e.config_path, "experiment JSON")->required();
    e.seed_opt = cmd->add_option("--seed", e.seed, "override master_seed");
    e.out_opt = cmd->add_option("--out", e.out_dir, "override output directory");
    e.trials_opt =
        cmd->add_option("--trials", e.trials, "override trials_per_cell")->check(CLI::PositiveNumber);
    const std::string name = kinds[i].first;
    cmd->callback([&e, name] { run_experiment_cmd(e, name); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
