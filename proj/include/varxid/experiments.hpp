#pragma once

#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "varxid/certify.hpp"
#include "varxid/estimators.hpp"
#include "varxid/simulate.hpp"

namespace varxid {

// invalid or inconsistent experiment configuration (CLI exit code 2)
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { phase_transition, error_scaling, bounds_check, rip_profile };

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::phase_transition;
  int n = 0, m = 0, r = 0, T0 = 2;
  std::vector<int> N_grid;
  int trials_per_cell = 50;
  DistFamily input_family = DistFamily::gaussian;
  std::optional<DistFamily> noise_family;  // absent = noiseless
  double sigma_u = 1.0, sigma_w = 0.0;
  double spectral_radius_cap = 0.9;
  SingularSpec singulars;
  std::uint64_t master_seed = 0;
  SolverConfig solver;
  std::string output_dir = "out";

  DistSpec input_spec() const;
  std::optional<DistSpec> noise_spec() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& cfg);  // throws config_error

// one row of the stable per-trial CSV schema:
// experiment,N,trial,seed,success,op_err,frob_err,nuc_err,lambda,kkt_residual,
// premise_held,bound,violated,wall_ms
struct TrialRecord {
  std::string experiment;
  int N = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  int success = 0;
  double op_err = 0.0, frob_err = 0.0, nuc_err = 0.0;
  double lambda = 0.0;
  double kkt_residual = 0.0;
  int premise_held = 0;
  double bound = 0.0;
  int violated = 0;
  long wall_ms = 0;
};

struct CellResult {
  int N = 0;
  double success_rate = 0.0;
  double median_op_err = 0.0;
  double median_frob_err = 0.0;
  double bound_violation_rate = 0.0;  // over premise-holding trials
  long wall_ms = 0;
};

struct RipProfileEntry {
  int N = 0;
  WeakRipEstimate estimate;
};

struct ErrorScalingResult {
  std::vector<CellResult> cells;
  double fitted_slope = 0.0;  // log median op err vs log N
};

// worker count: VARXID_THREADS when set (>=1), else hardware concurrency
int worker_count();

std::vector<CellResult> run_phase_transition(const ExperimentConfig& cfg,
                                             std::vector<TrialRecord>* rows = nullptr);
ErrorScalingResult run_error_scaling(const ExperimentConfig& cfg,
                                     std::vector<TrialRecord>* rows = nullptr);
std::vector<CellResult> run_bounds_check(const ExperimentConfig& cfg,
                                         std::vector<TrialRecord>* rows = nullptr);
std::vector<RipProfileEntry> run_rip_profile(const ExperimentConfig& cfg);

void write_trial_csv(const std::string& path, const std::vector<TrialRecord>& rows);
void write_cell_csv(const std::string& path, const std::string& experiment,
                    const std::vector<CellResult>& cells);

// runs the configured experiment and writes trials.csv / summary.json / plot .dat files
// (plus config.json echo) under cfg.output_dir
void run_experiment(const ExperimentConfig& cfg);

double median(std::vector<double> v);

}  // namespace varxid
