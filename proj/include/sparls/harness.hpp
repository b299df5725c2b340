#pragma once

// Monte Carlo experiment harness: runs the sparse estimator and the dense
// baseline over a grid of SNR and Doppler rates, aggregates steady-state
// error, confidence intervals and multiplication counts, and emits a CSV
// plus a JSON run manifest. Everything is deterministic given the seed.

#include "sparls/channel.hpp"
#include "sparls/rls.hpp"
#include "sparls/sparls.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sparls {

enum class Algorithm { sparls, rls };

const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);
const char* to_string(RecursionMode m);
RecursionMode recursion_mode_from_string(const std::string& s);

struct ExperimentConfig {
  std::vector<Algorithm> algorithms = {Algorithm::sparls, Algorithm::rls};
  Index num_taps = 100;              // M
  Index sparsity = 5;                // L
  std::vector<double> snr_db = {30.0};
  std::vector<double> fd = {0.001};
  Index n_samples = 1000;
  int trials = 200;
  int iterations = 1;                // shrinkage iterations per sample (k)
  double measure_window = 0.5;       // trailing fraction of samples averaged
  std::optional<double> gamma;       // override the tabulated default
  std::optional<double> lambda;      // override the tabulated default
  RecursionMode mode = RecursionMode::definition_consistent;
  double rls_delta = 1e-2;
  std::uint64_t seed = 1;

  void validate() const;
};

// Derived quantities for one grid point.
struct ResolvedPoint {
  double snr_db = 0.0;
  double fd = 0.0;
  double sigma2 = 0.0;   // sparsity / linear SNR
  double lambda = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;    // sqrt(sigma2) / 2
};

struct TrialResult {
  double sparls_mse = 0.0;
  double rls_mse = 0.0;
  double n_stat = 0.0;   // average active-set size in this trial
  std::uint64_t sparls_adaptive = 0;
  std::uint64_t sparls_maintenance = 0;
  std::uint64_t rls_mults = 0;
};

struct AlgorithmStats {
  Algorithm algorithm = Algorithm::sparls;
  double mse = 0.0;
  double mse_db = 0.0;
  double ci_halfwidth = 0.0;          // 95% normal interval over trials
  double mults_per_sample = 0.0;
  std::uint64_t total_mults = 0;
  double n_stat = 0.0;                // sparse estimator only, else NaN
  double maintenance_per_sample = 0.0;  // sparse estimator only, else 0
};

struct PointResult {
  ResolvedPoint point;
  double ccr = 0.0;  // sparse/dense multiplication ratio; NaN unless both ran
  std::vector<AlgorithmStats> stats;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<PointResult> points;
};

// Tabulated (lambda, gamma) defaults indexed by noise variance and Doppler
// rate. Queries snap to the nearest grid entry (ties toward the smaller
// value) and clamp outside the grid with a warning on stderr.
std::pair<double, double> default_params(double sigma2, double fd);

// Deterministic per-trial seed derived from the base seed.
std::uint64_t trial_seed(std::uint64_t base_seed, int trial_index);

ResolvedPoint resolve_point(const ExperimentConfig& config, double snr_db, double fd);

// One trace, both estimators on identical data, steady-state error over the
// trailing measurement window. Failures carry the trial index.
TrialResult run_trial(const ExperimentConfig& config, const ResolvedPoint& point,
                      int trial_index);

// Full grid, trials aggregated in a fixed order.
ExperimentResult run_experiment(const ExperimentConfig& config);

// CSV with header
//   snr_db,fd,algorithm,mse,mse_db,ccr,n_stat,mults_per_sample,ci_halfwidth,seed
// one row per grid point and algorithm, full double precision, plus a JSON
// manifest next to it (csv path with a .manifest.json suffix).
void emit_results(const ExperimentResult& result, const std::string& csv_path);

std::string manifest_path_for(const std::string& csv_path);

// JSON round trip for configuration files. Unknown keys are rejected;
// missing keys keep their defaults.
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& config);

}  // namespace sparls
