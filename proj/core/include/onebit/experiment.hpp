#pragma once

#include "onebit/config.hpp"
#include "onebit/metrics.hpp"
#include "onebit/oracle.hpp"
#include "onebit/problem_io.hpp"
#include "onebit/sampler.hpp"

#include <functional>
#include <string>
#include <vector>

namespace onebit {

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  MetricReport metrics;
  double wall_time_s = 0.0;
  std::string config_hash;
};

/// Runs fn(0..count-1) on a worker pool; results must go to per-index slots.
/// The first exception thrown by any worker is rethrown after join.
void parallel_for(long count, int threads, const std::function<void(long)>& fn);

/// Deterministic per-trial problem construction shared by simulate and sweep:
/// operator, truth (drawn from the prior) and observation streams are keyed
/// by (seed, "problem_op"/"problem_truth"/"problem_obs", trial).
ProblemInstance build_instance(const ExperimentConfig& cfg, const GaussianMixturePrior& prior,
                               long trial);

/// Resolves the data-fidelity for an observation under this config
/// (matched sigma unless recovery.sigma overrides it).
DataFidelity fidelity_for(const ExperimentConfig& cfg, const OneBitObservation& obs);

/// simulate: writes the OBIT1 problem file, a JSON metadata sidecar, and
/// (optionally) truth/bits CSV exports. Returns the problem path.
std::string run_simulate(const ExperimentConfig& cfg, const std::string& problem_path,
                         bool export_csv = false);

/// recover: runs cfg.trials recoveries of a stored problem, writing
/// recon_<trial>.csv, trace_<trial>.csv, metrics.jsonl and run.json into
/// cfg.output_dir. Returns the trial records in trial order.
std::vector<TrialRecord> run_recover(const ExperimentConfig& cfg, const std::string& problem_path);

/// sweep: cross-product of axis values x trials with common random numbers
/// across values; one CSV row per (value, trial) plus one aggregate row
/// (mean +- sample std) per value.
void run_sweep(const ExperimentConfig& cfg, const std::string& axis,
               const std::vector<double>& values, const std::string& out_csv);

struct OracleRunResult {
  GridMapResult coarse;
  bool self_checked = false;
  GridMapResult fine;            // resolution doubled, when self_checked
  double argmin_shift_cells = 0.0;  // displacement in coarse cells
};

OracleRunResult run_oracle(const ExperimentConfig& cfg, const std::string& problem_path,
                           const GridSpec& grid, bool null_fidelity, bool self_check,
                           const std::string& out_json);

struct GradCheckReport {
  int instances_per_family = 0;
  double max_rel_error_probit = 0.0;
  double max_rel_error_logistic = 0.0;
  bool pass = false;
};

/// 100 random instances per fidelity family, analytic gradient vs central
/// finite differences (h = 1e-5), instances resampled away from saturation.
/// `perturb` injects an error into the analytic gradient (negative control).
GradCheckReport run_gradcheck(std::uint64_t seed, double perturb = 0.0,
                              int instances_per_family = 100);

/// metrics: recompute metric reports for stored reconstruction vectors.
std::vector<TrialRecord> run_metrics(const ExperimentConfig& cfg, const std::string& problem_path,
                                     const std::vector<std::string>& recon_csvs,
                                     const std::string& out_jsonl);

}  // namespace onebit
