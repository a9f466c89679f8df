// Command-line harness for 1-bit signal recovery experiments.
//
// Subcommands: simulate, recover, sweep, oracle, gradcheck, metrics.
// Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O error.

#include <CLI11.hpp>

#include "onebit/experiment.hpp"

#include <iostream>

using namespace onebit;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file");
  cmd->add_option("--set", args.overrides,
                  "override a config value, e.g. --set recovery.lambda=0.05");
}

void add_mirror_flags(CLI::App* cmd, CommonArgs& args) {
  // Direct flags are sugar for --set on the matching key.
  auto mirror = [&args, cmd](const std::string& flag, const std::string& key,
                             const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&args, key](const std::string& v) { args.overrides.push_back(key + "=" + v); },
        help);
  };
  mirror("--task", "task.kind", "onebit_cs | logistic | onebit_inpainting");
  mirror("--n", "task.n", "signal dimension");
  mirror("--m", "task.m", "measurement count");
  mirror("--mask-ratio", "task.mask_ratio", "inpainting mask ratio in (0,1]");
  mirror("--sigma", "task.sigma", "pre-quantization noise std");
  mirror("--prior", "task.prior", "mixture prior file");
  mirror("--height", "task.height", "image height (enables SSIM)");
  mirror("--width", "task.width", "image width (enables SSIM)");
  mirror("--schedule-t", "schedule.t", "base schedule steps");
  mirror("--beta-min", "schedule.beta_min", "schedule beta_min");
  mirror("--beta-max", "schedule.beta_max", "schedule beta_max");
  mirror("--lambda", "recovery.lambda", "penalty coefficient");
  mirror("--zeta", "recovery.zeta", "stochasticity level in [0,1]");
  mirror("--nfe", "recovery.nfe", "denoiser evaluations (outer steps)");
  mirror("--inner-steps", "recovery.inner_steps", "inner solver steps");
  mirror("--inner-lr", "recovery.inner_lr", "inner solver learning rate");
  mirror("--inner-method", "recovery.inner_method", "adam | gd");
  mirror("--warm-start", "recovery.warm_start", "from_z | from_previous");
  mirror("--recovery-sigma", "recovery.sigma", "probit sigma assumed by recovery");
  mirror("--trials", "run.trials", "number of trials");
  mirror("--seed", "run.seed", "base RNG seed");
  mirror("--output", "run.output", "output directory");
  mirror("--threads", "run.threads", "worker threads (0 = hardware)");
  mirror("--data-range", "run.data_range", "PSNR/SSIM data range");
}

ExperimentConfig resolve_config(const CommonArgs& args) {
  ExperimentConfig cfg;
  if (!args.config_path.empty()) cfg = load_config(args.config_path);
  for (const std::string& kv : args.overrides) apply_override(cfg, kv);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-bit quantized measurement recovery with plug-and-play diffusion priors"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CommonArgs args;

  auto* sim = app.add_subcommand("simulate", "simulate a problem instance and write an OBIT1 file");
  std::string problem_path = "problem.obit1";
  bool export_csv = false;
  add_common(sim, args);
  add_mirror_flags(sim, args);
  sim->add_option("--problem", problem_path, "output problem file");
  sim->add_flag("--export-csv", export_csv, "also write truth/bits CSV next to the problem file");

  auto* rec = app.add_subcommand("recover", "run recoveries of a stored problem");
  add_common(rec, args);
  add_mirror_flags(rec, args);
  rec->add_option("--problem", problem_path, "input problem file")->required();

  auto* swp = app.add_subcommand("sweep", "sweep one axis and tabulate metrics");
  std::string axis;
  std::vector<double> sweep_values;
  std::string sweep_out = "sweep.csv";
  add_common(swp, args);
  add_mirror_flags(swp, args);
  swp->add_option("--axis", axis, "lambda | sigma | nfe | zeta | measurements")->required();
  swp->add_option("--values", sweep_values, "axis values")->required()->expected(-1);
  swp->add_option("--out", sweep_out, "output CSV table");

  auto* orc = app.add_subcommand("oracle", "exhaustive grid minimizer of the exact MAP objective");
  double grid_lo = -4.0, grid_hi = 4.0;
  int grid_res = 256;
  bool null_fidelity = false, self_check = false;
  std::string oracle_out = "oracle.json";
  add_common(orc, args);
  add_mirror_flags(orc, args);
  orc->add_option("--problem", problem_path, "input problem file")->required();
  orc->add_option("--lo", grid_lo, "grid lower bound (all dimensions)");
  orc->add_option("--hi", grid_hi, "grid upper bound (all dimensions)");
  orc->add_option("--resolution", grid_res, "grid points per dimension (>= 64)");
  orc->add_flag("--null-fidelity", null_fidelity, "ignore measurements (prior-only MAP)");
  orc->add_flag("--self-check", self_check, "re-run at doubled resolution and report the shift");
  orc->add_option("--out", oracle_out, "output JSON file");

  auto* grd = app.add_subcommand("gradcheck", "analytic vs finite-difference gradient suite");
  std::uint64_t grad_seed = 12345;
  double grad_perturb = 0.0;
  grd->add_option("--seed", grad_seed, "suite seed");
  grd->add_option("--perturb", grad_perturb, "inject a gradient error (negative control)");

  auto* met = app.add_subcommand("metrics", "recompute metrics for stored reconstructions");
  std::vector<std::string> recon_paths;
  std::string metrics_out;
  add_common(met, args);
  add_mirror_flags(met, args);
  met->add_option("--problem", problem_path, "input problem file")->required();
  met->add_option("--recon", recon_paths, "reconstruction CSV files")->required()->expected(-1);
  met->add_option("--out", metrics_out, "output JSONL (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      const ExperimentConfig cfg = resolve_config(args);
      run_simulate(cfg, problem_path, export_csv);
      std::cout << "wrote " << problem_path << " (config " << config_hash(cfg) << ")\n";
    } else if (rec->parsed()) {
      const ExperimentConfig cfg = resolve_config(args);
      const auto records = run_recover(cfg, problem_path);
      std::cout << "ran " << records.size() << " trial(s) into " << cfg.output_dir << "\n";
    } else if (swp->parsed()) {
      const ExperimentConfig cfg = resolve_config(args);
      run_sweep(cfg, axis, sweep_values, sweep_out);
      std::cout << "wrote " << sweep_out << "\n";
    } else if (orc->parsed()) {
      const ExperimentConfig cfg = resolve_config(args);
      const int dim = load_problem(problem_path).op.cols();
      GridSpec grid{Vec::Constant(dim, grid_lo), Vec::Constant(dim, grid_hi), grid_res};
      const auto result = run_oracle(cfg, problem_path, grid, null_fidelity, self_check, oracle_out);
      std::cout << "argmin at [" << result.coarse.argmin.transpose() << "], objective "
                << result.coarse.objective << "\n";
      if (result.self_checked)
        std::cout << "resolution-doubling shift: " << result.argmin_shift_cells
                  << " coarse cells\n";
    } else if (grd->parsed()) {
      const auto report = run_gradcheck(grad_seed, grad_perturb);
      std::cout << "gradcheck: probit max rel err " << report.max_rel_error_probit
                << ", logistic max rel err " << report.max_rel_error_logistic << " -> "
                << (report.pass ? "pass" : "FAIL") << "\n";
      if (!report.pass) return 3;
    } else if (met->parsed()) {
      const ExperimentConfig cfg = resolve_config(args);
      const auto records = run_metrics(cfg, problem_path, recon_paths, metrics_out);
      if (metrics_out.empty())
        for (const auto& r : records)
          std::cout << "trial " << r.trial << ": cosine " << r.metrics.cosine << ", psnr "
                    << r.metrics.psnr_db << " dB\n";
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 4;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
