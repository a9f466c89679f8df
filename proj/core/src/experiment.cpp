#include "onebit/experiment.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace onebit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

SignalVector shaped(const ExperimentConfig& cfg, Vec v) {
  if (cfg.height > 0) return SignalVector(std::move(v), cfg.height, cfg.width);
  return SignalVector(std::move(v));
}

std::string trial_record_json(const TrialRecord& rec) {
  std::ostringstream os;
  os.precision(17);
  os << "{\"trial\":" << rec.trial << ",\"seed\":" << rec.seed << ",\"config_hash\":\""
     << rec.config_hash << "\",\"tool_version\":\"" << kToolVersion
     << "\",\"wall_time_s\":" << rec.wall_time_s << ",\"metrics\":" << metric_report_json(rec.metrics)
     << "}";
  return os.str();
}

struct RecoverySetup {
  GaussianMixturePrior prior;
  DiffusionSchedule schedule;
  SamplerPlan plan;
};

RecoverySetup make_setup(const ExperimentConfig& cfg) {
  if (cfg.prior_path.empty())
    throw std::invalid_argument("config: task.prior is required");
  return RecoverySetup{GaussianMixturePrior::load(cfg.prior_path),
                       DiffusionSchedule(cfg.schedule_t, cfg.beta_min, cfg.beta_max),
                       SamplerPlan{}};
}

}  // namespace

void parallel_for(long count, int threads, const std::function<void(long)>& fn) {
  const int nthreads = std::min<long>(resolve_threads(threads), count);
  if (nthreads <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int w = 0; w < nthreads; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const long i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

ProblemInstance build_instance(const ExperimentConfig& cfg, const GaussianMixturePrior& prior,
                               long trial) {
  if (prior.dim() != cfg.n)
    throw std::invalid_argument("prior dimension does not match task.n");
  ProblemInstance problem;
  const std::uint64_t op_seed = derive_seed(cfg.seed, "problem_op", trial);
  const std::uint64_t truth_seed = derive_seed(cfg.seed, "problem_truth", trial);
  const std::uint64_t obs_seed = derive_seed(cfg.seed, "problem_obs", trial);

  if (cfg.task == TaskKind::OneBitInpainting)
    problem.op = mask_operator(op_seed, cfg.mask_ratio, cfg.n);
  else
    problem.op = gaussian_operator(op_seed, cfg.m, cfg.n);

  SignalVector truth = prior.sample(truth_seed);
  truth.height = cfg.height;
  truth.width = cfg.width;

  if (cfg.task == TaskKind::Logistic)
    problem.observation = sample_logistic(problem.op, truth.values, obs_seed);
  else
    problem.observation = quantize_onebit(problem.op, truth.values, cfg.sigma, obs_seed);

  problem.truth = std::move(truth);
  return problem;
}

DataFidelity fidelity_for(const ExperimentConfig& cfg, const OneBitObservation& obs) {
  if (obs.model == MeasurementModel::Logistic) return DataFidelity::logistic();
  const double sigma = cfg.recovery_sigma > 0.0 ? cfg.recovery_sigma : obs.sigma;
  if (!(sigma > 0.0))
    throw std::invalid_argument(
        "observation was quantized noiselessly; set recovery.sigma to a positive value");
  return DataFidelity::probit(sigma);
}

std::string run_simulate(const ExperimentConfig& cfg, const std::string& problem_path,
                         bool export_csv) {
  cfg.validate();
  const auto setup = make_setup(cfg);
  const ProblemInstance problem = build_instance(cfg, setup.prior, 0);

  fs::path path(problem_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_problem(problem_path, problem);

  json meta;
  meta["tool_version"] = kToolVersion;
  meta["config_hash"] = config_hash(cfg);
  meta["rng_algorithm"] = kRngAlgorithm;
  meta["seed"] = cfg.seed;
  meta["task"] = task_name(cfg.task);
  meta["n"] = cfg.n;
  meta["m"] = problem.op.rows();
  meta["sigma"] = cfg.sigma;
  meta["operator_id"] = problem.op.fingerprint();
  std::ofstream ms(problem_path + ".meta.json");
  if (!ms) throw IoError("cannot write sidecar for " + problem_path);
  ms << meta.dump(2) << "\n";

  if (export_csv) {
    write_vector_csv(problem_path + ".truth.csv", problem.truth->values);
    Vec bits(problem.observation->bits.size());
    for (long i = 0; i < bits.size(); ++i) bits[i] = problem.observation->bits[i];
    write_vector_csv(problem_path + ".bits.csv", bits);
  }
  return problem_path;
}

std::vector<TrialRecord> run_recover(const ExperimentConfig& cfg,
                                     const std::string& problem_path) {
  cfg.validate();
  const ProblemInstance problem = load_problem(problem_path);
  if (!problem.observation)
    throw std::invalid_argument("problem file has no observation; nothing to recover");
  const auto setup = make_setup(cfg);
  if (setup.prior.dim() != problem.op.cols())
    throw std::invalid_argument("prior dimension does not match the stored operator");
  const DataFidelity fidelity = fidelity_for(cfg, *problem.observation);
  const SamplerPlan plan =
      plan_timesteps(setup.schedule, cfg.nfe, cfg.resolved_lambda());
  const std::string hash = config_hash(cfg);

  fs::create_directories(cfg.output_dir);

  std::vector<TrialRecord> records(cfg.trials);
  std::vector<Vec> recons(cfg.trials);
  std::vector<RecoveryTrace> traces(cfg.trials);

  parallel_for(cfg.trials, cfg.threads, [&](long i) {
    RecoveryConfig rc;
    rc.lambda = cfg.resolved_lambda();
    rc.zeta = cfg.zeta;
    rc.nfe = cfg.nfe;
    rc.seed = derive_seed(cfg.seed, "trial", static_cast<std::uint64_t>(i));
    rc.inner.steps = cfg.inner_steps;
    rc.inner.learning_rate = cfg.inner_lr;
    rc.inner.method = cfg.inner_method;
    rc.inner.warm_start = cfg.warm_start;

    const auto t0 = std::chrono::steady_clock::now();
    auto [xhat, trace] =
        diff_onebit(*problem.observation, problem.op, setup.prior, plan, fidelity, rc);
    const auto t1 = std::chrono::steady_clock::now();

    TrialRecord rec;
    rec.trial = static_cast<int>(i);
    rec.seed = rc.seed;
    rec.config_hash = hash;
    rec.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    if (problem.truth) {
      SignalVector truth = *problem.truth;
      truth.height = cfg.height;
      truth.width = cfg.width;
      SignalVector est = shaped(cfg, xhat.values);
      rec.metrics = compute_metrics(problem.op, *problem.observation, est, truth, cfg.data_range);
    } else {
      rec.metrics.sign_consistency =
          sign_consistency(problem.op, xhat.values, *problem.observation);
    }
    records[i] = std::move(rec);
    recons[i] = std::move(xhat.values);
    traces[i] = std::move(trace);
  });

  for (int i = 0; i < cfg.trials; ++i) {
    std::ostringstream base;
    base << cfg.output_dir << "/recon_" << i;
    write_vector_csv(base.str() + ".csv", recons[i]);
    std::ofstream ts(cfg.output_dir + "/trace_" + std::to_string(i) + ".csv");
    if (!ts) throw IoError("cannot write trace file");
    ts << "# config_hash=" << hash << " tool_version=" << kToolVersion << "\n";
    write_trace_csv(traces[i], ts);
  }

  std::ofstream js(cfg.output_dir + "/metrics.jsonl");
  if (!js) throw IoError("cannot write metrics.jsonl");
  for (const TrialRecord& rec : records) js << trial_record_json(rec) << "\n";

  json run;
  run["tool_version"] = kToolVersion;
  run["config_hash"] = hash;
  run["rng_algorithm"] = kRngAlgorithm;
  run["problem"] = problem_path;
  run["config"] = canonical_config_string(cfg);
  std::ofstream rs(cfg.output_dir + "/run.json");
  rs << run.dump(2) << "\n";
  return records;
}

void run_sweep(const ExperimentConfig& cfg, const std::string& axis,
               const std::vector<double>& values, const std::string& out_csv) {
  cfg.validate();
  if (values.empty()) throw std::invalid_argument("sweep: empty value list");
  if (axis != "lambda" && axis != "sigma" && axis != "nfe" && axis != "zeta" &&
      axis != "measurements")
    throw std::invalid_argument("sweep: unknown axis '" + axis + "'");

  std::vector<ExperimentConfig> point_cfgs;
  for (double v : values) {
    ExperimentConfig c = cfg;
    if (axis == "lambda") c.lambda = v;
    else if (axis == "sigma") c.sigma = v;
    else if (axis == "zeta") c.zeta = v;
    else if (axis == "nfe") {
      if (v != std::floor(v)) throw std::invalid_argument("sweep: nfe values must be integers");
      c.nfe = static_cast<int>(v);
    } else {
      if (v != std::floor(v))
        throw std::invalid_argument("sweep: measurement counts must be integers");
      c.m = static_cast<int>(v);
    }
    c.validate();
    point_cfgs.push_back(std::move(c));
  }

  const auto setup = make_setup(cfg);
  const long total = static_cast<long>(values.size()) * cfg.trials;
  std::vector<TrialRecord> records(total);

  parallel_for(total, cfg.threads, [&](long job) {
    const long vi = job / cfg.trials;
    const long trial = job % cfg.trials;
    const ExperimentConfig& pc = point_cfgs[vi];

    const ProblemInstance problem = build_instance(pc, setup.prior, trial);
    const DataFidelity fidelity = fidelity_for(pc, *problem.observation);
    const DiffusionSchedule schedule(pc.schedule_t, pc.beta_min, pc.beta_max);
    const SamplerPlan plan = plan_timesteps(schedule, pc.nfe, pc.resolved_lambda());

    RecoveryConfig rc;
    rc.lambda = pc.resolved_lambda();
    rc.zeta = pc.zeta;
    rc.nfe = pc.nfe;
    // common random numbers across axis values: keyed by trial only
    rc.seed = derive_seed(cfg.seed, "trial", static_cast<std::uint64_t>(trial));
    rc.inner.steps = pc.inner_steps;
    rc.inner.learning_rate = pc.inner_lr;
    rc.inner.method = pc.inner_method;
    rc.inner.warm_start = pc.warm_start;

    const auto t0 = std::chrono::steady_clock::now();
    auto [xhat, trace] =
        diff_onebit(*problem.observation, problem.op, setup.prior, plan, fidelity, rc);
    const auto t1 = std::chrono::steady_clock::now();

    TrialRecord rec;
    rec.trial = static_cast<int>(trial);
    rec.seed = rc.seed;
    rec.config_hash = config_hash(pc);
    rec.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    rec.metrics = compute_metrics(problem.op, *problem.observation, shaped(pc, xhat.values),
                                  *problem.truth, pc.data_range);
    records[job] = std::move(rec);
  });

  fs::path path(out_csv);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(out_csv);
  if (!out) throw IoError("cannot write sweep table: " + out_csv);
  out << "# tool_version=" << kToolVersion << " config_hash=" << config_hash(cfg)
      << " axis=" << axis << "\n";
  out << "kind,axis,value,trial,seed,cosine,psnr_db,norm_rel_error,sign_consistency\n";
  out.precision(17);

  auto mean_std = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var = xs.size() > 1 ? var / static_cast<double>(xs.size() - 1) : 0.0;
    return std::make_pair(mean, std::sqrt(var));
  };

  for (size_t vi = 0; vi < values.size(); ++vi) {
    std::vector<double> cs, ps, ne, sc;
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const TrialRecord& r = records[vi * cfg.trials + trial];
      out << "trial," << axis << ',' << values[vi] << ',' << trial << ',' << r.seed << ','
          << r.metrics.cosine << ',' << r.metrics.psnr_db << ',' << r.metrics.norm_rel_error
          << ',' << r.metrics.sign_consistency << "\n";
      cs.push_back(r.metrics.cosine);
      ps.push_back(r.metrics.psnr_db);
      ne.push_back(r.metrics.norm_rel_error);
      sc.push_back(r.metrics.sign_consistency);
    }
    const auto [cm, csd] = mean_std(cs);
    const auto [pm, psd] = mean_std(ps);
    const auto [nm, nsd] = mean_std(ne);
    const auto [sm, ssd] = mean_std(sc);
    out << "aggregate," << axis << ',' << values[vi] << ",,," << cm << "±" << csd << ','
        << pm << "±" << psd << ',' << nm << "±" << nsd << ',' << sm << "±" << ssd << "\n";
  }
  if (!out) throw IoError("short write: " + out_csv);
}

OracleRunResult run_oracle(const ExperimentConfig& cfg, const std::string& problem_path,
                           const GridSpec& grid, bool null_fidelity, bool self_check,
                           const std::string& out_json) {
  const ProblemInstance problem = load_problem(problem_path);
  if (cfg.prior_path.empty()) throw std::invalid_argument("config: task.prior is required");
  const GaussianMixturePrior prior = GaussianMixturePrior::load(cfg.prior_path);
  if (problem.op.cols() > 3)
    throw std::invalid_argument("oracle: unsupported for N > 3 (grid search only)");

  OneBitObservation obs;
  DataFidelity fidelity = DataFidelity::null();
  if (!null_fidelity) {
    if (!problem.observation)
      throw std::invalid_argument("problem file has no observation; use the null fidelity");
    obs = *problem.observation;
    fidelity = fidelity_for(cfg, obs);
  } else {
    obs.bits.resize(problem.op.rows());
    obs.bits.setOnes();
  }

  OracleRunResult result;
  result.coarse = grid_map_oracle(obs, problem.op, prior, fidelity, grid, cfg.threads);
  if (self_check) {
    GridSpec fine = grid;
    fine.resolution = grid.resolution * 2;
    result.fine = grid_map_oracle(obs, problem.op, prior, fidelity, fine, cfg.threads);
    const double coarse_cell =
        (grid.hi[0] - grid.lo[0]) / static_cast<double>(grid.resolution - 1);
    result.argmin_shift_cells = (result.fine.argmin - result.coarse.argmin).norm() / coarse_cell;
    result.self_checked = true;
  }

  json j;
  j["tool_version"] = kToolVersion;
  j["config_hash"] = config_hash(cfg);
  j["resolution"] = grid.resolution;
  j["argmin"] = std::vector<double>(result.coarse.argmin.data(),
                                    result.coarse.argmin.data() + result.coarse.argmin.size());
  j["objective"] = result.coarse.objective;
  j["objective_mean"] = result.coarse.objective_mean;
  j["objective_max"] = result.coarse.objective_max;
  if (result.self_checked) {
    j["fine_resolution"] = grid.resolution * 2;
    j["fine_argmin"] = std::vector<double>(result.fine.argmin.data(),
                                           result.fine.argmin.data() + result.fine.argmin.size());
    j["fine_objective"] = result.fine.objective;
    j["argmin_shift_cells"] = result.argmin_shift_cells;
  }
  fs::path path(out_json);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(out_json);
  if (!out) throw IoError("cannot write oracle result: " + out_json);
  out << j.dump(2) << "\n";
  return result;
}

GradCheckReport run_gradcheck(std::uint64_t seed, double perturb, int instances_per_family) {
  GradCheckReport report;
  report.instances_per_family = instances_per_family;

  auto run_family = [&](FidelityFamily family) {
    double worst = 0.0;
    for (int inst = 0; inst < instances_per_family; ++inst) {
      // resample until no measurement sits in the saturated regime
      for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(seed, family == FidelityFamily::Probit ? "gradcheck_probit" : "gradcheck_logistic",
                static_cast<std::uint64_t>(inst) * 1000 + attempt);
        const int n = 1 + static_cast<int>(rng.uniform_int(8));
        const int m = 1 + static_cast<int>(rng.uniform_int(32));
        Mat a(m, n);
        const double sd = 1.0 / std::sqrt(static_cast<double>(m));
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < n; ++j) a(i, j) = sd * rng.normal();
        const LinearOperator op = LinearOperator::dense(std::move(a));
        const Vec x = rng.normal_vec(n);
        const double sigma = 0.25 + rng.uniform();

        DataFidelity fidelity = family == FidelityFamily::Probit ? DataFidelity::probit(sigma)
                                                                 : DataFidelity::logistic();
        OneBitObservation obs;
        obs.model = family == FidelityFamily::Probit ? MeasurementModel::ProbitSign
                                                     : MeasurementModel::Logistic;
        obs.sigma = family == FidelityFamily::Probit ? sigma : 0.0;
        obs.bits.resize(m);
        for (int i = 0; i < m; ++i) obs.bits[i] = rng.uniform() < 0.5 ? -1 : 1;

        const Vec u = op.apply(x);
        bool saturated = false;
        if (family == FidelityFamily::Probit)
          for (long i = 0; i < u.size(); ++i)
            if (std::abs(u[i] / sigma) > 30.0) saturated = true;
        if (saturated) continue;

        Vec ga = fidelity.nll_grad(obs, op, x);
        if (perturb != 0.0) ga[0] += perturb;
        const Vec gf = finite_diff_grad(
            [&](const Vec& v) { return fidelity.nll(obs, op, v); }, x, 1e-5);
        const double rel = (ga - gf).norm() / std::max(ga.norm(), 1e-12);
        worst = std::max(worst, rel);
        break;
      }
    }
    return worst;
  };

  report.max_rel_error_probit = run_family(FidelityFamily::Probit);
  report.max_rel_error_logistic = run_family(FidelityFamily::Logistic);
  report.pass =
      report.max_rel_error_probit < 1e-6 && report.max_rel_error_logistic < 1e-6;
  return report;
}

std::vector<TrialRecord> run_metrics(const ExperimentConfig& cfg, const std::string& problem_path,
                                     const std::vector<std::string>& recon_csvs,
                                     const std::string& out_jsonl) {
  const ProblemInstance problem = load_problem(problem_path);
  if (!problem.truth)
    throw std::invalid_argument("problem file has no ground truth; metrics need it");
  if (!problem.observation)
    throw std::invalid_argument("problem file has no observation; metrics need it");
  const std::string hash = config_hash(cfg);

  std::vector<TrialRecord> records;
  for (size_t i = 0; i < recon_csvs.size(); ++i) {
    const Vec xhat = read_vector_csv(recon_csvs[i]);
    if (xhat.size() != problem.op.cols())
      throw std::invalid_argument("reconstruction length mismatch: " + recon_csvs[i]);
    SignalVector truth = *problem.truth;
    truth.height = cfg.height;
    truth.width = cfg.width;
    TrialRecord rec;
    rec.trial = static_cast<int>(i);
    rec.seed = cfg.seed;
    rec.config_hash = hash;
    rec.metrics =
        compute_metrics(problem.op, *problem.observation, shaped(cfg, xhat), truth, cfg.data_range);
    records.push_back(std::move(rec));
  }

  if (!out_jsonl.empty()) {
    fs::path path(out_jsonl);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(out_jsonl);
    if (!out) throw IoError("cannot write " + out_jsonl);
    for (const TrialRecord& rec : records) out << trial_record_json(rec) << "\n";
  }
  return records;
}

}  // namespace onebit
