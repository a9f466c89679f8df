#include <benchmark/benchmark.h>

#include "onebit/likelihood.hpp"
#include "onebit/prior.hpp"
#include "onebit/sampler.hpp"
#include "onebit/schedule.hpp"

using namespace onebit;

namespace {

void BM_LogNormCdf(benchmark::State& state) {
  double u = -35.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_norm_cdf(u));
    u += 0.001;
    if (u > 8.0) u = -35.0;
  }
}
BENCHMARK(BM_LogNormCdf);

void BM_InverseMills(benchmark::State& state) {
  double u = -35.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(inverse_mills(u));
    u += 0.001;
    if (u > 8.0) u = -35.0;
  }
}
BENCHMARK(BM_InverseMills);

void BM_ProbitNllGrad(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto op = gaussian_operator(1, m, 128);
  Rng rng(2);
  const Vec x = rng.normal_vec(128);
  const auto obs = quantize_onebit(op, x, 0.5, 3);
  const auto fidelity = DataFidelity::probit(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(fidelity.nll_grad(obs, op, x));
  state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_ProbitNllGrad)->Arg(32)->Arg(128)->Arg(512);

void BM_GmmDenoise(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(4);
  GaussianMixturePrior prior({0.5, 0.5}, {rng.normal_vec(n), rng.normal_vec(n)}, {0.8, 0.8});
  const Vec xt = rng.normal_vec(n);
  for (auto _ : state) benchmark::DoNotOptimize(prior.denoise(xt, 0.7, 0.6));
}
BENCHMARK(BM_GmmDenoise)->Arg(16)->Arg(128)->Arg(1024);

void BM_XUpdate(benchmark::State& state) {
  const auto op = gaussian_operator(5, 64, 2);
  Rng rng(6);
  Vec truth(2);
  truth << 1.2, -0.8;
  const auto obs = quantize_onebit(op, truth, 0.5, 7);
  const auto fidelity = DataFidelity::probit(0.5);
  const Vec z = rng.normal_vec(2);
  for (auto _ : state)
    benchmark::DoNotOptimize(x_update(z, 1.0, fidelity, obs, op, InnerSolverConfig{}));
}
BENCHMARK(BM_XUpdate);

void BM_DiffOneBit(benchmark::State& state) {
  const int n = 64, m = 32;
  Rng rng(8);
  GaussianMixturePrior prior({0.5, 0.5}, {rng.normal_vec(n), rng.normal_vec(n)}, {1.0, 1.0});
  const auto op = gaussian_operator(9, m, n);
  const auto obs = quantize_onebit(op, prior.sample(10).values, 0.5, 11);
  const auto schedule = build_schedule(1000, 1e-4, 0.02);
  const auto plan = plan_timesteps(schedule, 20, 0.5);
  const auto fidelity = DataFidelity::probit(0.5);
  RecoveryConfig cfg;
  cfg.lambda = 0.5;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(diff_onebit(obs, op, prior, plan, fidelity, cfg));
  }
}
BENCHMARK(BM_DiffOneBit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
