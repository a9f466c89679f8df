#include "onebit/schedule.hpp"

#include <cmath>

namespace onebit {

DiffusionSchedule::DiffusionSchedule(int t_count, double beta_min, double beta_max) {
  if (t_count < 2) throw std::invalid_argument("DiffusionSchedule: T must be >= 2");
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0))
    throw std::invalid_argument("DiffusionSchedule: need 0 < beta_min <= beta_max < 1");
  beta_.resize(t_count);
  alpha_bar_.resize(t_count);
  double prod = 1.0;
  for (int t = 0; t < t_count; ++t) {
    beta_[t] = beta_min + (beta_max - beta_min) * static_cast<double>(t) / (t_count - 1);
    prod *= 1.0 - beta_[t];
    alpha_bar_[t] = prod;
  }
}

double DiffusionSchedule::alpha(int t) const {
  if (t == 0) return 1.0;
  return std::sqrt(alpha_bar_.at(t - 1));
}

double DiffusionSchedule::sigma(int t) const {
  if (t == 0) return 0.0;
  return std::sqrt(1.0 - alpha_bar_.at(t - 1));
}

DiffusionSchedule build_schedule(int t_count, double beta_min, double beta_max) {
  return DiffusionSchedule(t_count, beta_min, beta_max);
}

SamplerPlan plan_timesteps(const DiffusionSchedule& schedule, int k_count, double lambda) {
  const int t_total = schedule.steps();
  if (k_count < 1 || k_count > t_total)
    throw std::invalid_argument("plan_timesteps: need 1 <= K <= T");
  if (!(lambda > 0.0)) throw std::invalid_argument("plan_timesteps: lambda must be positive");

  std::vector<int> ts(k_count + 1, 0);
  if (k_count == 1) {
    ts[1] = t_total;
  } else {
    for (int k = 1; k <= k_count; ++k) {
      const double raw = 1.0 + (static_cast<double>(k - 1)) * (t_total - 1) / (k_count - 1);
      ts[k] = static_cast<int>(std::floor(raw + 0.5));
    }
    // collisions from rounding shift downward; K <= T guarantees room
    for (int k = k_count - 1; k >= 1; --k)
      if (ts[k] >= ts[k + 1]) ts[k] = ts[k + 1] - 1;
    if (ts[1] < 1) throw std::logic_error("plan_timesteps: dedup underflow");
  }

  SamplerPlan plan;
  plan.lambda = lambda;
  plan.timesteps = std::move(ts);
  plan.alphas.resize(k_count + 1);
  plan.sigmas.resize(k_count + 1);
  plan.mu.resize(k_count);
  for (int k = 0; k <= k_count; ++k) {
    plan.alphas[k] = schedule.alpha(plan.timesteps[k]);
    plan.sigmas[k] = schedule.sigma(plan.timesteps[k]);
  }
  for (int k = 1; k <= k_count; ++k) {
    const double a = plan.alphas[k], s = plan.sigmas[k];
    plan.mu[k - 1] = lambda * (a * a) / (s * s);
  }
  return plan;
}

}  // namespace onebit
