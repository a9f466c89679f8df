#pragma once

#include "onebit/types.hpp"

#include <vector>

namespace onebit {

/// Discrete variance-preserving schedule: beta linearly spaced on [beta_min,
/// beta_max], alpha_bar[t] the running product of (1 - beta). alpha(t)^2 +
/// sigma(t)^2 = 1 at every step; t = 0 is the clean point (alpha 1, sigma 0).
class DiffusionSchedule {
 public:
  DiffusionSchedule(int t_count, double beta_min, double beta_max);

  int steps() const { return static_cast<int>(beta_.size()); }
  double beta(int t) const { return beta_.at(t - 1); }
  double alpha_bar(int t) const { return alpha_bar_.at(t - 1); }
  double alpha(int t) const;
  double sigma(int t) const;

 private:
  std::vector<double> beta_;
  std::vector<double> alpha_bar_;
};

DiffusionSchedule build_schedule(int t_count, double beta_min, double beta_max);

/// Reverse-loop plan: K descending base timesteps t_K > ... > t_1 plus the
/// synthetic clean endpoint t_0 (alpha 1, sigma 0), with the per-step penalty
/// ladder mu_k = lambda * alpha_k^2 / sigma_k^2. Arrays are indexed by k in
/// [0, K]; mu is defined for k in [1, K].
struct SamplerPlan {
  std::vector<int> timesteps;
  std::vector<double> alphas;
  std::vector<double> sigmas;
  std::vector<double> mu;
  double lambda = 0.0;

  int nfe() const { return static_cast<int>(timesteps.size()) - 1; }
  double mu_at(int k) const { return mu.at(static_cast<size_t>(k) - 1); }
};

/// K indices uniformly spaced over [1, T], round half up, deduplicated by
/// shifting downward, in descending use order.
SamplerPlan plan_timesteps(const DiffusionSchedule& schedule, int k_count, double lambda);

}  // namespace onebit
