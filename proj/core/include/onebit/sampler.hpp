#pragma once

#include "onebit/likelihood.hpp"
#include "onebit/measurement.hpp"
#include "onebit/prior.hpp"
#include "onebit/schedule.hpp"
#include "onebit/types.hpp"

#include <utility>
#include <vector>

namespace onebit {

enum class InnerMethod { Adam, GradientDescent };
enum class WarmStart { FromZ, FromPrevious };

struct InnerSolverConfig {
  int steps = 100;
  double learning_rate = 0.25;
  InnerMethod method = InnerMethod::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  WarmStart warm_start = WarmStart::FromZ;
};

struct RecoveryConfig {
  double lambda = 0.02;
  double zeta = 0.0;  // 0 = fully deterministic reverse process
  int nfe = 20;
  std::uint64_t seed = 0;
  InnerSolverConfig inner;
};

struct TraceRecord {
  int timestep = 0;
  double mu = 0.0;
  double inner_objective = 0.0;  // L(x_hat) + mu/2 ||x_hat - z||^2
  double coupling_dist = 0.0;    // ||x_hat - z||
  double nll = 0.0;              // L(x_hat)
};
using RecoveryTrace = std::vector<TraceRecord>;

/// Proximal data step: approximately minimizes
///   L(x; y) + mu/2 ||x - z_tilde||^2
/// with the configured first-order method starting from `init`. Tracks the
/// best iterate seen (including the start), so the returned objective never
/// exceeds the objective at the start point.
Vec x_update_from(const Vec& init, const Vec& z_tilde, double mu, const DataFidelity& fidelity,
                  const OneBitObservation& obs, const LinearOperator& op,
                  const InnerSolverConfig& cfg);

/// x_update with the spec'd default initialization at z_tilde.
Vec x_update(const Vec& z_tilde, double mu, const DataFidelity& fidelity,
             const OneBitObservation& obs, const LinearOperator& op,
             const InnerSolverConfig& cfg);

/// The reverse recovery loop. Starting from x ~ N(0, I), for k = K..1:
///
///   z      = denoiser(x, alpha_k, sigma_k)
///   x_hat  = argmin_x L(x; y) + mu_k/2 ||x - z||^2      (x_update)
///   eps~   = (x - alpha_k x_hat) / sigma_k
///   x      = alpha_{k-1} x_hat + sigma_{k-1} (sqrt(1-zeta) eps~ + sqrt(zeta) eps)
///
/// with eps drawn per plan step from a stream keyed by (seed, k) when
/// zeta > 0; zeta = 0 takes eps~ unchanged and consumes no randomness beyond
/// the initial sample, so equal seeds give bit-identical outputs.
std::pair<SignalVector, RecoveryTrace> diff_onebit(const OneBitObservation& obs,
                                                   const LinearOperator& op,
                                                   const Denoiser& denoiser,
                                                   const SamplerPlan& plan,
                                                   const DataFidelity& fidelity,
                                                   const RecoveryConfig& cfg);

/// | ||x_hat|| - ||x_true|| | / ||x_true||.
double recover_norm_error(const Vec& x_hat, const Vec& x_true);

void write_trace_csv(const RecoveryTrace& trace, std::ostream& out);

}  // namespace onebit
