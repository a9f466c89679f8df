#include "onebit/sampler.hpp"

#include <cmath>
#include <ostream>

namespace onebit {

namespace {

double coupled_objective(const Vec& x, const Vec& z, double mu, const DataFidelity& fidelity,
                         const OneBitObservation& obs, const LinearOperator& op) {
  return fidelity.nll(obs, op, x) + 0.5 * mu * (x - z).squaredNorm();
}

}  // namespace

Vec x_update_from(const Vec& init, const Vec& z_tilde, double mu, const DataFidelity& fidelity,
                  const OneBitObservation& obs, const LinearOperator& op,
                  const InnerSolverConfig& cfg) {
  if (!(mu > 0.0)) throw std::invalid_argument("x_update: mu must be positive");
  if (!z_tilde.allFinite() || !init.allFinite())
    throw std::invalid_argument("x_update: non-finite start point");
  if (cfg.steps < 1 || !(cfg.learning_rate > 0.0))
    throw std::invalid_argument("x_update: bad inner solver config");

  Vec x = init;
  Vec best = x;
  double best_f = coupled_objective(x, z_tilde, mu, fidelity, obs, op);

  Vec m = Vec::Zero(x.size());
  Vec v = Vec::Zero(x.size());
  for (int t = 1; t <= cfg.steps; ++t) {
    Vec g = fidelity.nll_grad(obs, op, x) + mu * (x - z_tilde);
    if (cfg.method == InnerMethod::Adam) {
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
      const double bc1 = 1.0 - std::pow(cfg.beta1, t);
      const double bc2 = 1.0 - std::pow(cfg.beta2, t);
      const Vec denom = (v / bc2).cwiseSqrt() + Vec::Constant(x.size(), cfg.eps);
      x -= cfg.learning_rate * (m / bc1).cwiseQuotient(denom);
    } else {
      x -= cfg.learning_rate * g;
    }
    const double f = coupled_objective(x, z_tilde, mu, fidelity, obs, op);
    if (std::isfinite(f) && f < best_f) {
      best_f = f;
      best = x;
    }
  }
  return best;
}

Vec x_update(const Vec& z_tilde, double mu, const DataFidelity& fidelity,
             const OneBitObservation& obs, const LinearOperator& op,
             const InnerSolverConfig& cfg) {
  return x_update_from(z_tilde, z_tilde, mu, fidelity, obs, op, cfg);
}

std::pair<SignalVector, RecoveryTrace> diff_onebit(const OneBitObservation& obs,
                                                   const LinearOperator& op,
                                                   const Denoiser& denoiser,
                                                   const SamplerPlan& plan,
                                                   const DataFidelity& fidelity,
                                                   const RecoveryConfig& cfg) {
  const int k_count = plan.nfe();
  if (k_count < 1) throw std::invalid_argument("diff_onebit: empty plan");
  for (int k = 1; k <= k_count; ++k)
    if (!(plan.sigmas[k] > 0.0))
      throw std::invalid_argument("diff_onebit: plan has sigma = 0 at an interior step");
  if (!(cfg.zeta >= 0.0 && cfg.zeta <= 1.0))
    throw std::invalid_argument("diff_onebit: zeta must lie in [0,1]");
  const long n = op.cols();
  if (denoiser.dim() != n) throw std::invalid_argument("diff_onebit: denoiser dimension mismatch");

  Rng init_rng(cfg.seed, "diff_onebit/init", 0);
  Vec x = init_rng.normal_vec(n);

  RecoveryTrace trace;
  trace.reserve(k_count);
  Vec x_hat;
  for (int k = k_count; k >= 1; --k) {
    const double a = plan.alphas[k], s = plan.sigmas[k];
    const double ap = plan.alphas[k - 1], sp = plan.sigmas[k - 1];
    const double mu = plan.mu_at(k);

    const Vec z = denoiser.denoise(x, a, s);
    if (!z.allFinite()) throw NumericalFailure("diff_onebit: denoiser output not finite", k);

    const Vec& start = (cfg.inner.warm_start == WarmStart::FromPrevious && !trace.empty())
                           ? x_hat
                           : z;
    x_hat = x_update_from(start, z, mu, fidelity, obs, op, cfg.inner);
    if (!x_hat.allFinite()) throw NumericalFailure("diff_onebit: x_update output not finite", k);

    TraceRecord rec;
    rec.timestep = plan.timesteps[k];
    rec.mu = mu;
    rec.nll = fidelity.nll(obs, op, x_hat);
    rec.coupling_dist = (x_hat - z).norm();
    rec.inner_objective = rec.nll + 0.5 * mu * rec.coupling_dist * rec.coupling_dist;
    trace.push_back(rec);

    const Vec eps_tilde = (x - a * x_hat) / s;
    if (cfg.zeta > 0.0) {
      Rng step_rng(cfg.seed, "diff_onebit/noise", static_cast<std::uint64_t>(k));
      const Vec eps = step_rng.normal_vec(n);
      x = ap * x_hat + sp * (std::sqrt(1.0 - cfg.zeta) * eps_tilde + std::sqrt(cfg.zeta) * eps);
    } else {
      x = ap * x_hat + sp * eps_tilde;
    }
    if (!x.allFinite()) throw NumericalFailure("diff_onebit: state not finite", k);
  }
  return {SignalVector(std::move(x)), std::move(trace)};
}

double recover_norm_error(const Vec& x_hat, const Vec& x_true) {
  if (x_hat.size() != x_true.size())
    throw std::invalid_argument("recover_norm_error: length mismatch");
  const double tn = x_true.norm();
  if (!(tn > 0.0)) throw std::invalid_argument("recover_norm_error: zero-norm truth");
  return std::abs(x_hat.norm() - tn) / tn;
}

void write_trace_csv(const RecoveryTrace& trace, std::ostream& out) {
  out << "timestep,mu,inner_objective,coupling_dist,nll\n";
  out.precision(17);
  for (const TraceRecord& r : trace)
    out << r.timestep << ',' << r.mu << ',' << r.inner_objective << ',' << r.coupling_dist << ','
        << r.nll << '\n';
}

}  // namespace onebit
