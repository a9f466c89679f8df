#include "onebit/likelihood.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

namespace onebit {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kHalfLog2Pi = 0.9189385332046727418;  // log(2*pi)/2
constexpr double kClamp = 40.0;

std::atomic<std::uint64_t> g_clamp_events{0};

// 1 - u^-2 + 3u^-4 - 15u^-6 + 105u^-8 - 945u^-10 + 10395u^-12, as 1 + tail.
// Relative truncation error below 1e-15 for |u| >= 30.
double mills_series_tail(double u) {
  const double r = 1.0 / (u * u);
  return r * (-1.0 + r * (3.0 + r * (-15.0 + r * (105.0 + r * (-945.0 + r * 10395.0)))));
}

double log_norm_pdf(double u) { return -0.5 * u * u - kHalfLog2Pi; }

double softplus(double t) {
  // log(1 + exp(t)) without overflow on either side
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

double clamp_arg(double u) {
  if (u > kClamp) {
    g_clamp_events.fetch_add(1, std::memory_order_relaxed);
    return kClamp;
  }
  if (u < -kClamp) {
    g_clamp_events.fetch_add(1, std::memory_order_relaxed);
    return -kClamp;
  }
  return u;
}

}  // namespace

double log_norm_cdf(double u) {
  if (std::isnan(u)) throw std::invalid_argument("log_norm_cdf: NaN input");
  if (u > 0.0) {
    // log(1 - Phi(-u)); Phi(-u) is tiny here so log1p keeps full precision
    return std::log1p(-0.5 * std::erfc(u * kInvSqrt2));
  }
  if (u > -30.0) {
    // erfc has good relative accuracy for positive arguments, so the log
    // carries small absolute error all the way down
    return std::log(0.5 * std::erfc(-u * kInvSqrt2));
  }
  // log Phi(u) = log phi(u) - log(-u) + log(series); erfc would underflow near -37
  return log_norm_pdf(u) - std::log(-u) + std::log1p(mills_series_tail(u));
}

double inverse_mills(double u) {
  if (std::isnan(u)) throw std::invalid_argument("inverse_mills: NaN input");
  if (u <= -30.0) return -u / (1.0 + mills_series_tail(u));
  return std::exp(log_norm_pdf(u) - log_norm_cdf(u));
}

std::uint64_t clamp_event_count() { return g_clamp_events.load(std::memory_order_relaxed); }
void reset_clamp_event_count() { g_clamp_events.store(0, std::memory_order_relaxed); }

DataFidelity DataFidelity::probit(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("DataFidelity::probit: sigma must be positive and finite");
  return DataFidelity(FidelityFamily::Probit, sigma);
}

DataFidelity DataFidelity::logistic() { return DataFidelity(FidelityFamily::Logistic, 0.0); }

DataFidelity DataFidelity::null() { return DataFidelity(FidelityFamily::Null, 0.0); }

void DataFidelity::check_compatible(const OneBitObservation& obs, const LinearOperator& op,
                                    const Vec& x) const {
  if (family_ == FidelityFamily::Probit && obs.model != MeasurementModel::ProbitSign)
    throw std::invalid_argument("DataFidelity: probit fidelity requires a ProbitSign observation");
  if (family_ == FidelityFamily::Logistic && obs.model != MeasurementModel::Logistic)
    throw std::invalid_argument("DataFidelity: logistic fidelity requires a Logistic observation");
  if (obs.bits.size() != op.rows())
    throw std::invalid_argument("DataFidelity: observation/operator size mismatch");
  if (x.size() != op.cols())
    throw std::invalid_argument("DataFidelity: signal/operator size mismatch");
}

double DataFidelity::nll(const OneBitObservation& obs, const LinearOperator& op,
                         const Vec& x) const {
  if (family_ == FidelityFamily::Null) return 0.0;
  check_compatible(obs, op, x);
  const Vec u = op.apply(x);
  double total = 0.0;
  if (family_ == FidelityFamily::Probit) {
    for (long i = 0; i < u.size(); ++i)
      total -= log_norm_cdf(clamp_arg(obs.bits[i] * u[i] / sigma_));
  } else {
    for (long i = 0; i < u.size(); ++i) total += softplus(-obs.bits[i] * u[i]);
  }
  return total;
}

DataFidelity DataFidelity::with_fd_gradient(double h) const {
  if (!(h > 0.0)) throw std::invalid_argument("with_fd_gradient: h must be positive");
  DataFidelity copy = *this;
  copy.fd_h_ = h;
  return copy;
}

Vec DataFidelity::nll_grad(const OneBitObservation& obs, const LinearOperator& op,
                           const Vec& x) const {
  if (family_ == FidelityFamily::Null) return Vec::Zero(x.size());
  check_compatible(obs, op, x);
  if (fd_h_ > 0.0) {
    Vec g(x.size());
    Vec xp = x;
    for (long i = 0; i < x.size(); ++i) {
      const double orig = x[i];
      xp[i] = orig + fd_h_;
      const double fp = nll(obs, op, xp);
      xp[i] = orig - fd_h_;
      const double fm = nll(obs, op, xp);
      xp[i] = orig;
      g[i] = (fp - fm) / (2.0 * fd_h_);
    }
    return g;
  }
  const Vec u = op.apply(x);
  Vec coeff(u.size());
  if (family_ == FidelityFamily::Probit) {
    for (long i = 0; i < u.size(); ++i) {
      const double y = obs.bits[i];
      coeff[i] = -(y / sigma_) * inverse_mills(clamp_arg(y * u[i] / sigma_));
    }
  } else {
    for (long i = 0; i < u.size(); ++i) {
      const double y = obs.bits[i];
      coeff[i] = -y * sigmoid(-y * u[i]);
    }
  }
  return op.adjoint(coeff);
}

}  // namespace onebit
