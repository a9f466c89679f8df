#pragma once

#include "onebit/measurement.hpp"
#include "onebit/types.hpp"

#include <cstdint>

namespace onebit {

/// log Phi(u) for the standard normal CDF Phi.
/// erfc-based for u > -30, log-space asymptotic series below; finite and
/// strictly increasing for any representable u, absolute error < 1e-12 on [-8, 8].
double log_norm_cdf(double u);

/// Inverse Mills ratio phi(u)/Phi(u): exp(log phi - log Phi), with the
/// asymptotic series -u / (1 - u^-2 + 3u^-4 - ...) for u <= -30.
/// Strictly positive and strictly decreasing.
double inverse_mills(double u);

/// Running count of likelihood arguments clamped to [-40, 40] (diagnostics).
std::uint64_t clamp_event_count();
void reset_clamp_event_count();

enum class FidelityFamily { Probit, Logistic, Null };

/// Negative log-likelihood family for 1-bit observations.
///
/// Probit (sigma > 0):  L(x) = -sum_i log Phi(y_i a_i'x / sigma)
/// Logistic:            L(x) = sum_i softplus(-y_i a_i'x)
/// Null:                L(x) = 0 with zero gradient.
///
/// The
/// per-bit exponent form with (1 +- y)/2 selectors collapses to the y*u form
/// used here, which halves the special-function calls and never multiplies
/// 0 by -inf. Arguments to log Phi are clamped to [-40, 40]; each clamp
/// increments the diagnostic counter.
class DataFidelity {
 public:
  static DataFidelity probit(double sigma);
  static DataFidelity logistic();
  static DataFidelity null();

  FidelityFamily family() const { return family_; }
  double sigma() const { return sigma_; }

  double nll(const OneBitObservation& obs, const LinearOperator& op, const Vec& x) const;
  Vec nll_grad(const OneBitObservation& obs, const LinearOperator& op, const Vec& x) const;

  /// Diagnostic variant whose nll_grad is a central difference of nll with
  /// step h; lets callers cross-check the analytic gradient end to end.
  DataFidelity with_fd_gradient(double h) const;

 private:
  DataFidelity(FidelityFamily f, double s) : family_(f), sigma_(s) {}
  void check_compatible(const OneBitObservation& obs, const LinearOperator& op,
                        const Vec& x) const;
  FidelityFamily family_;
  double sigma_;
  double fd_h_ = 0.0;
};

}  // namespace onebit
