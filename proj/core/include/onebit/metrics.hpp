#pragma once

#include "onebit/likelihood.hpp"
#include "onebit/measurement.hpp"
#include "onebit/types.hpp"

#include <functional>
#include <string>

namespace onebit {

struct MetricReport {
  double psnr_db = 0.0;
  double ssim = 0.0;           // NaN-free only when both signals are image-shaped
  bool has_ssim = false;
  double cosine = 0.0;
  double norm_rel_error = 0.0;
  double sign_consistency = 0.0;
  std::string ssim_variant = "uniform8x8";
};

/// 10 log10(range^2 / MSE); exact match reports the 200 dB cap.
double psnr(const Vec& x_hat, const Vec& x_true, double data_range);

/// Mean local SSIM with 8x8 uniform windows, stride 1, population moments,
/// C1 = (0.01 range)^2, C2 = (0.03 range)^2. Requires min(H, W) >= 8.
double ssim(const Vec& x_hat, const Vec& x_true, int height, int width, double data_range);

double cosine_similarity(const Vec& x_hat, const Vec& x_true);

/// Fraction of measurements with sign(a_i' x_hat) == y_i; sign(0) := +1.
double sign_consistency(const LinearOperator& op, const Vec& x_hat, const OneBitObservation& obs);

MetricReport compute_metrics(const LinearOperator& op, const OneBitObservation& obs,
                             const SignalVector& x_hat, const SignalVector& x_true,
                             double data_range);

std::string metric_report_json(const MetricReport& r);

}  // namespace onebit
