#include "onebit/metrics.hpp"

#include <cmath>
#include <sstream>

namespace onebit {

double psnr(const Vec& x_hat, const Vec& x_true, double data_range) {
  if (x_hat.size() != x_true.size()) throw std::invalid_argument("psnr: length mismatch");
  if (!(data_range > 0.0)) throw std::invalid_argument("psnr: data_range must be positive");
  const double mse = (x_hat - x_true).squaredNorm() / static_cast<double>(x_hat.size());
  if (mse == 0.0) return 200.0;
  return std::min(200.0, 10.0 * std::log10(data_range * data_range / mse));
}

double ssim(const Vec& x_hat, const Vec& x_true, int height, int width, double data_range) {
  if (x_hat.size() != x_true.size()) throw std::invalid_argument("ssim: length mismatch");
  if (height < 8 || width < 8) throw std::invalid_argument("ssim: min(H,W) must be >= 8");
  if (static_cast<long>(height) * width != x_hat.size())
    throw std::invalid_argument("ssim: shape does not match length");
  if (!(data_range > 0.0)) throw std::invalid_argument("ssim: data_range must be positive");

  constexpr int w = 8;
  const double c1 = (0.01 * data_range) * (0.01 * data_range);
  const double c2 = (0.03 * data_range) * (0.03 * data_range);

  // Summed-area tables over x, y, x^2, y^2, xy give O(1) window moments.
  const int sh = height + 1, sw = width + 1;
  Mat sx = Mat::Zero(sh, sw), sy = Mat::Zero(sh, sw), sxx = Mat::Zero(sh, sw),
      syy = Mat::Zero(sh, sw), sxy = Mat::Zero(sh, sw);
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      const double a = x_hat[static_cast<long>(i) * width + j];
      const double b = x_true[static_cast<long>(i) * width + j];
      sx(i + 1, j + 1) = a + sx(i, j + 1) + sx(i + 1, j) - sx(i, j);
      sy(i + 1, j + 1) = b + sy(i, j + 1) + sy(i + 1, j) - sy(i, j);
      sxx(i + 1, j + 1) = a * a + sxx(i, j + 1) + sxx(i + 1, j) - sxx(i, j);
      syy(i + 1, j + 1) = b * b + syy(i, j + 1) + syy(i + 1, j) - syy(i, j);
      sxy(i + 1, j + 1) = a * b + sxy(i, j + 1) + sxy(i + 1, j) - sxy(i, j);
    }
  }
  auto window_sum = [&](const Mat& s, int i, int j) {
    return s(i + w, j + w) - s(i, j + w) - s(i + w, j) + s(i, j);
  };

  const double inv_n = 1.0 / (w * w);
  double total = 0.0;
  long count = 0;
  for (int i = 0; i + w <= height; ++i) {
    for (int j = 0; j + w <= width; ++j) {
      const double mx = window_sum(sx, i, j) * inv_n;
      const double my = window_sum(sy, i, j) * inv_n;
      const double vx = window_sum(sxx, i, j) * inv_n - mx * mx;
      const double vy = window_sum(syy, i, j) * inv_n - my * my;
      const double cov = window_sum(sxy, i, j) * inv_n - mx * my;
      const double num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
      const double den = (mx * mx + my * my + c1) * (vx + vy + c2);
      total += num / den;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

double cosine_similarity(const Vec& x_hat, const Vec& x_true) {
  if (x_hat.size() != x_true.size())
    throw std::invalid_argument("cosine_similarity: length mismatch");
  const double na = x_hat.norm(), nb = x_true.norm();
  if (!(na > 0.0) || !(nb > 0.0))
    throw std::invalid_argument("cosine_similarity: zero vector");
  return x_hat.dot(x_true) / (na * nb);
}

double sign_consistency(const LinearOperator& op, const Vec& x_hat, const OneBitObservation& obs) {
  if (obs.bits.size() != op.rows())
    throw std::invalid_argument("sign_consistency: observation/operator mismatch");
  const Vec u = op.apply(x_hat);
  long match = 0;
  for (long i = 0; i < u.size(); ++i) {
    const int s = u[i] >= 0.0 ? 1 : -1;
    if (s == obs.bits[i]) ++match;
  }
  return static_cast<double>(match) / static_cast<double>(u.size());
}

MetricReport compute_metrics(const LinearOperator& op, const OneBitObservation& obs,
                             const SignalVector& x_hat, const SignalVector& x_true,
                             double data_range) {
  MetricReport r;
  r.psnr_db = psnr(x_hat.values, x_true.values, data_range);
  r.cosine = cosine_similarity(x_hat.values, x_true.values);
  r.norm_rel_error = std::abs(x_hat.values.norm() - x_true.values.norm()) / x_true.values.norm();
  r.sign_consistency = sign_consistency(op, x_hat.values, obs);
  if (x_true.image_shaped() && x_true.height >= 8 && x_true.width >= 8) {
    r.ssim = ssim(x_hat.values, x_true.values, x_true.height, x_true.width, data_range);
    r.has_ssim = true;
  }
  return r;
}

std::string metric_report_json(const MetricReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "{\"psnr_db\":" << r.psnr_db << ",\"cosine\":" << r.cosine
     << ",\"norm_rel_error\":" << r.norm_rel_error
     << ",\"sign_consistency\":" << r.sign_consistency;
  if (r.has_ssim) os << ",\"ssim\":" << r.ssim << ",\"ssim_variant\":\"" << r.ssim_variant << "\"";
  os << "}";
  return os.str();
}

}  // namespace onebit
