#include "onebit/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

namespace onebit {

LinearOperator LinearOperator::dense(Mat matrix) {
  if (matrix.rows() < 1 || matrix.cols() < 1)
    throw std::invalid_argument("LinearOperator::dense: empty matrix");
  if (!matrix.allFinite()) throw std::invalid_argument("LinearOperator::dense: non-finite entries");
  LinearOperator op;
  op.kind_ = OperatorKind::DenseGaussian;
  op.rows_ = static_cast<int>(matrix.rows());
  op.cols_ = static_cast<int>(matrix.cols());
  op.matrix_ = std::move(matrix);
  return op;
}

LinearOperator LinearOperator::mask(std::vector<std::uint32_t> indices, int cols, double scale) {
  if (cols < 1) throw std::invalid_argument("LinearOperator::mask: cols must be positive");
  if (indices.empty()) throw std::invalid_argument("LinearOperator::mask: no indices");
  if (!std::is_sorted(indices.begin(), indices.end()))
    throw std::invalid_argument("LinearOperator::mask: indices must be sorted");
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
    throw std::invalid_argument("LinearOperator::mask: duplicate index");
  if (indices.back() >= static_cast<std::uint32_t>(cols))
    throw std::invalid_argument("LinearOperator::mask: index out of range");
  if (!std::isfinite(scale)) throw std::invalid_argument("LinearOperator::mask: bad scale");
  LinearOperator op;
  op.kind_ = OperatorKind::PixelMask;
  op.rows_ = static_cast<int>(indices.size());
  op.cols_ = cols;
  op.indices_ = std::move(indices);
  op.scale_ = scale;
  return op;
}

Vec LinearOperator::apply(const Vec& x) const {
  if (x.size() != cols_) throw std::invalid_argument("LinearOperator::apply: dimension mismatch");
  if (kind_ == OperatorKind::DenseGaussian) return matrix_ * x;
  Vec out(rows_);
  for (int i = 0; i < rows_; ++i) out[i] = scale_ * x[indices_[i]];
  return out;
}

Vec LinearOperator::adjoint(const Vec& u) const {
  if (u.size() != rows_) throw std::invalid_argument("LinearOperator::adjoint: dimension mismatch");
  if (kind_ == OperatorKind::DenseGaussian) return matrix_.transpose() * u;
  Vec out = Vec::Zero(cols_);
  for (int i = 0; i < rows_; ++i) out[indices_[i]] = scale_ * u[i];
  return out;
}

const Mat& LinearOperator::matrix() const {
  if (kind_ != OperatorKind::DenseGaussian)
    throw std::logic_error("LinearOperator::matrix: not a dense operator");
  return matrix_;
}

const std::vector<std::uint32_t>& LinearOperator::indices() const {
  if (kind_ != OperatorKind::PixelMask)
    throw std::logic_error("LinearOperator::indices: not a mask operator");
  return indices_;
}

std::string LinearOperator::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint8_t k = static_cast<std::uint8_t>(kind_);
  mix(&k, 1);
  mix(&rows_, sizeof rows_);
  mix(&cols_, sizeof cols_);
  if (kind_ == OperatorKind::DenseGaussian) {
    mix(matrix_.data(), sizeof(double) * matrix_.size());
  } else {
    mix(indices_.data(), sizeof(std::uint32_t) * indices_.size());
    mix(&scale_, sizeof scale_);
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

LinearOperator gaussian_operator(std::uint64_t seed, int m, int n) {
  if (m < 1 || n < 1) throw std::invalid_argument("gaussian_operator: dimensions must be positive");
  Rng rng(seed, "gaussian_operator", 0);
  const double sd = 1.0 / std::sqrt(static_cast<double>(m));
  Mat a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = sd * rng.normal();
  return LinearOperator::dense(std::move(a));
}

LinearOperator mask_operator(std::uint64_t seed, double mask_ratio, int n) {
  if (n < 1) throw std::invalid_argument("mask_operator: n must be positive");
  if (!(mask_ratio > 0.0 && mask_ratio <= 1.0))
    throw std::invalid_argument("mask_operator: mask_ratio must be in (0,1]");
  const long m = std::llround(mask_ratio * n);
  if (m < 1) throw std::invalid_argument("mask_operator: empty mask");
  std::vector<std::uint32_t> all(n);
  std::iota(all.begin(), all.end(), 0u);
  Rng rng(seed, "mask_operator", 0);
  // Partial Fisher-Yates: the first m entries are a uniform sample without replacement.
  for (long i = 0; i < m; ++i) {
    const auto j = i + static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(n - i)));
    std::swap(all[i], all[j]);
  }
  std::vector<std::uint32_t> idx(all.begin(), all.begin() + m);
  std::sort(idx.begin(), idx.end());
  return LinearOperator::mask(std::move(idx), n);
}

OneBitObservation quantize_onebit(const LinearOperator& op, const Vec& x_true, double sigma,
                                  std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("quantize_onebit: sigma must be nonnegative");
  if (!std::isfinite(sigma)) throw std::invalid_argument("quantize_onebit: sigma must be finite");
  Vec u = op.apply(x_true);
  if (sigma > 0.0) {
    Rng rng(seed, "quantize_onebit", 0);
    for (long i = 0; i < u.size(); ++i) u[i] += sigma * rng.normal();
  }
  OneBitObservation obs;
  obs.bits.resize(u.size());
  for (long i = 0; i < u.size(); ++i) obs.bits[i] = u[i] >= 0.0 ? 1 : -1;
  obs.model = MeasurementModel::ProbitSign;
  obs.sigma = sigma;
  obs.operator_id = op.fingerprint();
  return obs;
}

OneBitObservation sample_logistic(const LinearOperator& op, const Vec& x_true,
                                  std::uint64_t seed) {
  const Vec u = op.apply(x_true);
  Rng rng(seed, "sample_logistic", 0);
  OneBitObservation obs;
  obs.bits.resize(u.size());
  for (long i = 0; i < u.size(); ++i) {
    // p(+1) = 1/(1+exp(-u)), evaluated on the stable side
    const double p = u[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-u[i]))
                                 : std::exp(u[i]) / (1.0 + std::exp(u[i]));
    obs.bits[i] = rng.uniform() < p ? 1 : -1;
  }
  obs.model = MeasurementModel::Logistic;
  obs.sigma = 0.0;
  obs.operator_id = op.fingerprint();
  return obs;
}

}  // namespace onebit
