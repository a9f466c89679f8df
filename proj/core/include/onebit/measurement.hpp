#pragma once

#include "onebit/rng.hpp"
#include "onebit/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace onebit {

enum class OperatorKind : std::uint8_t { DenseGaussian = 0, PixelMask = 1 };

/// Forward map from signal space R^N to measurement space R^M.
/// Either a dense matrix or a (scaled) pixel-selection mask with sorted,
/// unique indices. Immutable after construction.
class LinearOperator {
 public:
  LinearOperator() = default;

  static LinearOperator dense(Mat matrix);
  static LinearOperator mask(std::vector<std::uint32_t> indices, int cols, double scale = 1.0);

  Vec apply(const Vec& x) const;
  Vec adjoint(const Vec& u) const;

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  OperatorKind kind() const { return kind_; }

  const Mat& matrix() const;
  const std::vector<std::uint32_t>& indices() const;
  double scale() const { return scale_; }

  /// Hex digest of (kind, shape, payload); used as the observation's operator id.
  std::string fingerprint() const;

 private:
  OperatorKind kind_ = OperatorKind::DenseGaussian;
  int rows_ = 0;
  int cols_ = 0;
  Mat matrix_;
  std::vector<std::uint32_t> indices_;
  double scale_ = 1.0;
};

enum class MeasurementModel : std::uint8_t { ProbitSign = 0, Logistic = 1 };

/// One bit per measurement, each exactly -1 or +1, plus the generating model.
struct OneBitObservation {
  Eigen::VectorXi bits;
  MeasurementModel model = MeasurementModel::ProbitSign;
  double sigma = 0.0;  // pre-quantization noise std; 0 for logistic
  std::string operator_id;
};

/// Dense forward matrix with i.i.d. N(0, 1/M) entries, drawn row-major.
LinearOperator gaussian_operator(std::uint64_t seed, int m, int n);

/// Mask selecting round(mask_ratio * n) distinct coordinates, uniformly at random.
LinearOperator mask_operator(std::uint64_t seed, double mask_ratio, int n);

/// bits_i = sign(a_i' x + eps_i), eps_i ~ N(0, sigma^2); sign(0) := +1.
/// sigma == 0 draws no noise, so the result is a pure function of x_true.
OneBitObservation quantize_onebit(const LinearOperator& op, const Vec& x_true, double sigma,
                                  std::uint64_t seed);

/// bits_i = +1 with probability 1/(1 + exp(-a_i' x)).
OneBitObservation sample_logistic(const LinearOperator& op, const Vec& x_true, std::uint64_t seed);

}  // namespace onebit
