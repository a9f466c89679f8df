#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace onebit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr const char* kToolVersion = "0.1.0";

/// A real signal, optionally carrying an image shape (height x width).
/// height == width == 0 means unshaped.
struct SignalVector {
  Vec values;
  int height = 0;
  int width = 0;

  SignalVector() = default;
  explicit SignalVector(Vec v) : values(std::move(v)) {}
  SignalVector(Vec v, int h, int w) : values(std::move(v)), height(h), width(w) {
    if (h > 0 && w > 0 && static_cast<long>(h) * w != values.size())
      throw std::invalid_argument("SignalVector: image shape does not match length");
  }

  bool image_shaped() const { return height > 0 && width > 0; }
  long size() const { return values.size(); }
};

/// Non-finite value produced inside an iterative routine; carries where.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& msg, int plan_step, int inner_step = -1)
      : std::runtime_error(msg + " (plan step " + std::to_string(plan_step) +
                           (inner_step >= 0 ? ", inner step " + std::to_string(inner_step) : "") + ")"),
        plan_step(plan_step),
        inner_step(inner_step) {}
  int plan_step;
  int inner_step;
};

/// Malformed input file; byte_offset points at the offending position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::uint64_t offset)
      : std::runtime_error(msg + " at byte " + std::to_string(offset)), byte_offset(offset) {}
  std::uint64_t byte_offset;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace onebit
