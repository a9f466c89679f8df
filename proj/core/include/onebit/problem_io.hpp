#pragma once

#include "onebit/measurement.hpp"
#include "onebit/types.hpp"

#include <optional>
#include <string>

namespace onebit {

/// One serialized experiment: forward operator, optional ground truth,
/// optional observation.
struct ProblemInstance {
  LinearOperator op;
  std::optional<SignalVector> truth;
  std::optional<OneBitObservation> observation;
};

// OBIT1 container, binary little-endian:
//   magic "OBIT1" (5 bytes), format version u16,
//   then tagged sections until EOF:
//     0x01 OPERATOR:    kind u8 (0 dense, 1 mask), M u32, N u32,
//                       dense: M*N f64 row-major | mask: M u32 indices, scale f64
//     0x02 TRUTH:       N f64
//     0x03 OBSERVATION: model u8 (0 probit, 1 logistic), sigma f64, M i8 bits
// The OPERATOR section must precede TRUTH and OBSERVATION (it defines M, N).
void save_problem(const std::string& path, const ProblemInstance& problem);
ProblemInstance load_problem(const std::string& path);

/// Plain-text interop: one value per line.
void write_vector_csv(const std::string& path, const Vec& v);
Vec read_vector_csv(const std::string& path);

}  // namespace onebit
