#pragma once

#include "onebit/likelihood.hpp"
#include "onebit/measurement.hpp"
#include "onebit/prior.hpp"
#include "onebit/types.hpp"

#include <functional>

namespace onebit {

struct GridSpec {
  Vec lo;          // per-dimension lower bounds
  Vec hi;          // per-dimension upper bounds
  int resolution;  // points per dimension, >= 64
};

struct GridMapResult {
  Vec argmin;
  double objective = 0.0;
  long argmin_index = 0;  // linear grid index (dimension 0 major)
  double objective_mean = 0.0;
  double objective_max = 0.0;
};

/// Exhaustive minimizer of nll(x) - log p(x) over a regular grid, dim <= 3.
/// Ties break toward the lowest linear index; chunked evaluation is reduced
/// in chunk order, so the result is independent of the thread count.
GridMapResult grid_map_oracle(const OneBitObservation& obs, const LinearOperator& op,
                              const GaussianMixturePrior& prior, const DataFidelity& fidelity,
                              const GridSpec& grid, int threads = 0);

/// Central finite differences (f(x + h e_i) - f(x - h e_i)) / 2h.
Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& x, double h);

}  // namespace onebit
