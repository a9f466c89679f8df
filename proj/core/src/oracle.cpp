#include "onebit/oracle.hpp"

#include <cmath>
#include <limits>
#include <thread>
#include <vector>

namespace onebit {

namespace {

struct ChunkBest {
  double f = std::numeric_limits<double>::infinity();
  long index = -1;
  double sum = 0.0;
  double max = -std::numeric_limits<double>::infinity();
};

}  // namespace

GridMapResult grid_map_oracle(const OneBitObservation& obs, const LinearOperator& op,
                              const GaussianMixturePrior& prior, const DataFidelity& fidelity,
                              const GridSpec& grid, int threads) {
  const int dim = op.cols();
  if (dim > 3) throw std::invalid_argument("grid_map_oracle: unsupported for N > 3");
  if (grid.lo.size() != dim || grid.hi.size() != dim)
    throw std::invalid_argument("grid_map_oracle: bounds dimension mismatch");
  for (int d = 0; d < dim; ++d)
    if (!(grid.lo[d] < grid.hi[d])) throw std::invalid_argument("grid_map_oracle: empty bounds");
  if (grid.resolution < 64) throw std::invalid_argument("grid_map_oracle: resolution must be >= 64");
  if (prior.dim() != dim) throw std::invalid_argument("grid_map_oracle: prior dimension mismatch");

  const long res = grid.resolution;
  long total = 1;
  for (int d = 0; d < dim; ++d) total *= res;

  auto point_at = [&](long index) {
    Vec x(dim);
    long rem = index;
    for (int d = dim - 1; d >= 0; --d) {
      const long i = rem % res;
      rem /= res;
      x[d] = grid.lo[d] + (grid.hi[d] - grid.lo[d]) * static_cast<double>(i) / (res - 1);
    }
    return x;
  };

  int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (nthreads < 1) nthreads = 1;
  const long chunk = (total + nthreads - 1) / nthreads;

  std::vector<ChunkBest> results(nthreads);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int w = 0; w < nthreads; ++w) {
    pool.emplace_back([&, w]() {
      const long lo = w * chunk;
      const long hi = std::min(total, lo + chunk);
      ChunkBest best;
      for (long idx = lo; idx < hi; ++idx) {
        const Vec x = point_at(idx);
        const double f = fidelity.nll(obs, op, x) - prior.log_density(x);
        best.sum += f;
        if (f > best.max) best.max = f;
        if (f < best.f) {
          best.f = f;
          best.index = idx;
        }
      }
      results[w] = best;
    });
  }
  for (auto& t : pool) t.join();

  // reduce in chunk order: strictly-lower wins, so ties keep the lowest index
  GridMapResult out;
  out.objective = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  double mx = -std::numeric_limits<double>::infinity();
  for (const ChunkBest& b : results) {
    if (b.index < 0) continue;
    sum += b.sum;
    if (b.max > mx) mx = b.max;
    if (b.f < out.objective) {
      out.objective = b.f;
      out.argmin_index = b.index;
    }
  }
  out.argmin = point_at(out.argmin_index);
  out.objective_mean = sum / static_cast<double>(total);
  out.objective_max = mx;
  return out;
}

Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: h must be positive");
  Vec g(x.size());
  Vec xp = x;
  for (long i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    xp[i] = orig + h;
    const double fp = f(xp);
    xp[i] = orig - h;
    const double fm = f(xp);
    xp[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace onebit
