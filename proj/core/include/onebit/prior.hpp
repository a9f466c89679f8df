#pragma once

#include "onebit/rng.hpp"
#include "onebit/types.hpp"

#include <string>
#include <vector>

namespace onebit {

/// Posterior-mean estimator E[x0 | x_t] under x_t = alpha*x0 + sigma*eps.
/// Implementations must be immutable after construction; denoise() is called
/// concurrently from trial workers.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual Vec denoise(const Vec& x_t, double alpha, double sigma) const = 0;
  virtual long dim() const = 0;
};

/// Isotropic Gaussian mixture prior with exact posterior mean, log-density
/// and sampling. The posterior mean under Gaussian corruption has the closed
/// form
///
///   r_j ~ w_j N(x_t; alpha m_j, (alpha^2 tau_j^2 + sigma^2) I)
///   E[x0|x_t] = sum_j r_j [ m_j + (alpha tau_j^2 / (alpha^2 tau_j^2 + sigma^2)) (x_t - alpha m_j) ]
///
/// with responsibilities computed in log space via log-sum-exp. At sigma = 0
/// every component shrinks to x_t/alpha, so the noiseless identity holds
/// exactly.
class GaussianMixturePrior final : public Denoiser {
 public:
  GaussianMixturePrior(std::vector<double> weights, std::vector<Vec> means,
                       std::vector<double> taus);

  Vec denoise(const Vec& x_t, double alpha, double sigma) const override;
  long dim() const override { return means_[0].size(); }

  double log_density(const Vec& x) const;
  SignalVector sample(Rng& rng) const;
  SignalVector sample(std::uint64_t seed) const;

  int components() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Vec>& means() const { return means_; }
  const std::vector<double>& taus() const { return taus_; }

  /// Mixture mean sum_j w_j m_j.
  Vec mean() const;

  static GaussianMixturePrior load(const std::string& path);
  void save(const std::string& path) const;

 private:
  std::vector<double> weights_;
  std::vector<Vec> means_;
  std::vector<double> taus_;
};

/// Grid-tabulated denoiser for dim <= 2, linearly interpolated and clamped at
/// the grid edges. The table holds one or more (alpha, sigma) slices; denoise
/// picks the slice matching its arguments to 1e-9 and interpolates. sigma = 0
/// bypasses the table and returns x_t/alpha.
class LookupDenoiser final : public Denoiser {
 public:
  struct Slice {
    double alpha = 1.0;
    double sigma = 0.0;
    std::vector<double> values;  // resolution^dim points, row-major, dim outputs each
  };

  LookupDenoiser(int dim, Vec lo, Vec hi, int resolution, std::vector<Slice> slices);

  Vec denoise(const Vec& x_t, double alpha, double sigma) const override;
  long dim() const override { return dim_; }

  int resolution() const { return resolution_; }
  const std::vector<Slice>& slices() const { return slices_; }

  static LookupDenoiser load(const std::string& path);
  void save(const std::string& path) const;

 private:
  Vec interpolate(const Slice& s, const Vec& x) const;
  int dim_;
  Vec lo_, hi_;
  int resolution_;
  std::vector<Slice> slices_;
};

}  // namespace onebit
