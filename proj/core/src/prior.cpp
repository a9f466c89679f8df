#include "onebit/prior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace onebit {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double log_sum_exp(const std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

std::string read_kv_line(std::istream& in, const std::string& key) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError("prior file: expected 'key = value' line: " + line);
    std::string k = line.substr(0, eq);
    k.erase(0, k.find_first_not_of(" \t"));
    k.erase(k.find_last_not_of(" \t") + 1);
    if (k != key) throw IoError("prior file: expected key '" + key + "', got '" + k + "'");
    return line.substr(eq + 1);
  }
  throw IoError("prior file: missing key '" + key + "'");
}

std::vector<double> parse_numbers(const std::string& s, long expected) {
  std::istringstream is(s);
  std::vector<double> out;
  double v;
  while (is >> v) out.push_back(v);
  if (expected >= 0 && static_cast<long>(out.size()) != expected)
    throw IoError("prior file: expected " + std::to_string(expected) + " numbers");
  return out;
}

}  // namespace

GaussianMixturePrior::GaussianMixturePrior(std::vector<double> weights, std::vector<Vec> means,
                                           std::vector<double> taus)
    : weights_(std::move(weights)), means_(std::move(means)), taus_(std::move(taus)) {
  if (weights_.empty() || weights_.size() != means_.size() || weights_.size() != taus_.size())
    throw std::invalid_argument("GaussianMixturePrior: inconsistent component counts");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0)) throw std::invalid_argument("GaussianMixturePrior: weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("GaussianMixturePrior: weights must sum to 1");
  const long n = means_[0].size();
  if (n < 1) throw std::invalid_argument("GaussianMixturePrior: empty mean");
  for (const Vec& m : means_)
    if (m.size() != n || !m.allFinite())
      throw std::invalid_argument("GaussianMixturePrior: bad component mean");
  for (double t : taus_)
    if (!(t > 0.0) || !std::isfinite(t))
      throw std::invalid_argument("GaussianMixturePrior: taus must be positive");
}

Vec GaussianMixturePrior::denoise(const Vec& x_t, double alpha, double sigma) const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("gmm_denoise: alpha out of (0,1]");
  if (sigma < 0.0) throw std::invalid_argument("gmm_denoise: sigma must be nonnegative");
  if (x_t.size() != dim()) throw std::invalid_argument("gmm_denoise: dimension mismatch");
  const long n = x_t.size();
  const int j_count = components();

  std::vector<double> logr(j_count);
  for (int j = 0; j < j_count; ++j) {
    const double v = alpha * alpha * taus_[j] * taus_[j] + sigma * sigma;
    const double d2 = (x_t - alpha * means_[j]).squaredNorm();
    logr[j] = std::log(weights_[j]) - 0.5 * d2 / v - 0.5 * n * (kLog2Pi + std::log(v));
  }
  const double lse = log_sum_exp(logr);

  Vec out = Vec::Zero(n);
  for (int j = 0; j < j_count; ++j) {
    const double r = std::exp(logr[j] - lse);
    const double v = alpha * alpha * taus_[j] * taus_[j] + sigma * sigma;
    const double shrink = alpha * taus_[j] * taus_[j] / v;
    out += r * (means_[j] + shrink * (x_t - alpha * means_[j]));
  }
  return out;
}

double GaussianMixturePrior::log_density(const Vec& x) const {
  if (x.size() != dim()) throw std::invalid_argument("gmm_log_density: dimension mismatch");
  const long n = x.size();
  std::vector<double> terms(components());
  for (int j = 0; j < components(); ++j) {
    const double t2 = taus_[j] * taus_[j];
    terms[j] = std::log(weights_[j]) - 0.5 * (x - means_[j]).squaredNorm() / t2 -
               0.5 * n * (kLog2Pi + std::log(t2));
  }
  return log_sum_exp(terms);
}

SignalVector GaussianMixturePrior::sample(Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  int j = components() - 1;
  for (int i = 0; i < components(); ++i) {
    acc += weights_[i];
    if (u < acc) {
      j = i;
      break;
    }
  }
  return SignalVector(means_[j] + taus_[j] * rng.normal_vec(dim()));
}

SignalVector GaussianMixturePrior::sample(std::uint64_t seed) const {
  Rng rng(seed, "gmm_sample", 0);
  return sample(rng);
}

Vec GaussianMixturePrior::mean() const {
  Vec m = Vec::Zero(dim());
  for (int j = 0; j < components(); ++j) m += weights_[j] * means_[j];
  return m;
}

GaussianMixturePrior GaussianMixturePrior::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open prior file: " + path);
  const int j_count = static_cast<int>(parse_numbers(read_kv_line(in, "J"), 1)[0]);
  const long n = static_cast<long>(parse_numbers(read_kv_line(in, "N"), 1)[0]);
  std::vector<double> weights, taus;
  std::vector<Vec> means;
  for (int j = 0; j < j_count; ++j) {
    const std::string sj = std::to_string(j);
    weights.push_back(parse_numbers(read_kv_line(in, "weight_" + sj), 1)[0]);
    const auto mv = parse_numbers(read_kv_line(in, "mean_" + sj), n);
    means.push_back(Eigen::Map<const Vec>(mv.data(), n));
    taus.push_back(parse_numbers(read_kv_line(in, "tau_" + sj), 1)[0]);
  }
  return GaussianMixturePrior(std::move(weights), std::move(means), std::move(taus));
}

void GaussianMixturePrior::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write prior file: " + path);
  out.precision(17);
  out << "J = " << components() << "\n";
  out << "N = " << dim() << "\n";
  for (int j = 0; j < components(); ++j) {
    out << "weight_" << j << " = " << weights_[j] << "\n";
    out << "mean_" << j << " =";
    for (long i = 0; i < dim(); ++i) out << ' ' << means_[j][i];
    out << "\n";
    out << "tau_" << j << " = " << taus_[j] << "\n";
  }
  if (!out) throw IoError("short write: " + path);
}

LookupDenoiser::LookupDenoiser(int dim, Vec lo, Vec hi, int resolution,
                               std::vector<Slice> slices)
    : dim_(dim), lo_(std::move(lo)), hi_(std::move(hi)), resolution_(resolution),
      slices_(std::move(slices)) {
  if (dim_ < 1 || dim_ > 2) throw std::invalid_argument("LookupDenoiser: dim must be 1 or 2");
  if (lo_.size() != dim_ || hi_.size() != dim_)
    throw std::invalid_argument("LookupDenoiser: bounds dimension mismatch");
  for (int d = 0; d < dim_; ++d)
    if (!(lo_[d] < hi_[d])) throw std::invalid_argument("LookupDenoiser: empty bounds");
  if (resolution_ < 2) throw std::invalid_argument("LookupDenoiser: resolution must be >= 2");
  if (slices_.empty()) throw std::invalid_argument("LookupDenoiser: no slices");
  long points = 1;
  for (int d = 0; d < dim_; ++d) points *= resolution_;
  for (const Slice& s : slices_)
    if (static_cast<long>(s.values.size()) != points * dim_)
      throw std::invalid_argument("LookupDenoiser: slice value count mismatch");
}

Vec LookupDenoiser::interpolate(const Slice& s, const Vec& x) const {
  auto cell = [&](int d, double v, long& i0, double& frac) {
    const double step = (hi_[d] - lo_[d]) / (resolution_ - 1);
    double t = (v - lo_[d]) / step;
    t = std::clamp(t, 0.0, static_cast<double>(resolution_ - 1));
    i0 = std::min(static_cast<long>(t), static_cast<long>(resolution_ - 2));
    frac = t - static_cast<double>(i0);
  };
  Vec out(dim_);
  if (dim_ == 1) {
    long i0;
    double f;
    cell(0, x[0], i0, f);
    for (int c = 0; c < dim_; ++c)
      out[c] = (1 - f) * s.values[i0 * dim_ + c] + f * s.values[(i0 + 1) * dim_ + c];
    return out;
  }
  long i0, j0;
  double fi, fj;
  cell(0, x[0], i0, fi);
  cell(1, x[1], j0, fj);
  auto at = [&](long i, long j, int c) { return s.values[(i * resolution_ + j) * dim_ + c]; };
  for (int c = 0; c < dim_; ++c) {
    const double a = (1 - fj) * at(i0, j0, c) + fj * at(i0, j0 + 1, c);
    const double b = (1 - fj) * at(i0 + 1, j0, c) + fj * at(i0 + 1, j0 + 1, c);
    out[c] = (1 - fi) * a + fi * b;
  }
  return out;
}

Vec LookupDenoiser::denoise(const Vec& x_t, double alpha, double sigma) const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("LookupDenoiser: alpha out of (0,1]");
  if (sigma < 0.0) throw std::invalid_argument("LookupDenoiser: sigma must be nonnegative");
  if (x_t.size() != dim_) throw std::invalid_argument("LookupDenoiser: dimension mismatch");
  if (sigma == 0.0) return x_t / alpha;
  for (const Slice& s : slices_)
    if (std::abs(s.alpha - alpha) <= 1e-9 && std::abs(s.sigma - sigma) <= 1e-9)
      return interpolate(s, x_t);
  throw std::invalid_argument("LookupDenoiser: no slice tabulated for requested (alpha, sigma)");
}

LookupDenoiser LookupDenoiser::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open denoiser table: " + path);
  const int dim = static_cast<int>(parse_numbers(read_kv_line(in, "dim"), 1)[0]);
  const auto lov = parse_numbers(read_kv_line(in, "lo"), dim);
  const auto hiv = parse_numbers(read_kv_line(in, "hi"), dim);
  const int res = static_cast<int>(parse_numbers(read_kv_line(in, "resolution"), 1)[0]);
  const int nslices = static_cast<int>(parse_numbers(read_kv_line(in, "slices"), 1)[0]);
  long points = 1;
  for (int d = 0; d < dim; ++d) points *= res;
  std::vector<Slice> slices;
  for (int s = 0; s < nslices; ++s) {
    const std::string ss = std::to_string(s);
    Slice sl;
    sl.alpha = parse_numbers(read_kv_line(in, "alpha_" + ss), 1)[0];
    sl.sigma = parse_numbers(read_kv_line(in, "sigma_" + ss), 1)[0];
    sl.values = parse_numbers(read_kv_line(in, "values_" + ss), points * dim);
    slices.push_back(std::move(sl));
  }
  return LookupDenoiser(dim, Eigen::Map<const Vec>(lov.data(), dim),
                        Eigen::Map<const Vec>(hiv.data(), dim), res, std::move(slices));
}

void LookupDenoiser::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write denoiser table: " + path);
  out.precision(17);
  out << "dim = " << dim_ << "\n";
  out << "lo =";
  for (int d = 0; d < dim_; ++d) out << ' ' << lo_[d];
  out << "\nhi =";
  for (int d = 0; d < dim_; ++d) out << ' ' << hi_[d];
  out << "\nresolution = " << resolution_ << "\n";
  out << "slices = " << slices_.size() << "\n";
  for (size_t s = 0; s < slices_.size(); ++s) {
    out << "alpha_" << s << " = " << slices_[s].alpha << "\n";
    out << "sigma_" << s << " = " << slices_[s].sigma << "\n";
    out << "values_" << s << " =";
    for (double v : slices_[s].values) out << ' ' << v;
    out << "\n";
  }
  if (!out) throw IoError("short write: " + path);
}

}  // namespace onebit
