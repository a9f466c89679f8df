#include <doctest.h>

#include "onebit/prior.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace onebit;

namespace {

Vec scalar(double v) {
  Vec x(1);
  x << v;
  return x;
}

GaussianMixturePrior two_component_1d(double w0, double m0, double t0, double m1, double t1) {
  return GaussianMixturePrior({w0, 1.0 - w0}, {scalar(m0), scalar(m1)}, {t0, t1});
}

// marginal of x_t = alpha x0 + sigma eps under the mixture, N = 1
double marginal_log_density(const GaussianMixturePrior& p, double x, double alpha, double sigma) {
  double acc = 0.0;
  for (int j = 0; j < p.components(); ++j) {
    const double v = alpha * alpha * p.taus()[j] * p.taus()[j] + sigma * sigma;
    const double d = x - alpha * p.means()[j][0];
    acc += p.weights()[j] * std::exp(-0.5 * d * d / v) / std::sqrt(2.0 * M_PI * v);
  }
  return std::log(acc);
}

// quadrature posterior mean over x0 on [-10, 10]
double quadrature_posterior_mean(const GaussianMixturePrior& p, double x_t, double alpha,
                                 double sigma) {
  const int n = 100000;
  const double lo = -10.0, hi = 10.0;
  const double h = (hi - lo) / n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x0 = lo + i * h;
    const double lik = std::exp(-0.5 * std::pow(x_t - alpha * x0, 2) / (sigma * sigma));
    const double pri = std::exp(p.log_density(scalar(x0)));
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;  // trapezoid
    num += w * x0 * lik * pri;
    den += w * lik * pri;
  }
  return num / den;
}

}  // namespace

TEST_CASE("single-component denoise collapses to scalar shrinkage") {
  GaussianMixturePrior p({1.0}, {scalar(0.0)}, {1.0});
  const double sigma = 0.7;
  const Vec out = p.denoise(scalar(1.3), 1.0, sigma);
  CHECK(out[0] == doctest::Approx(1.3 / (1.0 + sigma * sigma)).epsilon(1e-14));
}

TEST_CASE("single-component denoise general closed form") {
  GaussianMixturePrior p({1.0}, {scalar(2.0)}, {1.0});
  const Vec out = p.denoise(scalar(2.0), 0.8, 0.6);
  // 2 + (0.8/(0.64+0.36)) * (2 - 1.6) = 2.32
  CHECK(out[0] == doctest::Approx(2.32).epsilon(1e-14));
}

TEST_CASE("two-component denoise matches the quadrature posterior mean") {
  const auto p = two_component_1d(0.35, -1.8, 0.6, 2.2, 0.9);
  for (const auto& [xt, alpha, sigma] :
       {std::tuple{0.4, 0.9, 0.5}, std::tuple{-2.0, 0.6, 1.2}, std::tuple{1.1, 0.3, 0.8}}) {
    const double exact = p.denoise(scalar(xt), alpha, sigma)[0];
    const double quad = quadrature_posterior_mean(p, xt, alpha, sigma);
    CHECK(exact == doctest::Approx(quad).epsilon(1e-6));
  }
}

TEST_CASE("denoise satisfies the Tweedie score identity") {
  const auto p = two_component_1d(0.5, -1.0, 0.8, 1.5, 0.4);
  const double alpha = 0.75, sigma = 0.55;
  for (double xt : {-2.0, -0.3, 0.9, 2.4}) {
    const double h = 1e-5;
    const double score = (marginal_log_density(p, xt + h, alpha, sigma) -
                          marginal_log_density(p, xt - h, alpha, sigma)) /
                         (2 * h);
    const double expect = xt / alpha + (sigma * sigma / alpha) * score;
    CHECK(p.denoise(scalar(xt), alpha, sigma)[0] == doctest::Approx(expect).epsilon(1e-7));
  }
}

TEST_CASE("denoise limits: sigma to 0 gives x/alpha, sigma to inf gives the mixture mean") {
  const auto p = two_component_1d(0.4, -2.0, 0.5, 1.0, 1.5);
  const double alpha = 0.85;
  const Vec x = scalar(0.7);
  CHECK(p.denoise(x, alpha, 0.0)[0] == doctest::Approx(0.7 / alpha).epsilon(1e-15));
  CHECK(p.denoise(x, alpha, 1e-8)[0] == doctest::Approx(0.7 / alpha).epsilon(1e-6));
  const double mix_mean = 0.4 * -2.0 + 0.6 * 1.0;
  CHECK(p.denoise(x, alpha, 1e6)[0] == doctest::Approx(mix_mean).epsilon(1e-4));
}

TEST_CASE("denoise validates arguments") {
  const auto p = two_component_1d(0.5, 0.0, 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(p.denoise(scalar(0.0), 0.5, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(p.denoise(scalar(0.0), 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(p.denoise(Vec::Zero(2), 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("log_density reference values") {
  GaussianMixturePrior std_normal({1.0}, {scalar(0.0)}, {1.0});
  CHECK(std_normal.log_density(scalar(0.0)) ==
        doctest::Approx(-0.9189385332046727).epsilon(1e-14));

  // symmetric two-component at the midpoint: log of the average density
  const auto p = two_component_1d(0.5, -1.0, 0.7, 1.0, 0.7);
  const double comp = std::exp(-0.5 / 0.49) / std::sqrt(2.0 * M_PI * 0.49);
  CHECK(p.log_density(scalar(0.0)) == doctest::Approx(std::log(comp)).epsilon(1e-12));
}

TEST_CASE("density integrates to one") {
  const auto p = two_component_1d(0.3, -2.5, 0.4, 1.2, 1.1);
  const int n = 200000;
  const double lo = -12.0, hi = 12.0, h = (hi - lo) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    acc += w * std::exp(p.log_density(scalar(lo + i * h)));
  }
  CHECK(acc * h == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("sampling is deterministic per seed and hits component statistics") {
  Vec m(3);
  m << 1.0, -2.0, 0.5;
  GaussianMixturePrior p({1.0}, {m}, {1.0});
  const auto a = p.sample(123).values;
  const auto b = p.sample(123).values;
  CHECK(a == b);

  Rng rng(77);
  Vec sum = Vec::Zero(3);
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += p.sample(rng).values;
  const Vec mean = sum / n;
  for (int d = 0; d < 3; ++d) CHECK(std::abs(mean[d] - m[d]) < 3.0 / std::sqrt(n) * 1.5);
}

TEST_CASE("near-degenerate weights always select the dominant component") {
  GaussianMixturePrior p({1.0 - 1e-13, 1e-13}, {scalar(5.0), scalar(-5.0)}, {0.1, 0.1});
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) CHECK(p.sample(rng).values[0] > 0.0);
}

TEST_CASE("vanishing component variance returns the mean") {
  GaussianMixturePrior p({1.0}, {scalar(3.5)}, {1e-9});
  CHECK(p.sample(9).values[0] == doctest::Approx(3.5).epsilon(1e-7));
}

TEST_CASE("prior constructor validates its inputs") {
  CHECK_THROWS_AS(GaussianMixturePrior({0.5, 0.4}, {scalar(0), scalar(1)}, {1, 1}),
                  std::invalid_argument);  // weights don't sum to 1
  CHECK_THROWS_AS(GaussianMixturePrior({1.0, 0.0}, {scalar(0), scalar(1)}, {1, 1}),
                  std::invalid_argument);  // zero weight
  CHECK_THROWS_AS(GaussianMixturePrior({1.0}, {scalar(0)}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(GaussianMixturePrior({0.5, 0.5}, {scalar(0), Vec::Zero(2)}, {1, 1}),
                  std::invalid_argument);  // mixed dimensions
}

TEST_CASE("prior file round trip") {
  Vec m0(2), m1(2);
  m0 << 1.25, -0.5;
  m1 << -3.0, 2.0;
  GaussianMixturePrior p({0.7, 0.3}, {m0, m1}, {0.4, 1.2});
  const auto path = std::filesystem::temp_directory_path() / "onebit_prior_test.txt";
  p.save(path.string());
  const auto q = GaussianMixturePrior::load(path.string());
  CHECK(q.components() == 2);
  CHECK(q.weights()[0] == 0.7);
  CHECK(q.means()[1] == m1);
  CHECK(q.taus()[1] == 1.2);
  std::filesystem::remove(path);
}

TEST_CASE("lookup denoiser interpolates a tabulated slice") {
  const auto p = two_component_1d(0.5, -1.5, 0.6, 1.5, 0.6);
  const double alpha = 0.8, sigma = 0.5;
  const int res = 2001;
  const double lo = -8.0, hi = 8.0;
  LookupDenoiser::Slice slice;
  slice.alpha = alpha;
  slice.sigma = sigma;
  slice.values.resize(res);
  for (int i = 0; i < res; ++i) {
    const double x = lo + (hi - lo) * i / (res - 1);
    slice.values[i] = p.denoise(scalar(x), alpha, sigma)[0];
  }
  LookupDenoiser table(1, scalar(lo), scalar(hi), res, {slice});

  for (double x : {-3.3, -0.47, 0.001, 2.9}) {
    CHECK(table.denoise(scalar(x), alpha, sigma)[0] ==
          doctest::Approx(p.denoise(scalar(x), alpha, sigma)[0]).epsilon(1e-5));
  }
  // edge clamping
  CHECK(table.denoise(scalar(100.0), alpha, sigma)[0] == doctest::Approx(slice.values[res - 1]));
  // noiseless identity bypasses the table
  CHECK(table.denoise(scalar(0.5), 0.5, 0.0)[0] == doctest::Approx(1.0));
  // unmatched noise level is an error
  CHECK_THROWS_AS(table.denoise(scalar(0.0), alpha, 0.123), std::invalid_argument);
}

TEST_CASE("lookup denoiser file round trip") {
  LookupDenoiser::Slice slice;
  slice.alpha = 0.9;
  slice.sigma = 0.3;
  slice.values = {0.0, 0.5, 1.0, 1.5, 2.0};
  LookupDenoiser table(1, scalar(-2.0), scalar(2.0), 5, {slice});
  const auto path = std::filesystem::temp_directory_path() / "onebit_lookup_test.txt";
  table.save(path.string());
  const auto loaded = LookupDenoiser::load(path.string());
  CHECK(loaded.resolution() == 5);
  CHECK(loaded.denoise(scalar(0.0), 0.9, 0.3)[0] ==
        doctest::Approx(table.denoise(scalar(0.0), 0.9, 0.3)[0]));
  std::filesystem::remove(path);
}
