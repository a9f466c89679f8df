#include <doctest.h>

#include "mpfr_oracle.hpp"
#include "onebit/likelihood.hpp"
#include "onebit/oracle.hpp"
#include "onebit/rng.hpp"

#include <cmath>
#include <limits>

using namespace onebit;

TEST_CASE("log_norm_cdf frozen reference points") {
  CHECK(log_norm_cdf(0.0) == doctest::Approx(-0.6931471805599453).epsilon(1e-15));
  CHECK(log_norm_cdf(-10.0) == doctest::Approx(-53.231285150512470578).epsilon(1e-14));
  CHECK(log_norm_cdf(8.0) == doctest::Approx(-6.2209605742717861e-16).epsilon(1e-9));
  CHECK(log_norm_cdf(-40.0) == doctest::Approx(-804.60844201375378817).epsilon(1e-14));
  CHECK_THROWS_AS(log_norm_cdf(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST_CASE("log_norm_cdf is finite and strictly increasing down to -40 and beyond") {
  double prev = log_norm_cdf(-60.0);
  CHECK(std::isfinite(prev));
  for (int i = 1; i <= 3000; ++i) {
    const double u = -60.0 + i * (68.0 / 3000.0);
    const double v = log_norm_cdf(u);
    CHECK(std::isfinite(v));
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("log_norm_cdf tracks the high-precision oracle across the branch seam") {
  for (int i = 0; i <= 400; ++i) {
    const double u = -38.0 + i * (46.0 / 400.0);
    const double ref = testing::ref_log_norm_cdf(u);
    CHECK(std::abs(log_norm_cdf(u) - ref) <=
          1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("inverse_mills frozen reference points") {
  CHECK(inverse_mills(0.0) == doctest::Approx(0.7978845608028654).epsilon(1e-14));
  CHECK(inverse_mills(-10.0) == doctest::Approx(10.098093233962512).epsilon(1e-12));
  CHECK(inverse_mills(10.0) == doctest::Approx(7.6945986267064193e-23).epsilon(1e-9));
  CHECK(inverse_mills(-30.0) == doctest::Approx(30.033259667433677).epsilon(1e-12));
  CHECK_THROWS_AS(inverse_mills(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST_CASE("inverse_mills is positive and strictly decreasing") {
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 600; ++i) {
    const double u = -35.0 + i * (70.0 / 600.0);
    const double v = inverse_mills(u);
    CHECK(v > 0.0);
    CHECK(v < prev);
    prev = v;
  }
}

namespace {

OneBitObservation make_obs(MeasurementModel model, const Eigen::VectorXi& bits, double sigma) {
  OneBitObservation obs;
  obs.bits = bits;
  obs.model = model;
  obs.sigma = sigma;
  return obs;
}

}  // namespace

TEST_CASE("nll at x = 0 is M log 2 for both families") {
  const auto op = gaussian_operator(17, 12, 5);
  Eigen::VectorXi bits(12);
  Rng rng(3);
  for (int i = 0; i < 12; ++i) bits[i] = rng.uniform() < 0.5 ? -1 : 1;
  const Vec zero = Vec::Zero(5);

  const auto probit = DataFidelity::probit(0.7);
  const auto obs_p = make_obs(MeasurementModel::ProbitSign, bits, 0.7);
  CHECK(probit.nll(obs_p, op, zero) == doctest::Approx(12 * std::log(2.0)).epsilon(1e-12));

  const auto logistic = DataFidelity::logistic();
  const auto obs_l = make_obs(MeasurementModel::Logistic, bits, 0.0);
  CHECK(logistic.nll(obs_l, op, zero) == doctest::Approx(12 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("probit nll single measurement frozen value") {
  const auto op = LinearOperator::dense(Mat::Ones(1, 1));
  Eigen::VectorXi bits(1);
  bits << 1;
  Vec x(1);
  x << 2.0;
  const auto fidelity = DataFidelity::probit(1.0);
  const auto obs = make_obs(MeasurementModel::ProbitSign, bits, 1.0);
  CHECK(fidelity.nll(obs, op, x) ==
        doctest::Approx(0.023012909328963488).epsilon(1e-12));
}

TEST_CASE("gradients at x = 0 have the closed form") {
  const auto op = gaussian_operator(23, 9, 4);
  Eigen::VectorXi bits(9);
  Rng rng(8);
  for (int i = 0; i < 9; ++i) bits[i] = rng.uniform() < 0.5 ? -1 : 1;
  const Vec zero = Vec::Zero(4);

  Vec weighted = Vec::Zero(4);
  for (int i = 0; i < 9; ++i) weighted += bits[i] * op.matrix().row(i).transpose();

  const double sigma = 0.6;
  const auto probit = DataFidelity::probit(sigma);
  const auto obs_p = make_obs(MeasurementModel::ProbitSign, bits, sigma);
  const Vec gp = probit.nll_grad(obs_p, op, zero);
  const Vec gp_expect = -(0.7978845608028654 / sigma) * weighted;
  CHECK((gp - gp_expect).norm() <= 1e-12 * gp_expect.norm());

  const auto logistic = DataFidelity::logistic();
  const auto obs_l = make_obs(MeasurementModel::Logistic, bits, 0.0);
  const Vec gl = logistic.nll_grad(obs_l, op, zero);
  const Vec gl_expect = -0.5 * weighted;
  CHECK((gl - gl_expect).norm() <= 1e-12 * gl_expect.norm());
}

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(31);
  const auto op = gaussian_operator(77, 8, 4);
  Eigen::VectorXi bits(8);
  for (int i = 0; i < 8; ++i) bits[i] = rng.uniform() < 0.5 ? -1 : 1;
  const Vec x = rng.normal_vec(4);

  for (bool probit : {true, false}) {
    const auto fidelity = probit ? DataFidelity::probit(0.8) : DataFidelity::logistic();
    const auto obs = make_obs(probit ? MeasurementModel::ProbitSign : MeasurementModel::Logistic,
                              bits, probit ? 0.8 : 0.0);
    const Vec g = fidelity.nll_grad(obs, op, x);
    const Vec fd = finite_diff_grad([&](const Vec& v) { return fidelity.nll(obs, op, v); }, x, 1e-5);
    CHECK((g - fd).norm() <= 1e-6 * g.norm());
  }
}

TEST_CASE("nll stays finite at saturated arguments and counts the clamps") {
  const auto op = LinearOperator::dense(Mat::Ones(2, 1));
  Eigen::VectorXi bits(2);
  bits << 1, -1;
  const auto fidelity = DataFidelity::probit(1.0);
  const auto obs = make_obs(MeasurementModel::ProbitSign, bits, 1.0);
  Vec x(1);
  x << 80.0;  // |u| = 80 clamps to 40 on both bits
  reset_clamp_event_count();
  const double v = fidelity.nll(obs, op, x);
  CHECK(std::isfinite(v));
  CHECK(clamp_event_count() == 2);
  CHECK(fidelity.nll_grad(obs, op, x).allFinite());
  reset_clamp_event_count();
}

TEST_CASE("both families are convex along random chords") {
  Rng rng(57);
  const auto op = gaussian_operator(91, 10, 3);
  Eigen::VectorXi bits(10);
  for (int i = 0; i < 10; ++i) bits[i] = rng.uniform() < 0.5 ? -1 : 1;
  for (bool probit : {true, false}) {
    const auto fidelity = probit ? DataFidelity::probit(0.5) : DataFidelity::logistic();
    const auto obs = make_obs(probit ? MeasurementModel::ProbitSign : MeasurementModel::Logistic,
                              bits, probit ? 0.5 : 0.0);
    for (int rep = 0; rep < 50; ++rep) {
      const Vec x1 = rng.normal_vec(3), x2 = rng.normal_vec(3);
      const double t = rng.uniform();
      const double lhs = fidelity.nll(obs, op, t * x1 + (1 - t) * x2);
      const double rhs = t * fidelity.nll(obs, op, x1) + (1 - t) * fidelity.nll(obs, op, x2);
      CHECK(lhs <= rhs + 1e-9);
    }
  }
}

TEST_CASE("negating bits and signal leaves the nll unchanged") {
  Rng rng(58);
  const auto op = gaussian_operator(92, 7, 3);
  Eigen::VectorXi bits(7);
  for (int i = 0; i < 7; ++i) bits[i] = rng.uniform() < 0.5 ? -1 : 1;
  const Vec x = rng.normal_vec(3);
  for (bool probit : {true, false}) {
    const auto fidelity = probit ? DataFidelity::probit(0.9) : DataFidelity::logistic();
    const auto obs = make_obs(probit ? MeasurementModel::ProbitSign : MeasurementModel::Logistic,
                              bits, probit ? 0.9 : 0.0);
    const auto flipped = make_obs(obs.model, (-bits.array()).matrix(), obs.sigma);
    CHECK(fidelity.nll(obs, op, x) ==
          doctest::Approx(fidelity.nll(flipped, op, -x)).epsilon(1e-12));
  }
}

TEST_CASE("single-measurement nll strictly decreases as agreement grows") {
  const auto op = LinearOperator::dense(Mat::Ones(1, 1));
  Eigen::VectorXi bits(1);
  bits << 1;
  for (bool probit : {true, false}) {
    const auto fidelity = probit ? DataFidelity::probit(0.8) : DataFidelity::logistic();
    const auto obs = make_obs(probit ? MeasurementModel::ProbitSign : MeasurementModel::Logistic,
                              bits, probit ? 0.8 : 0.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double v = -5.0; v <= 5.0; v += 0.25) {
      Vec x(1);
      x << v;
      const double f = fidelity.nll(obs, op, x);
      CHECK(f < prev);
      prev = f;
    }
  }
}

TEST_CASE("family/model mismatch and bad construction are rejected") {
  const auto op = gaussian_operator(5, 4, 2);
  Eigen::VectorXi bits = Eigen::VectorXi::Ones(4);
  const auto obs_l = make_obs(MeasurementModel::Logistic, bits, 0.0);
  const auto obs_p = make_obs(MeasurementModel::ProbitSign, bits, 0.5);
  CHECK_THROWS_AS(DataFidelity::probit(0.5).nll(obs_l, op, Vec::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(DataFidelity::logistic().nll(obs_p, op, Vec::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(DataFidelity::probit(0.0), std::invalid_argument);
  CHECK_THROWS_AS(DataFidelity::probit(-1.0), std::invalid_argument);
}

TEST_CASE("null fidelity is identically zero") {
  const auto op = gaussian_operator(5, 4, 2);
  Eigen::VectorXi bits = Eigen::VectorXi::Ones(4);
  const auto obs = make_obs(MeasurementModel::ProbitSign, bits, 0.5);
  const auto null = DataFidelity::null();
  Vec x(2);
  x << 3.0, -4.0;
  CHECK(null.nll(obs, op, x) == 0.0);
  CHECK(null.nll_grad(obs, op, x) == Vec::Zero(2));
}
