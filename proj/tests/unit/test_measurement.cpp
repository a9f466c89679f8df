#include <doctest.h>

#include "onebit/measurement.hpp"

#include <cmath>

using namespace onebit;

TEST_CASE("gaussian_operator entry variance matches 1/M") {
  const auto op = gaussian_operator(7, 4, 64);
  REQUIRE(op.rows() == 4);
  REQUIRE(op.cols() == 64);
  const Mat& a = op.matrix();
  const long n = a.size();
  const double mean = a.sum() / n;
  const double var = (a.array() - mean).square().sum() / (n - 1);
  // sample variance of 256 iid normals: sd of s^2 is sigma^2 sqrt(2/(n-1))
  const double se = 0.25 * std::sqrt(2.0 / (n - 1));
  CHECK(std::abs(var - 0.25) < 3.0 * se);
}

TEST_CASE("gaussian_operator is deterministic per seed") {
  const auto a = gaussian_operator(42, 8, 16);
  const auto b = gaussian_operator(42, 8, 16);
  CHECK(a.matrix() == b.matrix());
  const auto c = gaussian_operator(43, 8, 16);
  CHECK(a.matrix() != c.matrix());
}

TEST_CASE("gaussian_operator at the 1/16 measurement ratio") {
  const auto op = gaussian_operator(1, 256, 4096);
  CHECK(op.rows() == 256);
  CHECK(op.cols() == 4096);
}

TEST_CASE("gaussian_operator rejects zero dimensions") {
  CHECK_THROWS_AS(gaussian_operator(1, 0, 4), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_operator(1, 4, 0), std::invalid_argument);
}

TEST_CASE("mask_operator picks distinct sorted indices") {
  const auto op = mask_operator(5, 0.5, 8);
  REQUIRE(op.rows() == 4);
  const auto& idx = op.indices();
  for (size_t i = 1; i < idx.size(); ++i) CHECK(idx[i - 1] < idx[i]);
  CHECK(idx.back() < 8);
}

TEST_CASE("mask_operator with ratio 1 selects everything in order") {
  const auto op = mask_operator(5, 1.0, 6);
  REQUIRE(op.rows() == 6);
  for (int i = 0; i < 6; ++i) CHECK(op.indices()[i] == static_cast<std::uint32_t>(i));
  Vec x(6);
  x << 1, 2, 3, 4, 5, 6;
  CHECK(op.apply(x) == x);
}

TEST_CASE("mask adjoint zero-fills unobserved coordinates") {
  const auto op = LinearOperator::mask({0, 3}, 4);
  Vec u(2);
  u << 1, 2;
  const Vec out = op.adjoint(u);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 0.0);
  CHECK(out[3] == 2.0);
}

TEST_CASE("mask_operator validates the ratio") {
  CHECK_THROWS_AS(mask_operator(1, 0.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(mask_operator(1, 1.5, 8), std::invalid_argument);
  CHECK_THROWS_AS(mask_operator(1, 0.01, 8), std::invalid_argument);  // rounds to zero rows
}

TEST_CASE("apply matches hand arithmetic") {
  Mat id(2, 2);
  id << 1, 0, 0, 1;
  Vec x(2);
  x << 3, -5;
  CHECK(LinearOperator::dense(id).apply(x) == x);

  Mat h(2, 2);
  h << 1, 1, 1, -1;
  Vec y(2);
  y << 2, 1;
  const Vec out = LinearOperator::dense(h).apply(y);
  CHECK(out[0] == 3.0);
  CHECK(out[1] == 1.0);

  CHECK_THROWS_AS(LinearOperator::dense(h).apply(Vec::Zero(3)), std::invalid_argument);
}

TEST_CASE("adjoint identity <Av,u> == <v,A'u> on random operators") {
  Rng rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    const bool dense = rep % 2 == 0;
    const auto op = dense ? gaussian_operator(rng.next_u64(), 5, 9)
                          : mask_operator(rng.next_u64(), 0.6, 9);
    const Vec v = rng.normal_vec(9);
    const Vec u = rng.normal_vec(op.rows());
    const double lhs = op.apply(v).dot(u);
    const double rhs = v.dot(op.adjoint(u));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("quantize_onebit with sigma 0 is the sign pattern, zero maps up") {
  Mat id = Mat::Identity(3, 3);
  Vec x(3);
  x << 2.5, -0.1, 0.0;
  const auto op = LinearOperator::dense(id);
  const auto obs = quantize_onebit(op, x, 0.0, 1);
  CHECK(obs.bits[0] == 1);
  CHECK(obs.bits[1] == -1);
  CHECK(obs.bits[2] == 1);
  CHECK(obs.model == MeasurementModel::ProbitSign);
  CHECK(obs.sigma == 0.0);
  // seed-independent when noiseless
  const auto obs2 = quantize_onebit(op, x, 0.0, 999);
  CHECK(obs.bits == obs2.bits);
}

TEST_CASE("quantize_onebit records the probit tag and noise level") {
  const auto op = gaussian_operator(3, 6, 4);
  Rng rng(4);
  const auto obs = quantize_onebit(op, rng.normal_vec(4), 0.5, 11);
  CHECK(obs.model == MeasurementModel::ProbitSign);
  CHECK(obs.sigma == 0.5);
  CHECK(obs.operator_id == op.fingerprint());
  for (long i = 0; i < obs.bits.size(); ++i) CHECK(std::abs(obs.bits[i]) == 1);
  CHECK_THROWS_AS(quantize_onebit(op, rng.normal_vec(4), -0.1, 11), std::invalid_argument);
}

TEST_CASE("probit flip frequency matches the normal CDF") {
  // rows of ones, x = 0.5: P(bit = +1) = Phi(0.5/0.5) = Phi(1)
  const int m = 100000;
  const auto op = LinearOperator::dense(Mat::Ones(m, 1));
  Vec x(1);
  x << 0.5;
  const auto obs = quantize_onebit(op, x, 0.5, 2024);
  long plus = 0;
  for (long i = 0; i < obs.bits.size(); ++i) plus += obs.bits[i] == 1;
  const double frac = static_cast<double>(plus) / m;
  CHECK(std::abs(frac - 0.8413447460685429) < 0.005);
}

TEST_CASE("logistic sampling matches the sigmoid") {
  const int m = 100000;
  const auto op = LinearOperator::dense(Mat::Ones(m, 1));

  Vec zero(1);
  zero << 0.0;
  auto obs = sample_logistic(op, zero, 5);
  long plus = 0;
  for (long i = 0; i < obs.bits.size(); ++i) plus += obs.bits[i] == 1;
  CHECK(std::abs(plus / static_cast<double>(m) - 0.5) < 0.005);

  Vec two(1);
  two << 2.0;
  obs = sample_logistic(op, two, 6);
  plus = 0;
  for (long i = 0; i < obs.bits.size(); ++i) plus += obs.bits[i] == 1;
  CHECK(std::abs(plus / static_cast<double>(m) - 0.8807970779778824) < 0.005);
  CHECK(obs.model == MeasurementModel::Logistic);

  Vec big(1);
  big << 50.0;
  obs = sample_logistic(LinearOperator::dense(Mat::Ones(1000, 1)), big, 7);
  for (long i = 0; i < obs.bits.size(); ++i) CHECK(obs.bits[i] == 1);
}
