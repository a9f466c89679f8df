#include <doctest.h>

#include "onebit/schedule.hpp"

#include <cmath>

using namespace onebit;

TEST_CASE("two-step schedule by hand") {
  const auto s = build_schedule(2, 0.1, 0.1);
  CHECK(s.alpha_bar(1) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(s.alpha_bar(2) == doctest::Approx(0.81).epsilon(1e-15));
  CHECK(s.alpha(2) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(s.sigma(2) == doctest::Approx(std::sqrt(0.19)).epsilon(1e-15));
}

TEST_CASE("variance-preserving identity holds at every step") {
  const auto s = build_schedule(1000, 1e-4, 0.02);
  for (int t = 1; t <= 1000; ++t) {
    const double a = s.alpha(t), sg = s.sigma(t);
    CHECK(std::abs(a * a + sg * sg - 1.0) <= 1e-12);
  }
  CHECK(s.alpha(0) == 1.0);
  CHECK(s.sigma(0) == 0.0);
}

TEST_CASE("default schedule terminal alpha_bar") {
  const auto s = build_schedule(1000, 1e-4, 0.02);
  // independent product computed before the build
  CHECK(s.alpha_bar(1000) == doctest::Approx(4.035829765375676e-05).epsilon(1e-10));
}

TEST_CASE("alpha_bar strictly decreases and the SNR ratio with it") {
  const auto s = build_schedule(500, 1e-4, 0.02);
  for (int t = 2; t <= 500; ++t) {
    CHECK(s.alpha_bar(t) < s.alpha_bar(t - 1));
    CHECK(s.alpha(t) / s.sigma(t) < s.alpha(t - 1) / s.sigma(t - 1));
  }
}

TEST_CASE("schedule constructor validates ranges") {
  CHECK_THROWS_AS(build_schedule(1, 1e-4, 0.02), std::invalid_argument);
  CHECK_THROWS_AS(build_schedule(10, 0.0, 0.02), std::invalid_argument);
  CHECK_THROWS_AS(build_schedule(10, 0.03, 0.02), std::invalid_argument);
  CHECK_THROWS_AS(build_schedule(10, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("full plan selects every base step") {
  const auto s = build_schedule(16, 1e-3, 0.01);
  const auto plan = plan_timesteps(s, 16, 0.5);
  REQUIRE(plan.nfe() == 16);
  for (int k = 0; k <= 16; ++k) CHECK(plan.timesteps[k] == k);
}

TEST_CASE("K=20 plan over T=1000 matches the reference enumeration") {
  const auto s = build_schedule(1000, 1e-4, 0.02);
  const auto plan = plan_timesteps(s, 20, 1.0);
  // round-half-up of 1 + (k-1) * 999/19, enumerated independently
  const int expect[21] = {0,   1,   54,  106, 159, 211, 264, 316, 369, 422, 474,
                          527, 579, 632, 685, 737, 790, 842, 895, 947, 1000};
  REQUIRE(plan.timesteps.size() == 21);
  for (int k = 0; k <= 20; ++k) CHECK(plan.timesteps[k] == expect[k]);
  CHECK(plan.alphas[0] == 1.0);
  CHECK(plan.sigmas[0] == 0.0);
}

TEST_CASE("mu ladder follows lambda alpha^2/sigma^2 and grows as t shrinks") {
  const auto s = build_schedule(1000, 1e-4, 0.02);
  for (double lambda : {0.02, 1.0}) {
    const auto plan = plan_timesteps(s, 20, lambda);
    for (int k = 1; k <= 20; ++k) {
      const double expect =
          lambda * plan.alphas[k] * plan.alphas[k] / (plan.sigmas[k] * plan.sigmas[k]);
      CHECK(plan.mu_at(k) == doctest::Approx(expect).epsilon(1e-15));
    }
    for (int k = 2; k <= 20; ++k) CHECK(plan.mu_at(k - 1) > plan.mu_at(k));
  }
}

TEST_CASE("plan timesteps are strictly decreasing toward the clean endpoint") {
  const auto s = build_schedule(777, 1e-4, 0.015);
  for (int k_count : {1, 2, 7, 50, 777}) {
    const auto plan = plan_timesteps(s, k_count, 0.1);
    REQUIRE(plan.nfe() == k_count);
    for (int k = 1; k <= k_count; ++k) CHECK(plan.timesteps[k] > plan.timesteps[k - 1]);
    CHECK(plan.timesteps[k_count] == 777);
  }
}

TEST_CASE("plan rejects bad K and lambda") {
  const auto s = build_schedule(100, 1e-4, 0.02);
  CHECK_THROWS_AS(plan_timesteps(s, 101, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(plan_timesteps(s, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(plan_timesteps(s, 10, 0.0), std::invalid_argument);
}
