#include <doctest.h>

#include <cmath>

#include "swlab/deflection.hpp"
#include "swlab/errors.hpp"

using namespace swlab;

TEST_CASE("constants at full load") {
  const auto d = DeflectionParams::from_load(1.0);
  CHECK(d.p == doctest::Approx(0.6321206).epsilon(1e-6));
  CHECK(d.q == doctest::Approx(0.3678794).epsilon(1e-6));
  CHECK(d.slope == doctest::Approx(-0.3565922).epsilon(1e-6));
  CHECK(d.intercept == doctest::Approx(0.9682723).epsilon(1e-6));
  CHECK(d.a == doctest::Approx(1.4284533).epsilon(1e-6));
  CHECK(d.c == doctest::Approx(1.2905750).epsilon(1e-6));
  CHECK(-std::log(d.a) == doctest::Approx(d.slope));
}

TEST_CASE("success probability") {
  CHECK(success_probability(0.0) == 1.0);
  CHECK(success_probability(1e-9) == doctest::Approx(1.0));
  CHECK(success_probability(0.5) == doctest::Approx(0.7869).epsilon(1e-4));
  CHECK_THROWS_AS(success_probability(1.01), DomainError);
  double prev = 1.0;
  for (double rho = 0.05; rho <= 1.0; rho += 0.05) {
    const double p = success_probability(rho);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("a and c exceed one") {
  for (double rho = 0.01; rho <= 1.0; rho += 0.01) {
    const auto d = DeflectionParams::from_load(rho);
    CHECK(d.a > 1.0);
    CHECK(d.c > 1.0);
    CHECK(d.slope < 0.0);
    CHECK(d.p + d.q == doctest::Approx(1.0));
  }
}

TEST_CASE("absorption recursion") {
  const auto d = DeflectionParams::from_load(1.0);
  const auto s = absorption_series(d.p, d.q, 200);
  CHECK(s.g_q[0] == 0.0);
  CHECK(s.g_q[1] == 0.0);
  CHECK(s.g_q[2] == doctest::Approx(d.p * d.p));
  double sum = 0.0, prev = 0.0;
  for (double g : s.g_q) {
    CHECK(g >= 0.0);
    CHECK(g <= 1.0);
    sum += g;
    CHECK(sum >= prev);
    prev = sum;
  }
  CHECK(std::abs(sum - 1.0) < 1e-9);
  CHECK_THROWS_AS(absorption_series(0.6, 0.5, 10), PreconditionError);
}

TEST_CASE("generating function long division matches the recursion") {
  for (double rho : {0.2, 0.5, 1.0}) {
    const auto d = DeflectionParams::from_load(rho);
    const auto s = absorption_series(d.p, d.q, 60);
    // coefficients of p^2 z^2 / (1 - q z - p q z^2)
    std::vector<double> c(61, 0.0);
    for (int k = 0; k <= 60; ++k) {
      double num = k == 2 ? d.p * d.p : 0.0;
      if (k >= 1) num += d.q * c[k - 1];
      if (k >= 2) num += d.p * d.q * c[k - 2];
      c[k] = num;
      CHECK(std::abs(c[k] - s.g_q[k]) < 1e-12);
    }
  }
}

TEST_CASE("product form agrees with the recursion") {
  for (double rho : {0.2, 0.6, 1.0}) {
    const auto d = DeflectionParams::from_load(rho);
    const auto s = absorption_series(d.p, d.q, 40);
    for (int k = 0; k <= 40; ++k) {
      CHECK(closed_form_term(d.p, d.q, k) == doctest::Approx(s.g_q[k]).epsilon(1e-9));
    }
  }
}

TEST_CASE("exact tail and explicit bound") {
  const auto d = DeflectionParams::from_load(1.0);
  const auto s = absorption_series(d.p, d.q, 600);
  double head = 0.0;
  for (int L = 0; L <= 30; ++L) {
    head += s.g_q[L];
    CHECK(exact_tail(d.p, d.q, L) == doctest::Approx(1.0 - head).epsilon(1e-9));
    const auto t = closed_form_tail(d.p, d.q, L);
    CHECK(t.explicit_bound == doctest::Approx(exact_tail(d.p, d.q, L)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(closed_form_tail(0.4, 0.6, 3), DomainError);
}

TEST_CASE("log-linear bound holds at even lengths only") {
  // converges onto the tail as L grows, from above at even L and below at odd L
  for (double rho : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    const auto d = DeflectionParams::from_load(rho);
    for (int L = 0; L <= 100; L += 2) {
      const auto t = closed_form_tail(d.p, d.q, L);
      CHECK(t.log_linear_bound >= exact_tail(d.p, d.q, L) * (1 - 1e-12));
      if (L + 1 <= 21) {
        CHECK(closed_form_tail(d.p, d.q, L + 1).log_linear_bound < exact_tail(d.p, d.q, L + 1));
      }
    }
  }
}

TEST_CASE("loss bound") {
  const auto d = DeflectionParams::from_load(1.0);
  CHECK(loss_bound(1.0, 0) == doctest::Approx(1.2906).epsilon(1e-4));
  CHECK(loss_bound(1.0, 400) < 1e-50);
  const double slope = std::log(loss_bound(1.0, 21)) - std::log(loss_bound(1.0, 20));
  CHECK(slope == doctest::Approx(d.slope));
  CHECK(std::exp(d.slope * (10 + 2) + d.intercept) == doctest::Approx(loss_bound(1.0, 10)));
  CHECK_THROWS_AS(loss_bound(1.2, 5), DomainError);
}

TEST_CASE("deflection simulator") {
  const auto sim = simulate_deflection(4, 12, 1.0, 5000, 7);
  CHECK(sim.offered == sim.delivered + sim.lost);
  std::uint64_t exits = 0;
  for (auto e : sim.exit_histogram) exits += e;
  CHECK(exits == sim.delivered);
  CHECK(sim.exit_histogram[0] == 0);
  CHECK(sim.exit_histogram[1] == 0);

  const auto light = simulate_deflection(4, 6, 0.05, 20000, 3);
  CHECK(light.loss() < 0.01);

  const auto again = simulate_deflection(4, 12, 1.0, 5000, 7);
  CHECK(again.exit_histogram == sim.exit_histogram);
  CHECK_THROWS_AS(simulate_deflection(1, 5, 0.5, 10, 1), PreconditionError);
}

TEST_CASE("simulated loss under the bound") {
  for (int L : {4, 8, 12}) {
    const auto sim = simulate_deflection(4, L, 1.0, 20000, 100 + L);
    const double b = loss_bound(1.0, L);
    const double sigma = std::sqrt(b * (1 - b) / static_cast<double>(sim.offered));
    CHECK(sim.loss() <= b + 4 * sigma);
  }
}
