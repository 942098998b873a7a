#include <cmath>
#include <numbers>

#include "bkm/analytic.hpp"
#include "bkm/errors.hpp"
#include "bkm/gronwall.hpp"
#include "doctest.h"

using namespace bkm;

namespace {

double fact(int k) { return std::tgamma(k + 1.0); }

IterationProblem constant_problem(double a, double C, double K, double span = 1.0) {
  return make_problem([a](double) { return a; }, C, [K](double) { return K; }, 0.0, span);
}

}  // namespace

TEST_CASE("iterated integral examples") {
  const auto one = sample_function([](double) { return 1.0; }, 0.0, 1.0, 10000);
  CHECK(std::abs(iterated_integral(one, 4) - 1.0 / 24.0) < 1e-8 / 24.0);
  const auto t = sample_function([](double s) { return s; }, 0.0, 1.0, 10000);
  CHECK(iterated_integral(t, 2) == doctest::Approx(0.125).epsilon(1e-10));
  const auto e = sample_function([](double s) { return std::exp(s); }, 0.0, 1.0, 10000);
  CHECK(iterated_integral(e, 1) == doctest::Approx(std::numbers::e - 1.0).epsilon(1e-12));
  CHECK_THROWS_AS(iterated_integral(one, 9), ParameterError);
  CHECK_THROWS_AS(iterated_integral(one, 0), ParameterError);
  CHECK_THROWS_AS(iterated_integral(sample_function([](double) { return 1.0; }, 0.0, 1.0, 9999), 2), ParameterError);
}

TEST_CASE("iterated integral identity against exact closed forms") {
  struct Case {
    std::function<double(double)> f;
    double a, b, integral;
  };
  const double pi = std::numbers::pi;
  const Case cases[] = {
      {[](double) { return 1.0; }, 0.0, 1.0, 1.0},
      {[](double s) { return s; }, 0.0, 1.0, 0.5},
      {[](double s) { return std::exp(s); }, 0.0, 1.0, std::numbers::e - 1.0},
      {[](double s) { return std::abs(std::sin(s)); }, 0.0, 2 * pi, 4.0},
  };
  for (const auto& c : cases) {
    const auto s = sample_function(c.f, c.a, c.b, 10000);
    for (int k = 1; k <= 6; ++k) {
      const double exact = std::pow(c.integral, k) / fact(k);
      CHECK(std::abs(iterated_integral(s, k) - exact) / exact < 1e-8);
      CHECK(std::abs(iterated_integral(s, k) - iterated_integral_closed_form(s, k)) / exact < 1e-8);
    }
  }
}

TEST_CASE("plain trapezoid alone is not accurate enough for the identity at k = 4") {
  // documents why the nested quadrature is extrapolated
  const auto one = sample_function([](double s) { return std::exp(s); }, 0.0, 1.0, 10000);
  std::vector<double> inner(one.values.size(), 1.0);
  for (int level = 0; level < 4; ++level) {
    std::vector<double> next(inner.size(), 0.0);
    for (std::size_t i = 1; i < inner.size(); ++i)
      next[i] = next[i - 1] + 0.5 * one.step() * (one.values[i - 1] * inner[i - 1] + one.values[i] * inner[i]);
    inner = next;
  }
  const double exact = std::pow(std::numbers::e - 1.0, 4) / 24.0;
  CHECK(std::abs(inner.back() - exact) / exact > 1e-8);
}

TEST_CASE("iteration bound") {
  CHECK(iteration_bound(constant_problem(1.0, 1.0, 3.0), 1.0) == doctest::Approx(std::numbers::e).epsilon(1e-12));
  CHECK(iteration_bound(constant_problem(1.0, 1.0, 3.0), 0.0) == 0.0);
  CHECK(iteration_bound(constant_problem(2.0, 3.0, 3.0), 1.0) ==
        doctest::Approx(6 * std::exp(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(iteration_bound(constant_problem(1.0, 1.0, 3.0), 1.5), DomainError);
  // monotone in t for a >= 0
  const auto p = make_problem([](double t) { return std::abs(std::sin(7 * t)); }, 1.3, [](double) { return 9.0; }, 0.0, 2.0);
  double last = -1.0;
  for (double t = 0.0; t <= 2.0; t += 0.01) {
    const double b = iteration_bound(p, t);
    CHECK(b >= last);
    last = b;
  }
  CHECK_THROWS_AS(make_problem([](double) { return -1.0; }, 1.0, [](double) { return 2.0; }, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(make_problem([](double) { return 1.0; }, 0.0, [](double) { return 2.0; }, 0.0, 1.0), ConfigError);
}

TEST_CASE("simulate recursion") {
  // degenerate density: the bound is 0 and beta_0 = 0
  const auto zero = simulate_recursion(constant_problem(0.0, 1.0, 2.0), 10, RecursionMode::equality);
  CHECK(zero.violations == 0);
  for (double b : zero.beta.values[0]) CHECK(b == 0.0);

  // K = 2 cannot satisfy |beta_1| < K: beta_1(1) is about (1 + A) e = 5.4
  CHECK_THROWS_AS(simulate_recursion(constant_problem(1.0, 1.0, 2.0), 20, RecursionMode::equality), ConstructionError);

  const auto v = simulate_recursion(constant_problem(1.0, 1.0, 6.0), 20, RecursionMode::equality);
  CHECK(v.violations == 0);
  CHECK(v.worst_margin >= -1e-6);
  // equality mode is nearly tight: beta_0(1) misses e only by the truncated tail
  CHECK(v.beta.values[0].back() == doctest::Approx(std::numbers::e).epsilon(1e-6));
  CHECK_THROWS_AS(simulate_recursion(constant_problem(1.0, 1.0, 6.0), 31, RecursionMode::equality), ParameterError);
}

TEST_CASE("simulate recursion over randomized problems") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const double C = 0.1 + 2.9 * rng.uniform();
    const double amp = 2.0 * rng.uniform();
    const double freq = 1.0 + 6.0 * rng.uniform();
    const double span = 0.2 + 1.3 * rng.uniform();
    auto a = [amp, freq](double t) { return amp * (1.0 + std::sin(freq * t)); };
    // K large enough for the tightest admissible sequence
    const double Amax = 2.0 * amp * span;
    const double K = std::max(2.0, 2.0 * (1.0 + Amax) * std::exp(Amax) * std::max(1.0, C));
    const auto p = make_problem(a, C, [K](double) { return K; }, 0.0, span, 2000);
    for (auto mode : {RecursionMode::equality, RecursionMode::random_slack}) {
      const auto v = simulate_recursion(p, 20, mode, 100 + trial);
      CHECK(v.violations == 0);
    }
  }
}

TEST_CASE("partial sums") {
  const auto p = constant_problem(1.0, 1.0, 2.0);
  CHECK(partial_sum_bound(p, 1.0, 1).partial == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(partial_sum_bound(p, 1.0, 25).partial == doctest::Approx(std::numbers::e).epsilon(1e-10));
  CHECK(partial_sum_bound(p, 1.0, 10).remainder_cap == doctest::Approx(2048.0 / 39916800.0).epsilon(1e-12));
  CHECK_THROWS_AS(partial_sum_bound(p, 1.0, 0), ParameterError);
  // partials increase to the bound; partial + exact tail = bound
  const double bound = iteration_bound(p, 1.0);
  double last = 0.0;
  for (int m = 1; m <= 25; ++m) {
    const auto s = partial_sum_bound(p, 1.0, m);
    CHECK(s.partial >= last);
    CHECK(s.partial <= bound * (1 + 1e-12));
    // for C = 1, K = 2, A = 1 the cap dominates the exact tail at every m
    CHECK(s.partial + s.remainder_cap >= bound * (1 - 1e-12));
    last = s.partial;
  }
  // the cap is not a tail bound for every C: C = 3, K = 1, A = 1, m = 1
  const auto big = constant_problem(1.0, 3.0, 1.0);
  const auto s = partial_sum_bound(big, 1.0, 1);
  CHECK(s.partial + s.remainder_cap < iteration_bound(big, 1.0));
}
