#include <cmath>
#include <numbers>

#include "bkm/errors.hpp"
#include "bkm/euler.hpp"
#include "bkm/spectral.hpp"
#include "doctest.h"

using namespace bkm;

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

double max_diff(const VectorField3& a, const VectorField3& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < a[c].size(); ++i) m = std::max(m, std::abs(a[c][i] - b[c][i]));
  return m;
}

SimConfig fixed(std::size_t n, double dt, double t_end, std::optional<AnalyticFunction> ic) {
  SimConfig c;
  c.grid = Grid3(n, two_pi);
  c.dt = dt;
  c.t_end = t_end;
  c.initial = std::move(ic);
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  SimConfig c;
  CHECK_THROWS_AS(c.validate(), ConfigError);  // neither dt nor cfl
  c.dt = 0.1;
  c.cfl = 0.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.dt = 0.0;
  c.cfl = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.cfl = 0.5;
  c.t_end = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.t_end = 1.0;
  c.initial = analytic::Constant{};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.initial = analytic::TaylorGreen{};
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("rest state stays at rest") {
  const auto s = run(fixed(16, 0.05, 0.2, std::nullopt));
  REQUIRE(s.size() == 5);
  for (const auto& v : s.velocity) CHECK(v.max_norm() == 0.0);
  CHECK(s.time(4) == 0.2);
}

TEST_CASE("Taylor-Green initial energy is pi^3") {
  SimConfig c = fixed(64, 0.01, 0.5, analytic::TaylorGreen{});
  CHECK(std::abs(energy(initial_velocity(c)) - std::pow(std::numbers::pi, 3)) < 1e-8);
}

TEST_CASE("Beltrami field is steady") {
  SimConfig c = fixed(32, 0.01, 1.0, analytic::Abc{1.0, 1.0, 1.0});
  VectorField3 v = initial_velocity(c);
  const VectorField3 v0 = v;
  for (int i = 0; i < 100; ++i) v = step(v, c.dt, c);
  CHECK(max_diff(v, v0) / v0.max_norm() < 1e-6);
  CHECK(v.time_tag() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Taylor-Green: energy and divergence over 10 steps") {
  const auto s = run(fixed(32, 0.01, 0.1, analytic::TaylorGreen{}));
  REQUIRE(s.energy_log.size() == 11);
  const double e0 = s.energy_log.front().energy;
  for (const auto& r : s.energy_log) {
    CHECK(std::abs(r.energy - e0) / e0 < 1e-6);
    CHECK(r.max_div < 1e-10);
  }
  for (const auto& v : s.velocity) CHECK(max_divergence(v) < 1e-10);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s.time(i) > s.time(i - 1));
  // the flow is not trivially steady
  CHECK(max_diff(s.velocity.front(), s.velocity.back()) > 1e-3);
}

TEST_CASE("CFL step size") {
  SimConfig c;
  c.grid = Grid3(32, two_pi);
  c.cfl = 0.5;
  c.initial = analytic::TaylorGreen{};
  const auto v = initial_velocity(c);
  const double h = c.grid.spacing(0);
  CHECK(next_dt(v, c) == doctest::Approx(0.5 / (v[0].max_abs() / h + v[1].max_abs() / h)).epsilon(1e-14));
  CHECK(next_dt(VectorField3::zeros(c.grid), c) == doctest::Approx(0.5 * h));
  c.t_end = 0.3;
  const auto s = run(c);
  CHECK(s.time(s.size() - 1) == 0.3);
}

TEST_CASE("runs are bit-identical") {
  SimConfig c = fixed(16, 0.02, 0.1, analytic::RandomSolenoidal{7, -2.0, 3, 1.0});
  c.snapshot_every = 2;
  const auto a = run(c), b = run(c);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.time(i) == b.time(i));
    CHECK(max_diff(a.velocity[i], b.velocity[i]) == 0.0);
  }
  for (std::size_t i = 0; i < a.energy_log.size(); ++i) CHECK(a.energy_log[i].energy == b.energy_log[i].energy);
}

TEST_CASE("non-finite states stop the run") {
  SimConfig c = fixed(16, 1.0, 3.0, analytic::TaylorGreen{1e200});
  const auto s = run(c);
  CHECK(s.stopped_early);
  CHECK(s.last_valid_time == 0.0);
  CHECK(s.size() == 1);
  CHECK_THROWS_AS(step(initial_velocity(c), 1.0, c), BlowUpSuspected);
}

TEST_CASE("vorticity equation residual") {
  const auto steady = run(fixed(32, 0.01, 0.05, analytic::Abc{}));
  CHECK(vorticity_residual(steady, 2) < 1e-6);
  const auto zero = run(fixed(16, 0.01, 0.03, std::nullopt));
  CHECK(vorticity_residual(zero, 1) == 0.0);
  CHECK_THROWS_AS(vorticity_residual(zero, 0), DomainError);
  CHECK_THROWS_AS(vorticity_residual(zero, 3), DomainError);

  const double dt = 2e-3;
  const double r1 = vorticity_residual(run(fixed(32, dt, 2 * dt, analytic::TaylorGreen{})), 1);
  const double r2 = vorticity_residual(run(fixed(32, dt / 2, dt, analytic::TaylorGreen{})), 1);
  const double order = std::log2(r1 / r2);
  CHECK(order >= 1.8);
  CHECK(order <= 2.2);
}
