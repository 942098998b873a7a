#include <cmath>

#include "bkm/analytic.hpp"
#include "bkm/errors.hpp"
#include "bkm/extension.hpp"
#include "bkm/spectral.hpp"
#include "doctest.h"

using namespace bkm;

namespace {

Vec3 random_point(SplitMix64& rng, double lo, double hi) {
  Vec3 y;
  for (auto& c : y) c = lo + (hi - lo) * rng.uniform();
  return y;
}

}  // namespace

TEST_CASE("reflection map") {
  const ReflectionMap T(1.0);
  const Vec3 t = reflect(T, {2, 0, 0});
  CHECK(t[0] == doctest::Approx(0.5));
  CHECK(t[1] == 0.0);
  CHECK_THROWS_AS(reflect(T, {0, 0, 0}), DomainError);
  CHECK_THROWS_AS(ReflectionMap(0.0), DomainError);

  const ReflectionMap T2(0.7);
  SplitMix64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    Vec3 y = random_point(rng, -3, 3);
    const Vec3 back = reflect(T2, reflect(T2, y));
    CHECK(norm(back - y) <= 1e-14 * norm(y));
    // the sphere |y| = r is fixed
    const Vec3 s = (0.7 / norm(y)) * y;
    CHECK(norm(reflect(T2, s) - s) <= 1e-15);
  }
}

TEST_CASE("jacobian determinant of the reflection") {
  const ReflectionMap T(1.0);
  CHECK(jacobian_det(T, {2, 0, 0}) == doctest::Approx(0.015625).epsilon(1e-12));
  CHECK(jacobian_det(T, {0, 0.6, 0.8}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(jacobian_det(T, {0, 0, 0}), DomainError);
  const ReflectionMap T2(1.3);
  SplitMix64 rng(2);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 y = random_point(rng, -4, 4);
    const double e = jacobian_det(T2, y), c = jacobian_det_closed_form(T2, y);
    CHECK(std::abs(e - c) <= 1e-12 * c);
  }
  // columns of DT are orthogonal with equal length r^2/|y|^2
  const Mat3 m = jacobian_matrix(T2, {0.3, -1.1, 0.5});
  const double s = 1.3 * 1.3 / (0.09 + 1.21 + 0.25);
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      double d = 0.0;
      for (int i = 0; i < 3; ++i) d += m[i][k] * m[i][l];
      CHECK(d == doctest::Approx(k == l ? s * s : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("distance identity") {
  const ReflectionMap T(1.0);
  CHECK(distance_identity_check(T, {2, 0, 0}, {0, 2, 0}) < 1e-14);
  CHECK(norm(reflect(T, {2, 0, 0}) - reflect(T, {0, 2, 0})) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
  CHECK(distance_identity_check(T, {1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK_THROWS_AS(distance_identity_check(T, {0, 0, 0}, {1, 0, 0}), DomainError);
  const ReflectionMap T2(0.4);
  SplitMix64 rng(3);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i)
    worst = std::max(worst, distance_identity_check(T2, random_point(rng, -2, 2), random_point(rng, -2, 2)));
  CHECK(worst < 1e-12);
}

TEST_CASE("reflected balls stay inside the ball around the reflected center") {
  const double r = 1.0;
  const ReflectionMap T(r);
  SplitMix64 rng(4);
  int tested = 0;
  while (tested < 300) {
    const Vec3 x0 = random_point(rng, -4, 4);
    const double rho = 0.05 + 0.9 * rng.uniform();
    // B(x0, rho) inside B(4r) minus B(r)
    if (norm(x0) - rho <= r || norm(x0) + rho >= 4 * r) continue;
    ++tested;
    const Vec3 tx0 = reflect(T, x0);
    for (int s = 0; s < 50; ++s) {
      Vec3 d = random_point(rng, -1, 1);
      if (norm(d) == 0.0) continue;
      const Vec3 y = x0 + (rho * (1 - 1e-9) / norm(d)) * d;
      CHECK(norm(reflect(T, y) - tx0) < rho);
    }
  }
}

TEST_CASE("extension of constants and of |x|^2") {
  const Grid3 g(32, 4.0);
  const double r = 0.6;
  const auto one = sample_scalar(analytic::Constant{1.0}, g);
  const auto U = extend(one, r, g);
  const auto phi = extension_cutoff(r);
  for (std::size_t k = 0; k < g.nz(); ++k)
    for (std::size_t j = 0; j < g.ny(); ++j)
      for (std::size_t i = 0; i < g.nx(); ++i) {
        const Vec3 x = g.node(i, j, k);
        const double n = norm(x);
        if (n < 2 * r) CHECK(U.at(i, j, k) == 1.0);
        if (n >= r) CHECK(U.at(i, j, k) == doctest::Approx(phi(x)).epsilon(1e-14));
        if (n >= 3 * r) CHECK(U.at(i, j, k) == 0.0);
      }

  // u = |x|^2 on B(1): U = phi(x) / |x|^2 outside, up to trilinear interpolation
  const Grid3 g64(64, 6.4);
  const auto sq = sample_scalar(analytic::RadialPower{2.0}, g64);
  const auto E = extend(sq, 1.0, g64);
  const auto phi1 = extension_cutoff(1.0);
  const double h = g64.spacing(0);
  double worst = 0.0;
  for (std::size_t k = 0; k < g64.nz(); ++k)
    for (std::size_t j = 0; j < g64.ny(); ++j)
      for (std::size_t i = 0; i < g64.nx(); ++i) {
        const Vec3 x = g64.node(i, j, k);
        const double n2 = dot(x, x);
        if (n2 < 1.0) {
          CHECK(E.at(i, j, k) == sq.at(i, j, k));
        } else {
          worst = std::max(worst, std::abs(E.at(i, j, k) - phi1(x) / n2));
        }
      }
  // trilinear error of |x|^2 is at most 3 h^2 / 4
  CHECK(worst <= 0.75 * h * h);

  CHECK_THROWS_AS(extend(one, 0.7, g), DomainError);
}

TEST_CASE("extension bound reports") {
  const Grid3 g(32, 4.0);
  const double r = 0.5;
  const BmoConfig cfg;
  const auto zero = extension_bounds_report(ScalarField3::zeros(g), r, 4.0, cfg);
  CHECK(zero.gradient.ratio == 0.0);
  CHECK(zero.bmo.ratio == 0.0);

  // constant: grad u = 0 on B(r), so the lhs is the cutoff-gradient term only
  const double c0 = 1.7;
  const auto rep = extension_bounds_report(sample_scalar(analytic::Constant{c0}, g), r, 4.0, cfg);
  CHECK(rep.gradient.rhs_terms[0].second < 1e-12);
  const auto phi = extension_cutoff(r).sample(g);
  CHECK(rep.gradient.lhs == doctest::Approx(c0 * lq_norm(gradient(phi), 4.0)).epsilon(1e-12));
  CHECK(rep.gradient.ratio > 0.0);
  CHECK(std::isfinite(rep.gradient.ratio));
  CHECK(rep.bmo.lhs > 0.0);
  CHECK(std::isfinite(rep.bmo.ratio));
  CHECK(rep.gradient.params.at("q") == 4.0);

  CHECK_THROWS_AS(extension_bounds_report(ScalarField3::zeros(g), r, 3.0, cfg), ParameterError);
}
