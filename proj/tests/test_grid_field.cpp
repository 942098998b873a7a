#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "bkm/analytic.hpp"
#include "bkm/errors.hpp"
#include "bkm/snapshot_io.hpp"
#include "bkm/spectral.hpp"
#include "doctest.h"

using namespace bkm;
using std::numbers::pi;

namespace {

double max_diff(const ScalarField3& a, const ScalarField3& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_diff(const VectorField3& a, const VectorField3& b) {
  return std::max({max_diff(a[0], b[0]), max_diff(a[1], b[1]), max_diff(a[2], b[2])});
}

template <class F>
ScalarField3 field_of(const Grid3& g, F f) {
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < g.nz(); ++k)
    for (std::size_t j = 0; j < g.ny(); ++j)
      for (std::size_t i = 0; i < g.nx(); ++i) v[g.index(i, j, k)] = f(g.node(i, j, k));
  return ScalarField3(g, std::move(v));
}

analytic::TrigPolynomial sin_x() { return {{{1.0, {1, 0, 0}, 0.0}}}; }

}  // namespace

TEST_CASE("grid rejects odd or tiny point counts") {
  CHECK_THROWS_AS(Grid3(3, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid3(7, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid3(8, -1.0), ConfigError);
  const Grid3 g(8, 16, 4, 2.0);
  CHECK(g.size() == 512);
  CHECK(g.spacing(1) == doctest::Approx(0.125));
  CHECK(g.node(4, 8, 2)[0] == 0.0);  // origin is a node
}

TEST_CASE("sample: constant, Taylor-Green node value, truncated-log peak") {
  const Grid3 g(16, 3.0);
  const auto c = sample_scalar(analytic::Constant{1.0}, g, 0.25);
  for (double v : c.values()) CHECK(v == 1.0);
  CHECK(c.time_tag() == 0.25);

  const Grid3 tg(32, 2 * pi);
  const auto v = sample_vector(analytic::TaylorGreen{}, tg);
  // node 24 along x sits at -pi + 24 (2 pi / 32) = pi/2
  CHECK(v[0].at(24, 16, 16) == doctest::Approx(1.0).epsilon(1e-14));

  const Grid3 g64(64, 4.5);
  const auto u = sample_scalar(analytic::TruncatedLog{}, g64);
  double mx = 0.0;
  for (double x : u.values()) mx = std::max(mx, x);
  CHECK(mx == doctest::Approx(std::log(20.0)).epsilon(1e-12));
  CHECK(u.at(32, 32, 32) == mx);

  CHECK_THROWS_AS(sample_vector(analytic::Constant{}, g), ConfigError);
  // support 1.6 plus a 10% guard does not fit a box of side 4
  CHECK_THROWS_AS(sample_scalar(analytic::TruncatedLog{}, Grid3(16, 4.0)), DomainError);
}

TEST_CASE("sample then read reproduces pointwise evaluation bit for bit") {
  const Grid3 g(16, 2 * pi);
  const std::vector<AnalyticFunction> fams{
      analytic::TrigPolynomial{{{0.7, {1, 2, 0}, 0.3}, {-1.1, {0, 1, 3}, 1.0}}},
      analytic::GaussianBump{1.5, 0.3, {0.1, 0.0, -0.2}},
      analytic::TaylorGreen{2.0},
      analytic::Abc{1.0, 0.5, 0.25},
      analytic::RandomSolenoidal{11, -1.5, 3, 1.0},
  };
  for (const auto& f : fams) {
    const auto s = sample(f, g);
    for (std::size_t k = 0; k < g.nz(); k += 3)
      for (std::size_t j = 0; j < g.ny(); j += 5)
        for (std::size_t i = 0; i < g.nx(); i += 2) {
          const Vec3 x = g.node(i, j, k);
          if (is_vector(f)) {
            const Vec3 e = evaluate_vector(f, x);
            const auto& vf = std::get<VectorField3>(s);
            for (int a = 0; a < 3; ++a) CHECK(vf[a].at(i, j, k) == e[a]);
          } else {
            CHECK(std::get<ScalarField3>(s).at(i, j, k) == evaluate_scalar(f, x));
          }
        }
  }
}

TEST_CASE("splitmix64 is reproducible and uniform in [0,1)") {
  SplitMix64 a(42), b(42);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("curl: analytic cases") {
  const Grid3 g(32, 2 * pi);
  const auto zero = ScalarField3::zeros(g);
  const auto sx = sample_scalar(sin_x(), g);
  const auto w = curl(VectorField3(zero, sx, zero));
  const auto cx = field_of(g, [](const Vec3& x) { return std::cos(x[0]); });
  CHECK(max_diff(w[2], cx) < 1e-12);
  CHECK(w[0].max_abs() < 1e-12);
  CHECK(w[1].max_abs() < 1e-12);

  const auto sss = field_of(g, [](const Vec3& x) { return std::sin(x[0]) * std::sin(x[1]) * std::sin(x[2]); });
  CHECK(curl(gradient(sss)).max_norm() < 1e-12);

  const Grid3 g64(64, 2 * pi);
  const auto tg = sample_vector(analytic::TaylorGreen{}, g64);
  const auto om = curl(tg);
  const VectorField3 exact(
      field_of(g64, [](const Vec3& x) { return -std::cos(x[0]) * std::sin(x[1]) * std::sin(x[2]); }),
      field_of(g64, [](const Vec3& x) { return -std::sin(x[0]) * std::cos(x[1]) * std::sin(x[2]); }),
      field_of(g64, [](const Vec3& x) { return 2.0 * std::sin(x[0]) * std::sin(x[1]) * std::cos(x[2]); }));
  CHECK(max_diff(om, exact) < 1e-10);
  CHECK(divergence(om).max_abs() < 1e-12);
}

TEST_CASE("divergence: analytic cases") {
  const Grid3 g(32, 2 * pi);
  const auto zero = ScalarField3::zeros(g);
  const auto d = divergence(VectorField3(sample_scalar(sin_x(), g), zero, zero));
  CHECK(max_diff(d, field_of(g, [](const Vec3& x) { return std::cos(x[0]); })) < 1e-12);
  CHECK(divergence(sample_vector(analytic::TaylorGreen{}, Grid3(64, 2 * pi))).max_abs() < 1e-12);
  const auto rnd = sample_vector(analytic::RandomSolenoidal{3}, g);
  CHECK(divergence(curl(rnd)).max_abs() < 1e-12);
  CHECK(divergence(rnd).max_abs() < 1e-10);
}

TEST_CASE("gradient: analytic cases") {
  const Grid3 g(32, 2 * pi);
  const auto gr = gradient(sample_scalar(sin_x(), g));
  CHECK(max_diff(gr[0], field_of(g, [](const Vec3& x) { return std::cos(x[0]); })) < 1e-12);
  CHECK(gr[1].max_abs() < 1e-12);
  CHECK(gradient(sample_scalar(analytic::Constant{3.0}, g)).max_norm() < 1e-12);
}

// Second-order central differences as an independent oracle: the
// spectral-vs-FD discrepancy is the FD truncation error, O(h^2).
TEST_CASE("gradient and curl agree with central differences at second order") {
  auto fd_error = [](std::size_t n) {
    const Grid3 g(n, 2 * pi);
    const auto u = field_of(g, [](const Vec3& x) { return std::sin(x[0]) * std::sin(x[1]); });
    const auto gr = gradient(u);
    const double h = g.spacing(0);
    double err = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
          const double fd = (u.at((i + 1) % n, j, k) - u.at((i + n - 1) % n, j, k)) / (2 * h);
          err = std::max(err, std::abs(fd - gr[0].at(i, j, k)));
        }
    return err;
  };
  const double e32 = fd_error(32), e64 = fd_error(64);
  const double order = std::log2(e32 / e64);
  CHECK(order >= 1.8);
  CHECK(order <= 2.2);

  auto curl_fd_error = [](std::size_t n) {
    const Grid3 g(n, 2 * pi);
    const auto v = sample_vector(analytic::TaylorGreen{}, g);
    const auto w = curl(v);
    const double h = g.spacing(0);
    double err = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
          // omega_z = d_x v_y - d_y v_x
          const double dxvy = (v[1].at((i + 1) % n, j, k) - v[1].at((i + n - 1) % n, j, k)) / (2 * h);
          const double dyvx = (v[0].at(i, (j + 1) % n, k) - v[0].at(i, (j + n - 1) % n, k)) / (2 * h);
          err = std::max(err, std::abs(dxvy - dyvx - w[2].at(i, j, k)));
        }
    return err;
  };
  const double c_order = std::log2(curl_fd_error(32) / curl_fd_error(64));
  CHECK(c_order >= 1.8);
  CHECK(c_order <= 2.2);
}

TEST_CASE("leray projection") {
  const Grid3 g(32, 2 * pi);
  const auto zero = ScalarField3::zeros(g);
  const auto tg = sample_vector(analytic::TaylorGreen{}, g);
  CHECK(max_diff(leray_project(tg), tg) < 1e-12);

  const auto grad_sin = VectorField3(field_of(g, [](const Vec3& x) { return std::cos(x[0]); }), zero, zero);
  CHECK(leray_project(grad_sin).max_norm() < 1e-12);

  const auto mixed = VectorField3(sample_scalar(sin_x(), g),
                                  field_of(g, [](const Vec3& x) { return std::sin(x[1]); }), zero);
  const auto p = leray_project(mixed);
  CHECK(divergence(p).max_abs() < 1e-12);
  CHECK(max_diff(leray_project(p), p) < 1e-12);

  // a rough, non-solenoidal field
  SplitMix64 rng(5);
  std::array<std::vector<double>, 3> c;
  for (auto& comp : c) {
    comp.resize(g.size());
    for (auto& x : comp) x = rng.normal();
  }
  const VectorField3 noise(ScalarField3(g, c[0]), ScalarField3(g, c[1]), ScalarField3(g, c[2]));
  const auto pn = leray_project(noise);
  CHECK(divergence(pn).max_abs() < 1e-12);
  CHECK(max_diff(leray_project(pn), pn) < 1e-12);
}

TEST_CASE("operators reject non-finite input") {
  const Grid3 g(8, 1.0);
  std::vector<double> bad(g.size(), 0.0);
  bad[3] = std::nan("");
  const ScalarField3 b(g, bad);
  CHECK_THROWS_AS(gradient(b), NumericError);
  CHECK_THROWS_AS(curl(VectorField3(b, b, b)), NumericError);
  CHECK_THROWS_AS(leray_project(VectorField3(b, b, b)), NumericError);
}

TEST_CASE("dealias removes the top third of the spectrum") {
  const Grid3 g(24, 2 * pi);
  const auto low = field_of(g, [](const Vec3& x) { return std::sin(8 * x[0]) + std::cos(3 * x[1]); });
  CHECK(max_diff(dealias(low), low) < 1e-12);
  const auto high = field_of(g, [](const Vec3& x) { return std::sin(9 * x[0]); });
  CHECK(dealias(high).max_abs() < 1e-12);
}

TEST_CASE("hessian and jacobian of trig fields") {
  const Grid3 g(32, 2 * pi);
  const auto u = field_of(g, [](const Vec3& x) { return std::sin(x[0]) * std::cos(2 * x[1]); });
  const auto h = hessian(u);
  const auto hxy = field_of(g, [](const Vec3& x) { return -2 * std::cos(x[0]) * std::sin(2 * x[1]); });
  CHECK(max_diff(h[1], hxy) < 1e-11);
  CHECK(max_diff(h[3], hxy) < 1e-11);
  CHECK(max_diff(h[4], field_of(g, [](const Vec3& x) { return -4 * std::sin(x[0]) * std::cos(2 * x[1]); })) < 1e-11);
  const auto tg = sample_vector(analytic::TaylorGreen{}, g);
  const auto J = jacobian(tg);
  // trace of the velocity gradient is the divergence
  double tr = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) tr = std::max(tr, std::abs(J[0][i] + J[4][i] + J[8][i]));
  CHECK(tr < 1e-12);
}

TEST_CASE("snapshot round trip is bit exact") {
  const auto dir = std::filesystem::temp_directory_path() / "bkm_snapshot_test";
  std::filesystem::create_directories(dir);
  const Grid3 g(8, 6, 4, 1.5);
  const auto v = sample_vector(analytic::RandomSolenoidal{9, -2.0, 2, 1.0, 1.5}, g, 0.125);
  write_snapshot(dir / "v.bkm", v);
  const auto s = read_snapshot(dir / "v.bkm");
  CHECK(s.grid == g);
  CHECK(s.time == 0.125);
  REQUIRE(s.components.size() == 3);
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(s.components[a][i] == v[a][i]);
  CHECK(std::filesystem::file_size(dir / "v.bkm") == 4 + 12 + 16 + 4 + 3 * 8 * g.size());

  // header layout in little-endian
  std::ifstream is(dir / "v.bkm", std::ios::binary);
  unsigned char hdr[8];
  is.read(reinterpret_cast<char*>(hdr), 8);
  CHECK(hdr[0] == 'B');
  CHECK(hdr[3] == '1');
  CHECK(hdr[4] == 8);
  CHECK(hdr[5] == 0);

  std::ofstream(dir / "bad.bkm") << "NOPE";
  CHECK_THROWS_AS(read_snapshot(dir / "bad.bkm"), ConfigError);
  CHECK_THROWS_AS(read_snapshot(dir / "missing.bkm"), ConfigError);
  std::filesystem::remove_all(dir);
}
