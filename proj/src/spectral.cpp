#include "bkm/spectral.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "bkm/errors.hpp"

namespace bkm {

namespace {

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : p(fftw_malloc(bytes)) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* real() { return static_cast<double*>(p); }
  fftw_complex* cplx() { return static_cast<fftw_complex*>(p); }
  void* p;
};

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// Planning is not thread-safe in FFTW; executing planned transforms on new
// arrays is. Plans live until process exit.
std::mutex plan_mutex;

PlanPair plans_for(const Grid3& g) {
  static std::map<std::tuple<std::size_t, std::size_t, std::size_t>, PlanPair> cache;
  std::lock_guard lock(plan_mutex);
  const auto key = std::make_tuple(g.nx(), g.ny(), g.nz());
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const int nz = static_cast<int>(g.nz()), ny = static_cast<int>(g.ny()), nx = static_cast<int>(g.nx());
  const std::size_t nc = (g.nx() / 2 + 1) * g.ny() * g.nz();
  FftwBuffer r(sizeof(double) * g.size());
  FftwBuffer c(sizeof(fftw_complex) * nc);
  PlanPair p;
  p.r2c = fftw_plan_dft_r2c_3d(nz, ny, nx, r.real(), c.cplx(), FFTW_ESTIMATE);
  p.c2r = fftw_plan_dft_c2r_3d(nz, ny, nx, c.cplx(), r.real(), FFTW_ESTIMATE);
  if (!p.r2c || !p.c2r) throw NumericError("FFTW planning failed");
  cache.emplace(key, p);
  return p;
}

void require_finite_values(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw NumericError(std::string(what) + ": input has non-finite values");
}

ScalarField3 to_field(const Spectral& s, const std::vector<Complex>& c, double t) {
  return ScalarField3(s.grid(), s.inverse(c), t);
}

}  // namespace

Spectral::Spectral(const Grid3& grid) : grid_(grid), nxh_(grid.nx() / 2 + 1) {
  const std::size_t n = spectral_size();
  std::array<std::vector<int>, 3> axis_modes;
  std::array<std::size_t, 3> len{nxh_, grid.ny(), grid.nz()};
  for (int a = 0; a < 3; ++a) {
    const auto na = static_cast<int>(grid.n(a));
    axis_modes[a].resize(len[a]);
    for (std::size_t i = 0; i < len[a]; ++i) {
      const int ii = static_cast<int>(i);
      axis_modes[a][i] = (a == 0 || ii <= na / 2) ? ii : ii - na;
    }
  }
  for (int a = 0; a < 3; ++a) {
    k_[a].resize(n);
    m_[a].resize(n);
  }
  keep_.resize(n);
  for (std::size_t kz = 0; kz < grid.nz(); ++kz)
    for (std::size_t jy = 0; jy < grid.ny(); ++jy)
      for (std::size_t ix = 0; ix < nxh_; ++ix) {
        const std::size_t idx = ix + nxh_ * (jy + grid.ny() * kz);
        const std::array<int, 3> m{axis_modes[0][ix], axis_modes[1][jy], axis_modes[2][kz]};
        bool keep = true;
        for (int a = 0; a < 3; ++a) {
          const auto na = static_cast<int>(grid.n(a));
          m_[a][idx] = m[a];
          const bool nyquist = std::abs(m[a]) == na / 2;
          k_[a][idx] = nyquist ? 0.0 : 2.0 * std::numbers::pi / grid.box_length() * m[a];
          if (3 * std::abs(m[a]) > na) keep = false;
        }
        keep_[idx] = keep ? 1 : 0;
      }
}

double Spectral::k(int axis, std::size_t idx) const { return k_[axis][idx]; }
int Spectral::mode(int axis, std::size_t idx) const { return m_[axis][idx]; }

std::vector<Complex> Spectral::forward(std::span<const double> values) const {
  if (values.size() != grid_.size()) throw ConstructionError("transform size mismatch");
  const PlanPair p = plans_for(grid_);
  FftwBuffer r(sizeof(double) * grid_.size());
  FftwBuffer c(sizeof(fftw_complex) * spectral_size());
  std::memcpy(r.p, values.data(), sizeof(double) * values.size());
  fftw_execute_dft_r2c(p.r2c, r.real(), c.cplx());
  std::vector<Complex> out(spectral_size());
  std::memcpy(out.data(), c.p, sizeof(fftw_complex) * out.size());
  return out;
}

std::vector<double> Spectral::inverse(std::span<const Complex> coeffs) const {
  if (coeffs.size() != spectral_size()) throw ConstructionError("transform size mismatch");
  const PlanPair p = plans_for(grid_);
  FftwBuffer r(sizeof(double) * grid_.size());
  FftwBuffer c(sizeof(fftw_complex) * spectral_size());
  std::memcpy(c.p, coeffs.data(), sizeof(fftw_complex) * coeffs.size());
  fftw_execute_dft_c2r(p.c2r, c.cplx(), r.real());  // destroys c
  std::vector<double> out(grid_.size());
  const double scale = 1.0 / static_cast<double>(grid_.size());
  const double* src = r.real();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = src[i] * scale;
  return out;
}

void Spectral::differentiate(std::vector<Complex>& c, int axis) const {
  const auto& k = k_[axis];
  const auto n = static_cast<std::ptrdiff_t>(c.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) c[i] = Complex(-k[i] * c[i].imag(), k[i] * c[i].real());
}

void Spectral::dealias(std::vector<Complex>& c) const {
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!keep_[i]) c[i] = 0.0;
}

void Spectral::project(std::array<std::vector<Complex>, 3>& c) const {
  const auto n = static_cast<std::ptrdiff_t>(spectral_size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double kx = k_[0][i], ky = k_[1][i], kz = k_[2][i];
    const double k2 = kx * kx + ky * ky + kz * kz;
    if (k2 == 0.0) continue;
    const Complex kv = (kx * c[0][i] + ky * c[1][i] + kz * c[2][i]) / k2;
    c[0][i] -= kx * kv;
    c[1][i] -= ky * kv;
    c[2][i] -= kz * kv;
  }
}

VectorField3 gradient(const ScalarField3& u) {
  require_finite_values(u.values(), "gradient");
  const Spectral s(u.grid());
  const auto hat = s.forward(u.values());
  std::array<ScalarField3, 3> out{ScalarField3::zeros(u.grid()), ScalarField3::zeros(u.grid()),
                                  ScalarField3::zeros(u.grid())};
  for (int a = 0; a < 3; ++a) {
    auto d = hat;
    s.differentiate(d, a);
    out[a] = to_field(s, d, u.time_tag());
  }
  return VectorField3(std::move(out));
}

ScalarField3 divergence(const VectorField3& v) {
  for (int a = 0; a < 3; ++a) require_finite_values(v[a].values(), "divergence");
  const Spectral s(v.grid());
  std::vector<Complex> sum(s.spectral_size(), Complex(0.0));
  for (int a = 0; a < 3; ++a) {
    auto d = s.forward(v[a].values());
    s.differentiate(d, a);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += d[i];
  }
  return to_field(s, sum, v.time_tag());
}

VectorField3 curl(const VectorField3& v) {
  for (int a = 0; a < 3; ++a) require_finite_values(v[a].values(), "curl");
  const Spectral s(v.grid());
  std::array<std::vector<Complex>, 3> hat{s.forward(v[0].values()), s.forward(v[1].values()),
                                          s.forward(v[2].values())};
  std::array<ScalarField3, 3> out{ScalarField3::zeros(v.grid()), ScalarField3::zeros(v.grid()),
                                  ScalarField3::zeros(v.grid())};
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    // (curl v)_a = d_b v_c - d_c v_b
    std::vector<Complex> w(s.spectral_size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      const Complex t = s.k(b, i) * hat[c][i] - s.k(c, i) * hat[b][i];
      w[i] = Complex(-t.imag(), t.real());
    }
    out[a] = to_field(s, w, v.time_tag());
  }
  return VectorField3(std::move(out));
}

VectorField3 leray_project(const VectorField3& v) {
  for (int a = 0; a < 3; ++a) require_finite_values(v[a].values(), "leray_project");
  const Spectral s(v.grid());
  std::array<std::vector<Complex>, 3> hat{s.forward(v[0].values()), s.forward(v[1].values()),
                                          s.forward(v[2].values())};
  s.project(hat);
  return VectorField3(to_field(s, hat[0], v.time_tag()), to_field(s, hat[1], v.time_tag()),
                      to_field(s, hat[2], v.time_tag()));
}

ScalarField3 dealias(const ScalarField3& u) {
  require_finite_values(u.values(), "dealias");
  const Spectral s(u.grid());
  auto hat = s.forward(u.values());
  s.dealias(hat);
  return to_field(s, hat, u.time_tag());
}

std::array<ScalarField3, 9> jacobian(const VectorField3& v) {
  std::array<ScalarField3, 9> out{ScalarField3::zeros(v.grid()), ScalarField3::zeros(v.grid()),
                                  ScalarField3::zeros(v.grid()), ScalarField3::zeros(v.grid()),
                                  ScalarField3::zeros(v.grid()), ScalarField3::zeros(v.grid()),
                                  ScalarField3::zeros(v.grid()), ScalarField3::zeros(v.grid()),
                                  ScalarField3::zeros(v.grid())};
  for (int i = 0; i < 3; ++i) {
    const VectorField3 g = gradient(v[i]);
    for (int j = 0; j < 3; ++j) out[3 * i + j] = g[j];
  }
  return out;
}

std::array<ScalarField3, 9> hessian(const ScalarField3& u) {
  require_finite_values(u.values(), "hessian");
  const Spectral s(u.grid());
  const auto hat = s.forward(u.values());
  std::array<ScalarField3, 9> out{ScalarField3::zeros(u.grid()), ScalarField3::zeros(u.grid()),
                                  ScalarField3::zeros(u.grid()), ScalarField3::zeros(u.grid()),
                                  ScalarField3::zeros(u.grid()), ScalarField3::zeros(u.grid()),
                                  ScalarField3::zeros(u.grid()), ScalarField3::zeros(u.grid()),
                                  ScalarField3::zeros(u.grid())};
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      auto d = hat;
      s.differentiate(d, i);
      s.differentiate(d, j);
      out[3 * i + j] = to_field(s, d, u.time_tag());
      if (j != i) out[3 * j + i] = out[3 * i + j];
    }
  return out;
}

std::vector<ScalarField3> second_derivatives(const VectorField3& v) {
  std::vector<ScalarField3> out;
  out.reserve(27);
  for (int c = 0; c < 3; ++c) {
    auto h = hessian(v[c]);
    for (auto& f : h) out.push_back(std::move(f));
  }
  return out;
}

}  // namespace bkm
