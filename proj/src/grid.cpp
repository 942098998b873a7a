#include "bkm/grid.hpp"

#include <algorithm>
#include <string>

#include "bkm/errors.hpp"

namespace bkm {

Grid3::Grid3(std::size_t nx, std::size_t ny, std::size_t nz, double box_length)
    : n_{nx, ny, nz}, length_(box_length) {
  for (auto n : n_) {
    if (n < 4 || n % 2 != 0) {
      throw ConfigError("grid point counts must be even and >= 4, got " + std::to_string(n));
    }
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw ConfigError("box_length must be positive and finite");
  }
}

double Grid3::min_spacing() const { return std::min({spacing(0), spacing(1), spacing(2)}); }

std::ptrdiff_t Grid3::nearest_index(int axis, double x) const {
  return static_cast<std::ptrdiff_t>(std::llround((x + 0.5 * length_) / spacing(axis)));
}

ScalarField3::ScalarField3(Grid3 grid, std::vector<double> values, double time_tag)
    : grid_(grid), values_(std::move(values)), time_(time_tag) {
  if (values_.size() != grid_.size()) {
    throw ConstructionError("field value count " + std::to_string(values_.size()) +
                            " does not match grid size " + std::to_string(grid_.size()));
  }
}

ScalarField3 ScalarField3::zeros(const Grid3& grid, double time_tag) {
  return ScalarField3(grid, std::vector<double>(grid.size(), 0.0), time_tag);
}

bool ScalarField3::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField3::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

VectorField3::VectorField3(ScalarField3 x, ScalarField3 y, ScalarField3 z)
    : VectorField3(std::array<ScalarField3, 3>{std::move(x), std::move(y), std::move(z)}) {}

VectorField3::VectorField3(std::array<ScalarField3, 3> components) : c_(std::move(components)) {
  for (int a = 1; a < 3; ++a) {
    if (!(c_[a].grid() == c_[0].grid()) || c_[a].time_tag() != c_[0].time_tag()) {
      throw ConstructionError("vector components must share one grid and time tag");
    }
  }
}

VectorField3 VectorField3::zeros(const Grid3& grid, double time_tag) {
  return VectorField3(ScalarField3::zeros(grid, time_tag), ScalarField3::zeros(grid, time_tag),
                      ScalarField3::zeros(grid, time_tag));
}

bool VectorField3::all_finite() const {
  return c_[0].all_finite() && c_[1].all_finite() && c_[2].all_finite();
}

double VectorField3::max_norm() const {
  double m = 0.0;
  const auto n = c_[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    const double s = c_[0][i] * c_[0][i] + c_[1][i] * c_[1][i] + c_[2][i] * c_[2][i];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

Ball::Ball(Vec3 c, double r) : center(c), radius(r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("ball radius must be positive");
}

bool Ball::contains(const Vec3& x) const {
  const Vec3 d = x - center;
  return dot(d, d) < radius * radius;
}

bool Ball::fits_in(const Grid3& grid, double guard) const {
  const double half = 0.5 * grid.box_length();
  for (int a = 0; a < 3; ++a) {
    if (center[a] - radius - guard < -half) return false;
    if (center[a] + radius + guard >= half) return false;
  }
  return true;
}

FieldView::FieldView(const ScalarField3& s) : grid_(&s.grid()), comps_{s.values()} {}

FieldView::FieldView(const VectorField3& v)
    : grid_(&v.grid()), comps_{v[0].values(), v[1].values(), v[2].values()} {}

FieldView::FieldView(std::span<const ScalarField3> stack) {
  if (stack.empty()) throw ConstructionError("field stack must not be empty");
  grid_ = &stack.front().grid();
  for (const auto& s : stack) {
    if (!(s.grid() == *grid_)) throw ConstructionError("field stack components must share one grid");
    comps_.push_back(s.values());
  }
}

double FieldView::pointwise_norm(std::size_t idx) const {
  if (comps_.size() == 1) return std::abs(comps_[0][idx]);
  double s = 0.0;
  for (const auto& c : comps_) s += c[idx] * c[idx];
  return std::sqrt(s);
}

void require_finite(const FieldView& f, const char* what) {
  for (std::size_t c = 0; c < f.components(); ++c) {
    for (double v : f.component(c)) {
      if (!std::isfinite(v)) throw NumericError(std::string("non-finite value in ") + what);
    }
  }
}

double interpolate(const ScalarField3& f, const Vec3& x) {
  const Grid3& g = f.grid();
  std::array<std::size_t, 3> i0{}, i1{};
  std::array<double, 3> w{};
  for (int a = 0; a < 3; ++a) {
    const double s = (x[a] + 0.5 * g.box_length()) / g.spacing(a);
    const double fl = std::floor(s);
    w[a] = s - fl;
    const auto n = static_cast<long long>(g.n(a));
    long long i = static_cast<long long>(fl) % n;
    if (i < 0) i += n;
    i0[a] = static_cast<std::size_t>(i);
    i1[a] = static_cast<std::size_t>((i + 1) % n);
  }
  auto v = [&](std::size_t i, std::size_t j, std::size_t k) { return f.at(i, j, k); };
  const double c00 = v(i0[0], i0[1], i0[2]) * (1 - w[0]) + v(i1[0], i0[1], i0[2]) * w[0];
  const double c10 = v(i0[0], i1[1], i0[2]) * (1 - w[0]) + v(i1[0], i1[1], i0[2]) * w[0];
  const double c01 = v(i0[0], i0[1], i1[2]) * (1 - w[0]) + v(i1[0], i0[1], i1[2]) * w[0];
  const double c11 = v(i0[0], i1[1], i1[2]) * (1 - w[0]) + v(i1[0], i1[1], i1[2]) * w[0];
  const double c0 = c00 * (1 - w[1]) + c10 * w[1];
  const double c1 = c01 * (1 - w[1]) + c11 * w[1];
  return c0 * (1 - w[2]) + c1 * w[2];
}

}  // namespace bkm
