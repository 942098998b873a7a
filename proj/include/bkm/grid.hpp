#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace bkm {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

/// Uniform periodic grid on the cube [-L/2, L/2)^3.
///
/// Node (i, j, k) sits at (-L/2 + i h_x, -L/2 + j h_y, -L/2 + k h_z) with
/// h = L / n per axis, so the origin is always a node. Arrays are stored
/// x-fastest: index = i + n_x (j + n_y k).
class Grid3 {
 public:
  Grid3(std::size_t nx, std::size_t ny, std::size_t nz, double box_length);
  Grid3(std::size_t n, double box_length) : Grid3(n, n, n, box_length) {}

  std::size_t nx() const { return n_[0]; }
  std::size_t ny() const { return n_[1]; }
  std::size_t nz() const { return n_[2]; }
  std::size_t n(int axis) const { return n_[axis]; }
  double box_length() const { return length_; }
  double spacing(int axis) const { return length_ / static_cast<double>(n_[axis]); }
  double min_spacing() const;
  double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
  std::size_t size() const { return n_[0] * n_[1] * n_[2]; }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return i + n_[0] * (j + n_[1] * k); }
  double coordinate(int axis, std::ptrdiff_t i) const {
    return -0.5 * length_ + static_cast<double>(i) * spacing(axis);
  }
  Vec3 node(std::size_t i, std::size_t j, std::size_t k) const {
    return {coordinate(0, static_cast<std::ptrdiff_t>(i)), coordinate(1, static_cast<std::ptrdiff_t>(j)),
            coordinate(2, static_cast<std::ptrdiff_t>(k))};
  }
  /// Index of the node nearest to coordinate x along an axis (not wrapped).
  std::ptrdiff_t nearest_index(int axis, double x) const;

  /// Grid with every length multiplied by factor (same point counts).
  Grid3 scaled(double factor) const { return Grid3(n_[0], n_[1], n_[2], length_ * factor); }

  bool operator==(const Grid3& other) const = default;

 private:
  std::array<std::size_t, 3> n_;
  double length_;
};

class ScalarField3 {
 public:
  ScalarField3(Grid3 grid, std::vector<double> values, double time_tag = 0.0);
  static ScalarField3 zeros(const Grid3& grid, double time_tag = 0.0);

  const Grid3& grid() const { return grid_; }
  double time_tag() const { return time_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t idx) const { return values_[idx]; }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return values_[grid_.index(i, j, k)]; }
  std::size_t size() const { return values_.size(); }

  bool all_finite() const;
  double max_abs() const;

  ScalarField3 with_time(double t) const { return ScalarField3(grid_, values_, t); }

 private:
  Grid3 grid_;
  std::vector<double> values_;
  double time_;
};

class VectorField3 {
 public:
  VectorField3(ScalarField3 x, ScalarField3 y, ScalarField3 z);
  explicit VectorField3(std::array<ScalarField3, 3> components);
  static VectorField3 zeros(const Grid3& grid, double time_tag = 0.0);

  const Grid3& grid() const { return c_[0].grid(); }
  double time_tag() const { return c_[0].time_tag(); }
  const ScalarField3& operator[](int axis) const { return c_[axis]; }
  const std::array<ScalarField3, 3>& components() const { return c_; }

  bool all_finite() const;
  /// max over nodes of the Euclidean length.
  double max_norm() const;

 private:
  std::array<ScalarField3, 3> c_;
};

/// Open ball B(center, radius).
struct Ball {
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 1.0;

  Ball() = default;
  Ball(Vec3 c, double r);
  bool contains(const Vec3& x) const;
  /// True when the closed ball lies strictly inside the fundamental domain.
  bool fits_in(const Grid3& grid, double guard = 0.0) const;
};

/// Read-only view of a stack of components on one grid; pointwise norms are
/// Euclidean over the components (Frobenius for tensors).
class FieldView {
 public:
  FieldView(const ScalarField3& s);
  FieldView(const VectorField3& v);
  FieldView(std::span<const ScalarField3> stack);
  FieldView(const std::vector<ScalarField3>& stack) : FieldView(std::span<const ScalarField3>(stack)) {}
  template <std::size_t N>
  FieldView(const std::array<ScalarField3, N>& stack) : FieldView(std::span<const ScalarField3>(stack)) {}

  const Grid3& grid() const { return *grid_; }
  std::size_t components() const { return comps_.size(); }
  std::span<const double> component(std::size_t c) const { return comps_[c]; }
  double pointwise_norm(std::size_t idx) const;

 private:
  const Grid3* grid_;
  std::vector<std::span<const double>> comps_;
};

/// Throws NumericError when the field has NaN/Inf entries.
void require_finite(const FieldView& f, const char* what);

/// Trilinear interpolation with periodic wrap.
double interpolate(const ScalarField3& f, const Vec3& x);

}  // namespace bkm
