#pragma once

#include <array>
#include <complex>
#include <vector>

#include "bkm/grid.hpp"

namespace bkm {

using Complex = std::complex<double>;

/// Real-to-complex transform layout for one grid: (n_z, n_y, n_x/2 + 1)
/// complex coefficients, x-fastest. Wavenumbers are 2 pi m / L; the
/// derivative multipliers have the Nyquist entry zeroed.
class Spectral {
 public:
  explicit Spectral(const Grid3& grid);

  const Grid3& grid() const { return grid_; }
  std::size_t spectral_size() const { return nxh_ * grid_.ny() * grid_.nz(); }
  std::size_t half_nx() const { return nxh_; }

  /// Unnormalized forward transform.
  std::vector<Complex> forward(std::span<const double> values) const;
  /// Inverse transform including the 1/N normalization.
  std::vector<double> inverse(std::span<const Complex> coeffs) const;

  /// Derivative multiplier i k_axis for spectral index idx (Nyquist zeroed).
  double k(int axis, std::size_t idx) const;
  /// Integer mode number |m| along axis (for dealiasing masks).
  int mode(int axis, std::size_t idx) const;
  /// 2/3-rule mask: false when any |m_axis| > n_axis / 3.
  bool kept(std::size_t idx) const { return keep_[idx] != 0; }

  /// Multiplies by i k_axis in place.
  void differentiate(std::vector<Complex>& c, int axis) const;
  /// Zeroes the modes removed by the 2/3 rule.
  void dealias(std::vector<Complex>& c) const;
  /// Leray projection of three spectral components in place.
  void project(std::array<std::vector<Complex>, 3>& c) const;

 private:
  Grid3 grid_;
  std::size_t nxh_;
  std::array<std::vector<double>, 3> k_;
  std::array<std::vector<int>, 3> m_;
  std::vector<unsigned char> keep_;
};

VectorField3 gradient(const ScalarField3& u);
ScalarField3 divergence(const VectorField3& v);
VectorField3 curl(const VectorField3& v);
VectorField3 leray_project(const VectorField3& v);
ScalarField3 dealias(const ScalarField3& u);

/// Velocity-gradient tensor, entry [3 i + j] = d_j v_i.
std::array<ScalarField3, 9> jacobian(const VectorField3& v);
/// All 9 second derivatives d_i d_j u, entry [3 i + j].
std::array<ScalarField3, 9> hessian(const ScalarField3& u);
/// All 27 second derivatives of a vector field, entry [9 c + 3 i + j] = d_i d_j v_c.
std::vector<ScalarField3> second_derivatives(const VectorField3& v);

}  // namespace bkm
