#pragma once

#include <array>

#include "bkm/ball_norms.hpp"
#include "bkm/grid.hpp"
#include "bkm/report.hpp"

namespace bkm {

/// T(y) = r^2 y / |y|^2, the inversion in the sphere |y| = r.
struct ReflectionMap {
  double r = 1.0;

  explicit ReflectionMap(double radius);
};

using Mat3 = std::array<std::array<double, 3>, 3>;

Vec3 reflect(const ReflectionMap& T, const Vec3& y);
/// dT_i / dy_j = (r^2/|y|^2) delta_ij - 2 r^2 y_i y_j / |y|^4.
Mat3 jacobian_matrix(const ReflectionMap& T, const Vec3& y);
/// |det DT(y)| from the explicit matrix.
double jacobian_det(const ReflectionMap& T, const Vec3& y);
/// (r / |y|)^6.
double jacobian_det_closed_form(const ReflectionMap& T, const Vec3& y);
/// Relative error between |T(x) - T(y)| and r^2 |x - y| / (|x| |y|); 0 when both vanish.
double distance_identity_check(const ReflectionMap& T, const Vec3& x, const Vec3& y);

/// Cutoff of the extension: 1 on B(2r), 0 outside B(3r).
CutoffFunction extension_cutoff(double r);

/// U = u on B(r), U = u(T x) phi(x) outside, for the ball B(0, r). u is read
/// by trilinear interpolation on its own grid (the stencil touches at most
/// the first node layer outside B(r), which must carry a smooth continuation).
ScalarField3 extend(const ScalarField3& u, double r, const Grid3& target);

struct ExtensionBounds {
  InequalityReport gradient;  // ||grad U||_q vs ||grad u||_{q,B(r)} + r^{-1+3/q-3/2} ||u||_{2,B(r)}
  InequalityReport bmo;       // |U|_BMO vs ||u||_{BMO(B(r))}
};

/// Padding of the BMO domain for |U|_BMO relative to supp U = B(3r).
inline constexpr double kExtensionPadding = 1.1;

ExtensionBounds extension_bounds_report(const ScalarField3& u, double r, double q, const BmoConfig& cfg);
InequalityReport extension_gradient_report(const ScalarField3& u, double r, double q);
InequalityReport extension_bmo_report(const ScalarField3& u, double r, const BmoConfig& cfg);

}  // namespace bkm
