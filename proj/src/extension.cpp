#include "bkm/extension.hpp"

#include <cmath>

#include "bkm/errors.hpp"
#include "bkm/spectral.hpp"

namespace bkm {

namespace {

double norm2_nonzero(const Vec3& y, const char* what) {
  const double n2 = dot(y, y);
  if (!(n2 > 0.0)) throw DomainError(std::string(what) + ": reflection is undefined at the origin");
  return n2;
}

}  // namespace

ReflectionMap::ReflectionMap(double radius) : r(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("reflection radius must be positive");
}

Vec3 reflect(const ReflectionMap& T, const Vec3& y) {
  const double n2 = norm2_nonzero(y, "reflect");
  return (T.r * T.r / n2) * y;
}

Mat3 jacobian_matrix(const ReflectionMap& T, const Vec3& y) {
  const double n2 = norm2_nonzero(y, "jacobian");
  const double r2 = T.r * T.r;
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = (i == j ? r2 / n2 : 0.0) - 2.0 * r2 * y[i] * y[j] / (n2 * n2);
  return m;
}

double jacobian_det(const ReflectionMap& T, const Vec3& y) {
  const Mat3 m = jacobian_matrix(T, y);
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  return std::abs(det);
}

double jacobian_det_closed_form(const ReflectionMap& T, const Vec3& y) {
  const double n2 = norm2_nonzero(y, "jacobian");
  const double s = T.r * T.r / n2;  // (r/|y|)^2
  return s * s * s;
}

double distance_identity_check(const ReflectionMap& T, const Vec3& x, const Vec3& y) {
  const double nx = std::sqrt(norm2_nonzero(x, "distance identity"));
  const double ny = std::sqrt(norm2_nonzero(y, "distance identity"));
  const double lhs = norm(reflect(T, x) - reflect(T, y));
  const double rhs = T.r * T.r * norm(x - y) / (nx * ny);
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : INFINITY;
  return std::abs(lhs - rhs) / rhs;
}

CutoffFunction extension_cutoff(double r) { return CutoffFunction({0.0, 0.0, 0.0}, 2.0 * r, 3.0 * r); }

ScalarField3 extend(const ScalarField3& u, double r, const Grid3& target) {
  const ReflectionMap T(r);
  if (!Ball({0.0, 0.0, 0.0}, 3.0 * r).fits_in(target)) {
    throw DomainError("target grid does not cover B(3r)");
  }
  if (!Ball({0.0, 0.0, 0.0}, r).fits_in(u.grid())) throw DomainError("source grid does not cover B(r)");
  require_finite(u, "extend");
  const CutoffFunction phi = extension_cutoff(r);
  const bool same = target == u.grid();
  std::vector<double> out(target.size(), 0.0);
  const double r2 = r * r;
  for (std::size_t k = 0; k < target.nz(); ++k)
    for (std::size_t j = 0; j < target.ny(); ++j)
      for (std::size_t i = 0; i < target.nx(); ++i) {
        const Vec3 x = target.node(i, j, k);
        const std::size_t idx = target.index(i, j, k);
        const double n2 = dot(x, x);
        if (n2 < r2) {
          out[idx] = same ? u[idx] : interpolate(u, x);
          continue;
        }
        const double w = phi(x);
        if (w == 0.0) continue;
        const Vec3 tx = reflect(T, x);
        if (!(dot(tx, tx) <= r2)) throw DomainError("reflected point left B(r)");
        out[idx] = interpolate(u, tx) * w;
      }
  return ScalarField3(target, std::move(out), u.time_tag());
}

namespace {

void check_extension_args(const ScalarField3& u, double r, double q) {
  if (!(q > 3.0) || std::isinf(q)) throw ParameterError("extension bound needs 3 < q < infinity");
  const Ball padded({0.0, 0.0, 0.0}, kExtensionPadding * 3.0 * r);
  if (!padded.fits_in(u.grid())) throw DomainError("padded extension domain does not fit the grid");
}

}  // namespace

InequalityReport extension_gradient_report(const ScalarField3& u, double r, double q) {
  check_extension_args(u, r, q);
  const Ball ball({0.0, 0.0, 0.0}, r);
  const ScalarField3 U = extend(u, r, u.grid());
  InequalityReport b;
  b.inequality_id = "8.2";
  b.lhs = lq_norm(gradient(U), q);
  b.rhs_terms = {
      {"grad_u_Lq_ball", lq_norm(gradient(u), ball, q)},
      {"r_pow_u_L2_ball", std::pow(r, -1.0 + 3.0 / q - 1.5) * lq_norm(u, ball, 2.0)},
  };
  b.params = {{"q", q}, {"r", r}};
  b.finalize();
  return b;
}

InequalityReport extension_bmo_report(const ScalarField3& u, double r, const BmoConfig& cfg) {
  check_extension_args(u, r, 4.0);
  const Ball ball({0.0, 0.0, 0.0}, r);
  const Ball padded({0.0, 0.0, 0.0}, kExtensionPadding * 3.0 * r);
  const ScalarField3 U = extend(u, r, u.grid());
  InequalityReport b;
  b.inequality_id = "8.2a";
  b.lhs = bmo_seminorm(U, padded, cfg);
  b.rhs_terms = {{"u_bmo_norm_ball", bmo_norm(u, ball, cfg)}};
  b.params = {{"r", r}, {"padded_radius", padded.radius}};
  b.finalize();
  return b;
}

ExtensionBounds extension_bounds_report(const ScalarField3& u, double r, double q, const BmoConfig& cfg) {
  check_extension_args(u, r, q);
  return {extension_gradient_report(u, r, q), extension_bmo_report(u, r, cfg)};
}

}  // namespace bkm
