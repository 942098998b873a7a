#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "bkm/grid.hpp"

namespace bkm {

/// Discretization of the BMO supremum: radii rho_k = cap * factor^k while
/// rho_k > min_radius_cells * h, centers = domain nodes on a stride anchored
/// at the node nearest the domain center. cap = max_radius_factor * r.
struct BmoConfig {
  double radius_ladder_factor = 0.7;
  int min_radius_cells = 3;
  int center_stride = 2;
  double max_radius_factor = 2.0;

  void validate() const;
};

/// One x-row of a ball stencil: offsets (dx, dj, dk) with |dx| <= half_width.
struct StencilRow {
  int dj;
  int dk;
  int half_width;
};

/// Grid nodes strictly inside a ball of the given radius around a node,
/// stored as x-rows. Membership: |(dx h_x, dj h_y, dk h_z)| < radius.
class BallStencil {
 public:
  BallStencil(const Grid3& grid, double radius);

  double radius() const { return radius_; }
  std::span<const StencilRow> rows() const { return rows_; }
  std::size_t node_count() const { return count_; }
  std::vector<std::array<int, 3>> offsets() const;

 private:
  double radius_;
  std::vector<StencilRow> rows_;
  std::size_t count_ = 0;
};

/// Radius ladder for a supremum capped at cap (strictly above the floor).
std::vector<double> radius_ladder(double cap, double h, const BmoConfig& cfg);

/// Smooth radial cutoff: 1 on |x - c| <= r_inner, 0 on |x - c| >= r_outer.
class CutoffFunction {
 public:
  CutoffFunction(Vec3 center, double r_inner, double r_outer);

  double operator()(const Vec3& x) const;
  double profile(double rho) const;
  double profile_derivative(double rho) const;

  const Vec3& center() const { return center_; }
  double r_inner() const { return r_inner_; }
  double r_outer() const { return r_outer_; }

  /// Dense 1D maxima of |psi'| and of the Frobenius norm of the Hessian.
  double measured_grad_max() const { return grad_max_; }
  double measured_hess_max() const { return hess_max_; }
  /// Certified bounds: measured maxima with a 2x safety factor.
  double grad_sup() const { return 2.0 * grad_max_; }
  double hess_sup() const { return 2.0 * hess_max_; }
  /// c in grad_sup <= c / (r_outer - r_inner), hess_sup <= c / (r_outer - r_inner)^2.
  double grad_constant() const { return grad_sup() * (r_outer_ - r_inner_); }
  double hess_constant() const { return hess_sup() * (r_outer_ - r_inner_) * (r_outer_ - r_inner_); }

  ScalarField3 sample(const Grid3& grid) const;

 private:
  Vec3 center_;
  double r_inner_;
  double r_outer_;
  double grad_max_ = 0.0;
  double hess_max_ = 0.0;
};

/// L^q norm over the nodes of an open ball; q = infinity gives the max.
double lq_norm(const FieldView& u, const Ball& region, double q);
/// L^q norm over the whole grid.
double lq_norm(const FieldView& u, double q);

/// Mean over B(z, rho) intersected with clip of |u - mean|, computed from
/// differences to a reference node value so constants give exactly zero.
double mean_oscillation(const FieldView& u, const Vec3& z, double rho, const Ball& clip);

struct BmoResult {
  double value = 0.0;
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 0.0;
  std::size_t evaluations = 0;
};

/// Discretized sup of mean_oscillation over centers in the domain and ladder radii.
BmoResult bmo_scan(const FieldView& u, const Ball& domain, const BmoConfig& cfg);
double bmo_seminorm(const FieldView& u, const Ball& domain, const BmoConfig& cfg);
/// Seminorm plus r^-3 ||u||_{L^1(B(r))}.
double bmo_norm(const FieldView& u, const Ball& domain, const BmoConfig& cfg);

/// Whole-box seminorm: periodic balls (radius cap L/2), centers on the full
/// node lattice at the configured stride.
BmoResult periodic_bmo_scan(const FieldView& u, const BmoConfig& cfg);

/// Fields multiplied pointwise by psi^m (one per component of u).
std::vector<ScalarField3> weighted(const FieldView& u, const CutoffFunction& psi, double m);

double weighted_lq_norm(const FieldView& u, const CutoffFunction& psi, double m, double q);
/// BMO seminorm of u psi^m evaluated over a padded ball containing supp psi;
/// stands in for the whole-space seminorm of the compactly supported product.
double weighted_bmo(const FieldView& u, const CutoffFunction& psi, double m, const BmoConfig& cfg,
                    const Ball& padded_domain);

}  // namespace bkm
