#include "bkm/ball_norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bkm/analytic.hpp"
#include "bkm/errors.hpp"

namespace bkm {

namespace {

using Segment = std::pair<std::size_t, std::size_t>;  // [begin, end) in flat index space

// Row-interval table of the nodes inside an open ball that fits the box.
struct ClipTable {
  std::ptrdiff_t j0 = 0, k0 = 0, nj = 0, nk = 0;
  std::vector<std::ptrdiff_t> lo, hi;  // empty row when lo > hi

  bool row(std::ptrdiff_t j, std::ptrdiff_t k, std::ptrdiff_t& l, std::ptrdiff_t& h) const {
    const auto jj = j - j0, kk = k - k0;
    if (jj < 0 || kk < 0 || jj >= nj || kk >= nk) return false;
    l = lo[jj + nj * kk];
    h = hi[jj + nj * kk];
    return l <= h;
  }
};

std::ptrdiff_t clamp_index(std::ptrdiff_t i, std::size_t n) {
  return std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1);
}

void require_fits(const Grid3& g, const Ball& b) {
  if (!b.fits_in(g)) throw DomainError("ball does not fit inside the periodic box fundamental domain");
}

ClipTable make_clip(const Grid3& g, const Ball& b) {
  require_fits(g, b);
  std::array<std::ptrdiff_t, 3> lo{}, hi{};
  for (int a = 0; a < 3; ++a) {
    lo[a] = clamp_index(g.nearest_index(a, b.center[a] - b.radius) - 1, g.n(a));
    hi[a] = clamp_index(g.nearest_index(a, b.center[a] + b.radius) + 1, g.n(a));
  }
  ClipTable t;
  t.j0 = lo[1];
  t.k0 = lo[2];
  t.nj = hi[1] - lo[1] + 1;
  t.nk = hi[2] - lo[2] + 1;
  t.lo.assign(static_cast<std::size_t>(t.nj * t.nk), 1);
  t.hi.assign(static_cast<std::size_t>(t.nj * t.nk), 0);
  const double r2 = b.radius * b.radius;
  for (std::ptrdiff_t k = lo[2]; k <= hi[2]; ++k)
    for (std::ptrdiff_t j = lo[1]; j <= hi[1]; ++j) {
      const auto slot = static_cast<std::size_t>((j - t.j0) + t.nj * (k - t.k0));
      const double dy = g.coordinate(1, j) - b.center[1];
      const double dz = g.coordinate(2, k) - b.center[2];
      for (std::ptrdiff_t i = lo[0]; i <= hi[0]; ++i) {
        const double dx = g.coordinate(0, i) - b.center[0];
        if (dx * dx + dy * dy + dz * dz < r2) {
          if (t.lo[slot] > t.hi[slot]) t.lo[slot] = i;
          t.hi[slot] = i;
        }
      }
    }
  return t;
}

std::vector<std::array<std::ptrdiff_t, 3>> candidate_centers(const Grid3& g, const Ball& d, int stride) {
  std::array<std::ptrdiff_t, 3> anchor{};
  for (int a = 0; a < 3; ++a) anchor[a] = g.nearest_index(a, d.center[a]);
  std::vector<std::array<std::ptrdiff_t, 3>> out;
  auto first = [&](int a) {
    std::ptrdiff_t i = anchor[a];
    while (i - stride >= 0) i -= stride;
    while (i < 0) i += stride;
    return i;
  };
  const std::array<std::ptrdiff_t, 3> start{first(0), first(1), first(2)};
  for (auto k = start[2]; k < static_cast<std::ptrdiff_t>(g.nz()); k += stride)
    for (auto j = start[1]; j < static_cast<std::ptrdiff_t>(g.ny()); j += stride)
      for (auto i = start[0]; i < static_cast<std::ptrdiff_t>(g.nx()); i += stride) {
        if (d.contains(g.node(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k))))
          out.push_back({i, j, k});
      }
  return out;
}

// Mean oscillation over a list of segments, reference value at node ref.
double oscillation(const FieldView& u, const std::vector<Segment>& segs, std::size_t ref) {
  const std::size_t C = u.components();
  std::size_t count = 0;
  for (const auto& [b, e] : segs) count += e - b;
  if (count == 0) throw DomainError("mean oscillation over an empty node set");
  const double inv = 1.0 / static_cast<double>(count);
  if (C == 1) {
    const double* p = u.component(0).data();
    const double r = p[ref];
    double s = 0.0;
    for (const auto& [b, e] : segs)
      for (std::size_t i = b; i < e; ++i) s += p[i] - r;
    const double mean = s * inv;
    double o = 0.0;
    for (const auto& [b, e] : segs)
      for (std::size_t i = b; i < e; ++i) o += std::abs((p[i] - r) - mean);
    return o * inv;
  }
  std::vector<double> mean(C, 0.0), refv(C);
  for (std::size_t c = 0; c < C; ++c) {
    const double* p = u.component(c).data();
    refv[c] = p[ref];
    double s = 0.0;
    for (const auto& [b, e] : segs)
      for (std::size_t i = b; i < e; ++i) s += p[i] - refv[c];
    mean[c] = s * inv;
  }
  double o = 0.0;
  for (const auto& [b, e] : segs)
    for (std::size_t i = b; i < e; ++i) {
      double q = 0.0;
      for (std::size_t c = 0; c < C; ++c) {
        const double d = (u.component(c)[i] - refv[c]) - mean[c];
        q += d * d;
      }
      o += std::sqrt(q);
    }
  return o * inv;
}

struct CenterBest {
  double value = -1.0;
  double radius = 0.0;
};

BmoResult reduce(const Grid3& g, const std::vector<std::array<std::ptrdiff_t, 3>>& centers,
                 const std::vector<CenterBest>& best, std::size_t radii) {
  BmoResult r;
  r.evaluations = centers.size() * radii;
  std::size_t arg = 0;
  double value = -1.0;
  for (std::size_t c = 0; c < best.size(); ++c) {
    if (best[c].value > value) {  // strict: first in scan order wins ties
      value = best[c].value;
      arg = c;
    }
  }
  r.value = std::max(value, 0.0);
  const auto& z = centers[arg];
  r.center = g.node(static_cast<std::size_t>(z[0]), static_cast<std::size_t>(z[1]), static_cast<std::size_t>(z[2]));
  r.radius = best[arg].radius;
  return r;
}

}  // namespace

void BmoConfig::validate() const {
  if (!(radius_ladder_factor > 0.0 && radius_ladder_factor < 1.0))
    throw ConfigError("radius_ladder_factor must lie in (0, 1)");
  if (min_radius_cells < 2) throw ConfigError("min_radius_cells must be >= 2");
  if (center_stride < 1) throw ConfigError("center_stride must be >= 1");
  if (!(max_radius_factor > 0.0) || !std::isfinite(max_radius_factor))
    throw ConfigError("max_radius_factor must be positive");
}

BallStencil::BallStencil(const Grid3& g, double radius) : radius_(radius) {
  if (!(radius > 0.0)) throw DomainError("stencil radius must be positive");
  const double hx = g.spacing(0), hy = g.spacing(1), hz = g.spacing(2);
  const double r2 = radius * radius;
  const int K = static_cast<int>(std::ceil(radius / hz));
  const int J = static_cast<int>(std::ceil(radius / hy));
  for (int dk = -K; dk <= K; ++dk) {
    for (int dj = -J; dj <= J; ++dj) {
      const double rem = r2 - (dj * hy) * (dj * hy) - (dk * hz) * (dk * hz);
      if (rem <= 0.0) continue;
      int w = static_cast<int>(std::floor(std::sqrt(rem) / hx));
      while (w > 0 && (w * hx) * (w * hx) >= rem) --w;
      while (((w + 1) * hx) * ((w + 1) * hx) < rem) ++w;
      rows_.push_back({dj, dk, w});
      count_ += static_cast<std::size_t>(2 * w + 1);
    }
  }
}

std::vector<std::array<int, 3>> BallStencil::offsets() const {
  std::vector<std::array<int, 3>> out;
  out.reserve(count_);
  for (const auto& r : rows_)
    for (int dx = -r.half_width; dx <= r.half_width; ++dx) out.push_back({dx, r.dj, r.dk});
  return out;
}

std::vector<double> radius_ladder(double cap, double h, const BmoConfig& cfg) {
  cfg.validate();
  std::vector<double> out;
  const double floor_radius = cfg.min_radius_cells * h;
  for (double rho = cap; rho > floor_radius; rho *= cfg.radius_ladder_factor) out.push_back(rho);
  return out;
}

CutoffFunction::CutoffFunction(Vec3 center, double r_inner, double r_outer)
    : center_(center), r_inner_(r_inner), r_outer_(r_outer) {
  if (!(r_inner > 0.0) || !(r_outer > r_inner) || !std::isfinite(r_outer)) {
    throw ConfigError("cutoff needs 0 < r_inner < r_outer");
  }
  // dense sampling of the radial profile
  constexpr int samples = 20000;
  const double width = r_outer - r_inner;
  const double dh = width * 1e-5;
  for (int s = 1; s < samples; ++s) {
    const double rho = r_inner + width * s / samples;
    const double d1 = profile_derivative(rho);
    const double d2 = (profile_derivative(rho + dh) - profile_derivative(rho - dh)) / (2.0 * dh);
    grad_max_ = std::max(grad_max_, std::abs(d1));
    hess_max_ = std::max(hess_max_, std::sqrt(d2 * d2 + 2.0 * (d1 / rho) * (d1 / rho)));
  }
}

double CutoffFunction::profile(double rho) const { return smooth_step(rho, r_inner_, r_outer_); }
double CutoffFunction::profile_derivative(double rho) const {
  return smooth_step_derivative(rho, r_inner_, r_outer_);
}
double CutoffFunction::operator()(const Vec3& x) const { return profile(norm(x - center_)); }

ScalarField3 CutoffFunction::sample(const Grid3& grid) const {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < grid.nz(); ++k)
    for (std::size_t j = 0; j < grid.ny(); ++j)
      for (std::size_t i = 0; i < grid.nx(); ++i) v[grid.index(i, j, k)] = (*this)(grid.node(i, j, k));
  return ScalarField3(grid, std::move(v));
}

namespace {

template <class Visit>
void for_ball_nodes(const Grid3& g, const ClipTable& t, Visit&& visit) {
  for (std::ptrdiff_t kk = 0; kk < t.nk; ++kk)
    for (std::ptrdiff_t jj = 0; jj < t.nj; ++jj) {
      const auto l = t.lo[jj + t.nj * kk], h = t.hi[jj + t.nj * kk];
      if (l > h) continue;
      const std::size_t base = g.index(0, static_cast<std::size_t>(jj + t.j0), static_cast<std::size_t>(kk + t.k0));
      for (auto i = l; i <= h; ++i) visit(base + static_cast<std::size_t>(i));
    }
}

double lq_from(const std::vector<double>& mags, double q, double dv) {
  double m = 0.0;
  for (double a : mags) m = std::max(m, a);
  if (std::isinf(q) || m == 0.0) return m;
  double s = 0.0;
  if (q == 2.0) {
    for (double a : mags) s += (a / m) * (a / m);
  } else if (q == 1.0) {
    for (double a : mags) s += a / m;
  } else {
    for (double a : mags) s += std::pow(a / m, q);
  }
  return m * std::pow(s * dv, 1.0 / q);
}

void check_q(double q) {
  if (std::isnan(q) || q < 1.0) throw ParameterError("L^q exponent must be >= 1 or infinity");
}

}  // namespace

double lq_norm(const FieldView& u, const Ball& region, double q) {
  check_q(q);
  const Grid3& g = u.grid();
  const ClipTable t = make_clip(g, region);
  std::vector<double> mags;
  for_ball_nodes(g, t, [&](std::size_t idx) { mags.push_back(u.pointwise_norm(idx)); });
  if (mags.empty()) throw DomainError("ball contains no grid node");
  return lq_from(mags, q, g.cell_volume());
}

double lq_norm(const FieldView& u, double q) {
  check_q(q);
  const Grid3& g = u.grid();
  std::vector<double> mags(g.size());
  for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = u.pointwise_norm(i);
  return lq_from(mags, q, g.cell_volume());
}

double mean_oscillation(const FieldView& u, const Vec3& z, double rho, const Ball& clip) {
  if (!(rho > 0.0)) throw DomainError("mean oscillation radius must be positive");
  const Grid3& g = u.grid();
  const ClipTable t = make_clip(g, clip);
  std::vector<Segment> segs;
  std::size_t ref = std::numeric_limits<std::size_t>::max();
  const double r2 = rho * rho;
  for_ball_nodes(g, t, [&](std::size_t idx) {
    const std::size_t i = idx % g.nx(), j = (idx / g.nx()) % g.ny(), k = idx / (g.nx() * g.ny());
    const Vec3 d = g.node(i, j, k) - z;
    if (dot(d, d) >= r2) return;
    if (ref == std::numeric_limits<std::size_t>::max()) ref = idx;
    if (!segs.empty() && segs.back().second == idx) {
      segs.back().second = idx + 1;
    } else {
      segs.emplace_back(idx, idx + 1);
    }
  });
  if (segs.empty()) throw DomainError("ball intersection contains no grid node");
  return oscillation(u, segs, ref);
}

BmoResult bmo_scan(const FieldView& u, const Ball& domain, const BmoConfig& cfg) {
  cfg.validate();
  require_finite(u, "bmo_scan");
  const Grid3& g = u.grid();
  const ClipTable clip = make_clip(g, domain);
  const auto ladder = radius_ladder(cfg.max_radius_factor * domain.radius, g.min_spacing(), cfg);
  if (ladder.empty()) throw DomainError("BMO radius ladder is empty for this domain and grid");
  const auto centers = candidate_centers(g, domain, cfg.center_stride);
  if (centers.empty()) throw DomainError("BMO domain contains no candidate center");
  std::vector<BallStencil> stencils;
  for (double rho : ladder) stencils.emplace_back(g, rho);

  std::vector<CenterBest> best(centers.size());
  const auto nc = static_cast<std::ptrdiff_t>(centers.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t c = 0; c < nc; ++c) {
    const auto [zi, zj, zk] = centers[static_cast<std::size_t>(c)];
    const Vec3 z = g.node(static_cast<std::size_t>(zi), static_cast<std::size_t>(zj), static_cast<std::size_t>(zk));
    const double offset = norm(z - domain.center);
    const std::size_t ref = g.index(static_cast<std::size_t>(zi), static_cast<std::size_t>(zj), static_cast<std::size_t>(zk));
    std::vector<Segment> segs;
    CenterBest b;
    for (const auto& st : stencils) {
      segs.clear();
      const bool inside = offset + st.radius() < domain.radius * (1.0 - 1e-12);
      for (const auto& row : st.rows()) {
        const auto j = zj + row.dj, k = zk + row.dk;
        std::ptrdiff_t lo = zi - row.half_width, hi = zi + row.half_width;
        if (!inside) {
          std::ptrdiff_t cl, ch;
          if (!clip.row(j, k, cl, ch)) continue;
          lo = std::max(lo, cl);
          hi = std::min(hi, ch);
          if (lo > hi) continue;
        }
        const std::size_t base = g.index(0, static_cast<std::size_t>(j), static_cast<std::size_t>(k));
        segs.emplace_back(base + static_cast<std::size_t>(lo), base + static_cast<std::size_t>(hi) + 1);
      }
      const double o = oscillation(u, segs, ref);
      if (o > b.value) {
        b.value = o;
        b.radius = st.radius();
      }
    }
    best[static_cast<std::size_t>(c)] = b;
  }
  return reduce(g, centers, best, ladder.size());
}

double bmo_seminorm(const FieldView& u, const Ball& domain, const BmoConfig& cfg) {
  return bmo_scan(u, domain, cfg).value;
}

double bmo_norm(const FieldView& u, const Ball& domain, const BmoConfig& cfg) {
  const double semi = bmo_seminorm(u, domain, cfg);
  const double r = domain.radius;
  return semi + lq_norm(u, domain, 1.0) / (r * r * r);
}

BmoResult periodic_bmo_scan(const FieldView& u, const BmoConfig& cfg) {
  cfg.validate();
  require_finite(u, "periodic_bmo_scan");
  const Grid3& g = u.grid();
  // balls of radius < L/2 never overlap their own periodic images
  double cap = 0.5 * g.box_length() * (1.0 - 1e-12);
  const auto ladder = radius_ladder(cap, g.min_spacing(), cfg);
  if (ladder.empty()) throw DomainError("BMO radius ladder is empty for this grid");
  std::vector<std::array<std::ptrdiff_t, 3>> centers;
  const auto s = cfg.center_stride;
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(g.nz()); k += s)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(g.ny()); j += s)
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(g.nx()); i += s) centers.push_back({i, j, k});
  std::vector<BallStencil> stencils;
  for (double rho : ladder) stencils.emplace_back(g, rho);

  const auto nx = static_cast<std::ptrdiff_t>(g.nx()), ny = static_cast<std::ptrdiff_t>(g.ny()),
             nz = static_cast<std::ptrdiff_t>(g.nz());
  auto wrap = [](std::ptrdiff_t i, std::ptrdiff_t n) { return ((i % n) + n) % n; };
  std::vector<CenterBest> best(centers.size());
  const auto nc = static_cast<std::ptrdiff_t>(centers.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t c = 0; c < nc; ++c) {
    const auto [zi, zj, zk] = centers[static_cast<std::size_t>(c)];
    const std::size_t ref = g.index(static_cast<std::size_t>(zi), static_cast<std::size_t>(zj), static_cast<std::size_t>(zk));
    std::vector<Segment> segs;
    CenterBest b;
    for (const auto& st : stencils) {
      segs.clear();
      for (const auto& row : st.rows()) {
        const auto j = wrap(zj + row.dj, ny), k = wrap(zk + row.dk, nz);
        const std::size_t base = g.index(0, static_cast<std::size_t>(j), static_cast<std::size_t>(k));
        const auto lo = wrap(zi - row.half_width, nx);
        const auto len = 2 * row.half_width + 1;
        if (lo + len <= nx) {
          segs.emplace_back(base + static_cast<std::size_t>(lo), base + static_cast<std::size_t>(lo + len));
        } else {
          segs.emplace_back(base + static_cast<std::size_t>(lo), base + static_cast<std::size_t>(nx));
          segs.emplace_back(base, base + static_cast<std::size_t>(lo + len - nx));
        }
      }
      const double o = oscillation(u, segs, ref);
      if (o > b.value) {
        b.value = o;
        b.radius = st.radius();
      }
    }
    best[static_cast<std::size_t>(c)] = b;
  }
  return reduce(g, centers, best, ladder.size());
}

std::vector<ScalarField3> weighted(const FieldView& u, const CutoffFunction& psi, double m) {
  if (!(m >= 0.0)) throw ParameterError("cutoff power must be >= 0");
  const Grid3& g = u.grid();
  const ScalarField3 p = psi.sample(g);
  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = m == 0.0 ? 1.0 : std::pow(p[i], m);
  std::vector<ScalarField3> out;
  for (std::size_t c = 0; c < u.components(); ++c) {
    std::vector<double> v(g.size());
    const auto src = u.component(c);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = src[i] * w[i];
    out.emplace_back(g, std::move(v));
  }
  return out;
}

double weighted_lq_norm(const FieldView& u, const CutoffFunction& psi, double m, double q) {
  return lq_norm(FieldView(weighted(u, psi, m)), q);
}

double weighted_bmo(const FieldView& u, const CutoffFunction& psi, double m, const BmoConfig& cfg,
                    const Ball& padded_domain) {
  if (norm(psi.center() - padded_domain.center) + psi.r_outer() > padded_domain.radius) {
    throw DomainError("cutoff support is not contained in the padded BMO domain");
  }
  const auto w = weighted(u, psi, m);
  return bmo_seminorm(FieldView(w), padded_domain, cfg);
}

}  // namespace bkm
