#include "bkm/euler.hpp"

#include <cmath>

#include "bkm/errors.hpp"
#include "bkm/spectral.hpp"

namespace bkm {

namespace {

using Spec3 = std::array<std::vector<Complex>, 3>;

class Stepper {
 public:
  explicit Stepper(const SimConfig& cfg) : cfg_(cfg), s_(cfg.grid) {}

  Spec3 to_spectral(const VectorField3& v) const {
    return {s_.forward(v[0].values()), s_.forward(v[1].values()), s_.forward(v[2].values())};
  }

  VectorField3 to_physical(const Spec3& c, double t) const {
    return VectorField3(ScalarField3(cfg_.grid, s_.inverse(c[0]), t), ScalarField3(cfg_.grid, s_.inverse(c[1]), t),
                        ScalarField3(cfg_.grid, s_.inverse(c[2]), t));
  }

  // P(dealias(FFT(v x omega)))
  Spec3 rhs(const Spec3& vh) const {
    const std::size_t ns = s_.spectral_size();
    Spec3 wh;
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      wh[a].resize(ns);
      for (std::size_t i = 0; i < ns; ++i) {
        const Complex t = s_.k(b, i) * vh[c][i] - s_.k(c, i) * vh[b][i];
        wh[a][i] = Complex(-t.imag(), t.real());
      }
    }
    std::array<std::vector<double>, 3> v, w;
    for (int a = 0; a < 3; ++a) {
      v[a] = s_.inverse(vh[a]);
      w[a] = s_.inverse(wh[a]);
    }
    const std::size_t n = cfg_.grid.size();
    Spec3 out;
    std::vector<double> cross(n);
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      for (std::size_t i = 0; i < n; ++i) cross[i] = v[b][i] * w[c][i] - v[c][i] * w[b][i];
      out[a] = s_.forward(cross);
      if (cfg_.dealias) s_.dealias(out[a]);
    }
    s_.project(out);
    return out;
  }

  Spec3 rk4(const Spec3& v0, double dt) const {
    const std::size_t ns = s_.spectral_size();
    auto axpy = [ns](const Spec3& x, double a, const Spec3& y) {
      Spec3 r;
      for (int c = 0; c < 3; ++c) {
        r[c].resize(ns);
        for (std::size_t i = 0; i < ns; ++i) r[c][i] = x[c][i] + a * y[c][i];
      }
      return r;
    };
    const Spec3 k1 = rhs(v0);
    const Spec3 k2 = rhs(axpy(v0, 0.5 * dt, k1));
    const Spec3 k3 = rhs(axpy(v0, 0.5 * dt, k2));
    const Spec3 k4 = rhs(axpy(v0, dt, k3));
    Spec3 out;
    for (int c = 0; c < 3; ++c) {
      out[c].resize(ns);
      for (std::size_t i = 0; i < ns; ++i)
        out[c][i] = v0[c][i] + dt / 6.0 * (k1[c][i] + 2.0 * k2[c][i] + 2.0 * k3[c][i] + k4[c][i]);
    }
    s_.project(out);
    return out;
  }

 private:
  const SimConfig& cfg_;
  Spectral s_;
};

bool t_end_remaining(double t_end, double t) { return t_end - t > 1e-12 * t_end; }

}  // namespace

void SimConfig::validate() const {
  const bool fixed = dt > 0.0, adaptive = cfl > 0.0;
  if (fixed == adaptive) throw ConfigError("exactly one of dt > 0 or cfl > 0 must be given");
  if (adaptive && cfl > 1.0) throw ConfigError("cfl must lie in (0, 1]");
  if (!std::isfinite(dt) || !std::isfinite(cfl)) throw ConfigError("dt and cfl must be finite");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be positive");
  if (snapshot_every < 1) throw ConfigError("snapshot_every must be >= 1");
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (initial && !is_vector(*initial)) throw ConfigError("initial condition must be a vector family");
}

double energy(const VectorField3& v) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a)
    for (double x : v[a].values()) s += x * x;
  return 0.5 * s * v.grid().cell_volume();
}

double max_divergence(const VectorField3& v) { return divergence(v).max_abs(); }

VectorField3 initial_velocity(const SimConfig& cfg) {
  if (!cfg.initial) return VectorField3::zeros(cfg.grid);
  return leray_project(sample_vector(*cfg.initial, cfg.grid));
}

VectorField3 step(const VectorField3& v, double dt, const SimConfig& cfg) {
  if (!(dt > 0.0)) throw ConfigError("step size must be positive");
  if (!(v.grid() == cfg.grid)) throw ConfigError("velocity grid does not match the configuration");
  const Stepper st(cfg);
  const VectorField3 out = st.to_physical(st.rk4(st.to_spectral(v), dt), v.time_tag() + dt);
  if (!out.all_finite()) {
    throw BlowUpSuspected("non-finite velocity after step at t = " + std::to_string(v.time_tag()), v.time_tag());
  }
  return out;
}

double next_dt(const VectorField3& v, const SimConfig& cfg) {
  if (cfg.dt > 0.0) return cfg.dt;
  double rate = 0.0;
  for (int a = 0; a < 3; ++a) rate += v[a].max_abs() / cfg.grid.spacing(a);
  if (rate == 0.0) return cfg.cfl * cfg.grid.min_spacing();
  return cfg.cfl / rate;
}

SnapshotSeries run(const SimConfig& cfg, const std::function<void(const VectorField3&, std::size_t)>& on_snapshot) {
  cfg.validate();
  SnapshotSeries series;
  const Stepper st(cfg);
  VectorField3 v = initial_velocity(cfg);
  auto record = [&](long n) {
    series.energy_log.push_back({n, v.time_tag(), energy(v), max_divergence(v)});
  };
  auto store = [&]() {
    series.velocity.push_back(v);
    if (on_snapshot) on_snapshot(v, series.velocity.size() - 1);
  };
  record(0);
  store();
  Spec3 vh = st.to_spectral(v);
  double t = 0.0;
  long n = 0;
  // stop when the remaining span is a rounding residue of the step size
  while (t_end_remaining(cfg.t_end, t) && n < cfg.max_steps) {
    double dt = std::min(next_dt(v, cfg), cfg.t_end - t);
    Spec3 next = st.rk4(vh, dt);
    const double t_next = (cfg.t_end - (t + dt) <= 1e-12 * cfg.t_end) ? cfg.t_end : t + dt;
    VectorField3 vn = st.to_physical(next, t_next);
    if (!vn.all_finite()) {
      series.stopped_early = true;
      series.last_valid_time = t;
      series.stop_reason = "non-finite velocity in the step starting at t = " + std::to_string(t);
      return series;
    }
    vh = std::move(next);
    v = std::move(vn);
    t = t_next;
    ++n;
    record(n);
    if (n % cfg.snapshot_every == 0 || t >= cfg.t_end) store();
  }
  series.last_valid_time = t;
  return series;
}

double vorticity_residual(const SnapshotSeries& series, std::size_t index) {
  if (index == 0 || index + 1 >= series.size()) {
    throw DomainError("vorticity residual needs snapshots on both sides of the index");
  }
  const double t0 = series.time(index - 1), t1 = series.time(index), t2 = series.time(index + 1);
  const double hm = t1 - t0, hp = t2 - t1;
  if (!(hm > 0.0 && hp > 0.0)) throw DomainError("snapshot times must be strictly increasing");
  const VectorField3 w0 = curl(series.velocity[index - 1]);
  const VectorField3 w1 = curl(series.velocity[index]);
  const VectorField3 w2 = curl(series.velocity[index + 1]);
  const double cm = -hp / (hm * (hm + hp)), c0 = (hp - hm) / (hm * hp), cp = hm / (hp * (hm + hp));
  const VectorField3& v = series.velocity[index];
  const auto gw = jacobian(w1);  // [3 i + j] = d_j w_i
  const auto gv = jacobian(v);
  const std::size_t n = v.grid().size();
  double worst = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    double r2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      double r = cm * w0[i][p] + c0 * w1[i][p] + cp * w2[i][p];
      for (int j = 0; j < 3; ++j) r += v[j][p] * gw[3 * i + j][p] - w1[j][p] * gv[3 * i + j][p];
      r2 += r * r;
    }
    worst = std::max(worst, std::sqrt(r2));
  }
  return worst;
}

}  // namespace bkm
