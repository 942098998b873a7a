#include "bkm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "bkm/errors.hpp"
#include "bkm/spectral.hpp"

namespace bkm {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void require_series(const SnapshotSeries& s) {
  if (s.size() == 0) throw DomainError("snapshot series is empty");
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s.velocity[i].grid() == s.velocity[0].grid())) throw DomainError("snapshots do not share one grid");
    if (!(s.time(i) > s.time(i - 1))) throw DomainError("snapshot times must strictly increase");
  }
}

std::vector<VectorField3> vorticities(const SnapshotSeries& s) {
  std::vector<VectorField3> out;
  out.reserve(s.size());
  for (const auto& v : s.velocity) out.push_back(curl(v));
  return out;
}

double local_norm(const VectorField3& w, const Ball& ball, const NormSpec& spec, const BmoConfig& cfg) {
  switch (spec.kind) {
    case NormSpec::Kind::bmo: return bmo_seminorm(w, ball, cfg);
    case NormSpec::Kind::sup: return lq_norm(w, ball, inf);
    case NormSpec::Kind::lq: return lq_norm(w, ball, spec.q);
  }
  return 0.0;
}

double whole_norm(const VectorField3& w, const NormSpec& spec, const BmoConfig& cfg) {
  switch (spec.kind) {
    case NormSpec::Kind::bmo: return periodic_bmo_scan(w, cfg).value;
    case NormSpec::Kind::sup: return lq_norm(w, inf);
    case NormSpec::Kind::lq: return lq_norm(w, spec.q);
  }
  return 0.0;
}

template <class F>
NormSeries collect(const SnapshotSeries& s, std::string id, F&& value_at) {
  NormSeries out;
  out.norm_id = std::move(id);
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.times.push_back(s.time(i));
    out.values.push_back(value_at(i));
  }
  out.validate();
  return out;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) acc += 0.5 * (t[i + 1] - t[i]) * (f[i] + f[i + 1]);
  return acc;
}

// builds one row from precomputed vorticities; local when ball is set
DiagnosticsRow make_row(const SnapshotSeries& s, const std::vector<VectorField3>& w, const std::optional<Ball>& ball,
                        const std::vector<double>& q_list, const BmoConfig& cfg) {
  DiagnosticsRow row;
  row.ball = ball;
  const std::string where = ball ? ball_label(*ball) : "global";
  auto norm_of = [&](const NormSpec& spec) {
    return collect(s, "omega-" + spec.name() + "-" + where, [&](std::size_t i) {
      return ball ? local_norm(w[i], *ball, spec, cfg) : whole_norm(w[i], spec, cfg);
    });
  };
  if (ball && !ball->fits_in(s.velocity[0].grid())) throw DomainError("ball does not fit inside the periodic box");

  NormSeries bmo = norm_of({NormSpec::Kind::bmo, 0.0});
  NormSeries sup = norm_of({NormSpec::Kind::sup, 0.0});
  for (std::size_t i = 0; i < bmo.values.size(); ++i) {
    if (bmo.values[i] > 2.0 * sup.values[i])
      row.notes.push_back("bmo exceeds twice the sup norm at t = " + fmt(bmo.times[i]));
  }
  if (s.size() >= 2) {
    row.bmo_integral = bkm_integral(bmo);
    row.sup_integral = bkm_integral(sup);
    std::vector<double> v43;
    for (const auto& v : s.velocity) {
      const double m = ball ? lq_norm(v, *ball, inf) : v.max_norm();
      v43.push_back(std::pow(m, 4.0 / 3.0));
    }
    row.velocity_sup_43_integral = trapezoid(bmo.times, v43);
  } else {
    row.notes.push_back("single snapshot: time integrals undefined");
  }
  row.series.push_back(std::move(bmo));
  row.series.push_back(std::move(sup));
  for (double q : q_list) {
    NormSeries lq = norm_of({NormSpec::Kind::lq, q});
    row.omega_lq_max[q] = *std::max_element(lq.values.begin(), lq.values.end());
    row.series.push_back(std::move(lq));
  }
  double e = 0.0;
  for (const auto& v : s.velocity) {
    const double local = ball ? 0.5 * std::pow(lq_norm(v, *ball, 2.0), 2) : energy(v);
    e = std::max(e, local);
  }
  row.energy_sup = e;
  return row;
}

nlohmann::ordered_json opt(const std::optional<double>& x) {
  return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json row_json(const DiagnosticsRow& r) {
  nlohmann::ordered_json j;
  if (r.ball) {
    j["ball"] = {{"center", {r.ball->center[0], r.ball->center[1], r.ball->center[2]}}, {"radius", r.ball->radius}};
  } else {
    j["ball"] = nullptr;
  }
  j["integrals"] = {{"bmo", opt(r.bmo_integral)},
                    {"sup", opt(r.sup_integral)},
                    {"velocity_sup_4_3", opt(r.velocity_sup_43_integral)}};
  nlohmann::ordered_json lq = nlohmann::ordered_json::object();
  for (const auto& [q, v] : r.omega_lq_max) lq[fmt(q)] = v;
  j["omega_lq_max"] = lq;
  j["energy_sup"] = opt(r.energy_sup);
  j["notes"] = r.notes;
  return j;
}

}  // namespace

NormSpec NormSpec::parse(const std::string& s) {
  if (s == "bmo") return {Kind::bmo, 0.0};
  if (s == "sup") return {Kind::sup, 0.0};
  if (s.rfind("lq:", 0) == 0) {
    std::size_t used = 0;
    double q = 0.0;
    try {
      q = std::stod(s.substr(3), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() - 3) throw ConfigError("bad norm id '" + s + "'");
    if (!(q >= 1.0) || !std::isfinite(q)) throw ParameterError("lq norm needs 1 <= q < inf, got '" + s + "'");
    return {Kind::lq, q};
  }
  throw ConfigError("unknown norm id '" + s + "' (expected bmo, sup or lq:<q>)");
}

std::string NormSpec::name() const {
  switch (kind) {
    case Kind::bmo: return "bmo";
    case Kind::sup: return "sup";
    case Kind::lq: return "lq" + fmt(q);
  }
  return "";
}

void NormSeries::validate() const {
  if (times.size() != values.size()) throw NumericError("norm series: times and values differ in length");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) throw NumericError("norm series " + norm_id + ": bad value");
    if (i > 0 && !(times[i] > times[i - 1])) throw NumericError("norm series " + norm_id + ": times not increasing");
  }
}

std::string ball_label(const Ball& b) {
  return "B(" + fmt(b.center[0]) + "," + fmt(b.center[1]) + "," + fmt(b.center[2]) + ";" + fmt(b.radius) + ")";
}

NormSeries norm_series(const SnapshotSeries& series, const Ball& ball, const NormSpec& spec, const BmoConfig& cfg) {
  require_series(series);
  if (!ball.fits_in(series.velocity[0].grid())) throw DomainError("ball does not fit inside the periodic box");
  return collect(series, "omega-" + spec.name() + "-" + ball_label(ball),
                 [&](std::size_t i) { return local_norm(curl(series.velocity[i]), ball, spec, cfg); });
}

NormSeries global_norm_series(const SnapshotSeries& series, const NormSpec& spec, const BmoConfig& cfg) {
  require_series(series);
  return collect(series, "omega-" + spec.name() + "-global",
                 [&](std::size_t i) { return whole_norm(curl(series.velocity[i]), spec, cfg); });
}

double bkm_integral(const NormSeries& s) {
  s.validate();
  if (s.times.size() < 2) throw DomainError("time integral needs at least two samples");
  return trapezoid(s.times, s.values);
}

DiagnosticsReport build_report(const SnapshotSeries& series, const std::vector<Ball>& balls,
                               const std::vector<double>& q_list, const BmoConfig& cfg, Provenance provenance) {
  if (balls.empty()) throw ConfigError("diagnostics need at least one ball");
  cfg.validate();
  for (double q : q_list)
    if (!(q >= 1.0) || !std::isfinite(q)) throw ParameterError("q list entries must be finite and >= 1");
  require_series(series);
  const auto w = vorticities(series);

  DiagnosticsReport r;
  r.provenance = std::move(provenance);
  r.global = make_row(series, w, std::nullopt, q_list, cfg);
  for (const auto& b : balls) {
    try {
      r.balls.push_back(make_row(series, w, b, q_list, cfg));
    } catch (const Error& e) {
      DiagnosticsRow failed;
      failed.ball = b;
      failed.notes.push_back(std::string("failed: ") + e.what());
      r.balls.push_back(std::move(failed));
    }
  }
  return r;
}

nlohmann::ordered_json to_json(const DiagnosticsReport& r) {
  nlohmann::ordered_json j;
  j["provenance"] = {{"tool", r.provenance.tool},
                     {"version", r.provenance.version},
                     {"config_hash", r.provenance.config_hash},
                     {"inputs", r.provenance.inputs}};
  j["global"] = row_json(r.global);
  j["balls"] = nlohmann::ordered_json::array();
  for (const auto& b : r.balls) j["balls"].push_back(row_json(b));
  return j;
}

double RescaledFrame::tstar_margin() const { return 0.5 * rho * rho / std::sqrt(-t_star) - 4.0 * C0; }

double RescaledFrame::chain_bound() const { return 0.25 * tstar_margin(); }

void RescaledFrame::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw PreconditionError("frame: rho must be positive");
  if (!(-rho < t_star && t_star < t0 && t0 < 0.0))
    throw PreconditionError("frame: need -rho < t_star < t0 < 0");
  if (!(C0 >= 0.0) || !std::isfinite(C0)) throw PreconditionError("frame: C0 must be finite and >= 0");
  const double expect = rho / (1.0 + std::sqrt(-t0));
  if (std::abs(rho0 - expect) > 1e-14 * rho) throw PreconditionError("frame: rho0 must equal rho / (1 + sqrt(-t0))");
  if (!(rho0 > 0.5 * rho)) throw PreconditionError("frame: rho0 <= rho/2 (t0 too negative)");
  if (!(tstar_margin() > 0.0))
    throw PreconditionError("frame: 1/2 rho^2 (-t_star)^(-1/2) - 4 C0 = " + fmt(tstar_margin()) + " is not positive");
}

namespace {

// V on closed B(rho0) for the snapshot at index i and rescaled time tau < 0
VectorField3 rescaled_velocity(const VectorField3& v, double rho0, double tau) {
  const Grid3& g = v.grid();
  const double a = 1.0 + std::sqrt(-tau);
  double hmax = std::max({g.spacing(0), g.spacing(1), g.spacing(2)});
  const double reach = a * rho0;
  if (!(reach + hmax < 0.5 * g.box_length()))
    throw DomainError("rescaled sample points leave the box (need (1+sqrt(-t)) rho0 + h < L/2)");
  std::array<std::vector<double>, 3> out;
  for (auto& c : out) c.assign(g.size(), 0.0);
  const double r2 = rho0 * rho0;
  for (std::size_t k = 0; k < g.nz(); ++k)
    for (std::size_t j = 0; j < g.ny(); ++j)
      for (std::size_t i = 0; i < g.nx(); ++i) {
        const Vec3 y = g.node(i, j, k);
        if (dot(y, y) > r2) continue;
        const Vec3 x = a * y;
        const auto idx = g.index(i, j, k);
        for (int c = 0; c < 3; ++c) out[c][idx] = interpolate(v[c], x);
      }
  return VectorField3(ScalarField3(g, std::move(out[0]), tau), ScalarField3(g, std::move(out[1]), tau),
                      ScalarField3(g, std::move(out[2]), tau));
}

}  // namespace

RescaledFields rescale_frame(const SnapshotSeries& series, const RescaledFrame& frame, double t,
                             double time_tolerance) {
  require_series(series);
  frame.validate();
  const double tau = t - frame.time_origin;
  if (!(tau >= frame.t0 && tau < 0.0)) throw DomainError("rescale_frame: t must lie in [t0, 0) of the frame");
  std::size_t best = 0;
  for (std::size_t i = 1; i < series.size(); ++i)
    if (std::abs(series.time(i) - t) < std::abs(series.time(best) - t)) best = i;
  if (std::abs(series.time(best) - t) > time_tolerance)
    throw DomainError("rescale_frame: no snapshot within " + fmt(time_tolerance) + " of t = " + fmt(t));

  VectorField3 V = rescaled_velocity(series.velocity[best], frame.rho0, tau);
  const Grid3& g = V.grid();
  const double s = std::sqrt(-tau);
  const double drift = 0.5 / s;
  std::array<std::vector<double>, 3> w;
  for (auto& c : w) c.assign(g.size(), 0.0);
  const double r2 = frame.rho0 * frame.rho0;
  for (std::size_t k = 0; k < g.nz(); ++k)
    for (std::size_t j = 0; j < g.ny(); ++j)
      for (std::size_t i = 0; i < g.nx(); ++i) {
        const Vec3 y = g.node(i, j, k);
        if (dot(y, y) > r2) continue;
        const auto idx = g.index(i, j, k);
        for (int c = 0; c < 3; ++c) w[c][idx] = (drift * y[c] + V[c][idx]) / (1.0 + s);
      }
  VectorField3 W(ScalarField3(g, std::move(w[0]), tau), ScalarField3(g, std::move(w[1]), tau),
                 ScalarField3(g, std::move(w[2]), tau));
  return {std::move(V), std::move(W)};
}

RescaledFrame make_frame(const SnapshotSeries& series, double rho, double t0, double time_origin) {
  require_series(series);
  if (!(rho > 0.0) || !(t0 < 0.0) || !(t0 > -rho)) throw PreconditionError("make_frame: need rho > 0, -rho < t0 < 0");
  RescaledFrame f;
  f.rho = rho;
  f.t0 = t0;
  f.time_origin = time_origin;
  f.rho0 = rho / (1.0 + std::sqrt(-t0));
  bool any = false;
  double c0 = 0.0;
  for (std::size_t n = 0; n < series.size(); ++n) {
    const double tau = series.time(n) - time_origin;
    if (tau < t0 || tau >= 0.0) continue;
    any = true;
    const VectorField3 V = rescaled_velocity(series.velocity[n], f.rho0, tau);
    const Grid3& g = V.grid();
    for (std::size_t k = 0; k < g.nz(); ++k)
      for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
          const Vec3 y = g.node(i, j, k);
          const auto idx = g.index(i, j, k);
          c0 = std::max(c0, std::abs(V[0][idx] * y[0] + V[1][idx] * y[1] + V[2][idx] * y[2]));
        }
  }
  if (!any) throw DomainError("make_frame: no snapshot in [t0, 0)");
  f.C0 = c0;
  // (-t_star)^(1/2) < rho^2 / (8 C0)
  double lower = -rho;
  if (c0 > 0.0) lower = std::max(lower, -std::pow(rho * rho / (8.0 * c0), 2));
  if (!(lower < t0))
    throw PreconditionError("make_frame: no admissible t_star below t0 = " + fmt(t0) + " for C0 = " + fmt(c0));
  f.t_star = 0.5 * (lower + t0);
  f.validate();
  return f;
}

double annulus_positivity(const VectorField3& W, double inner, double outer) {
  if (!(inner >= 0.0 && inner < outer)) throw DomainError("annulus needs 0 <= inner < outer");
  const Grid3& g = W.grid();
  if (!Ball({0.0, 0.0, 0.0}, outer).fits_in(g)) throw DomainError("annulus does not fit inside the box");
  double m = inf;
  for (std::size_t k = 0; k < g.nz(); ++k)
    for (std::size_t j = 0; j < g.ny(); ++j)
      for (std::size_t i = 0; i < g.nx(); ++i) {
        const Vec3 y = g.node(i, j, k);
        const double d2 = dot(y, y);
        if (d2 < inner * inner || d2 > outer * outer) continue;
        const auto idx = g.index(i, j, k);
        m = std::min(m, W[0][idx] * y[0] + W[1][idx] * y[1] + W[2][idx] * y[2]);
      }
  if (m == inf) throw DomainError("annulus contains no grid node");
  return m;
}

}  // namespace bkm
