#include "bkm/cli.hpp"

#include <glob.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "bkm/diagnostics.hpp"
#include "bkm/errors.hpp"
#include "bkm/euler.hpp"
#include "bkm/gronwall.hpp"
#include "bkm/inequality_lab.hpp"
#include "bkm/snapshot_io.hpp"

#ifndef BKM_VERSION
#define BKM_VERSION "0.0.0"
#endif

namespace bkm {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string tool_version() { return BKM_VERSION; }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Strict view of a JSON object: keys not read before finish() are errors.
class Keys {
 public:
  Keys(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& k) const { return j_.contains(k); }
  std::string sub(const std::string& k) const { return path_ + "." + k; }

  const json* find(const std::string& k) {
    used_.insert(k);
    const auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& need(const std::string& k) {
    const json* v = find(k);
    if (!v) throw ConfigError(path_ + ": missing key '" + k + "'");
    return *v;
  }

  template <class T>
  T get(const std::string& k, T fallback);
  template <class T>
  T req(const std::string& k);

  // Rejects keys outside the allowed set before any value is read.
  void allow(std::initializer_list<const char*> keys) const {
    Keys probe(j_, path_);
    for (const char* k : keys) probe.used_.insert(k);
    probe.finish();
  }

  void finish() const {
    std::string unknown;
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) unknown += (unknown.empty() ? "'" : ", '") + k + "'";
    if (!unknown.empty()) throw ConfigError(path_ + ": unknown key(s) " + unknown);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path + ": expected a finite number");
  return x;
}

long long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return v.get<long long>();
}

template <class T>
T as(const json& v, const std::string& path) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(path + ": expected true or false");
    return v.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    const long long x = as_integer(v, path);
    if (std::is_unsigned_v<T> && x < 0) throw ConfigError(path + ": expected a nonnegative integer");
    return static_cast<T>(x);
  } else if constexpr (std::is_floating_point_v<T>) {
    return as_double(v, path);
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ConfigError(path + ": expected a string");
    return v.get<std::string>();
  } else if constexpr (std::is_same_v<T, Vec3>) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(path + ": expected an array of 3 numbers");
    return Vec3{as_double(v[0], path + "[0]"), as_double(v[1], path + "[1]"), as_double(v[2], path + "[2]")};
  } else if constexpr (std::is_same_v<T, std::array<int, 3>>) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(path + ": expected an array of 3 integers");
    std::array<int, 3> m{};
    for (int a = 0; a < 3; ++a) m[a] = static_cast<int>(as_integer(v[a], path + "[" + std::to_string(a) + "]"));
    return m;
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    if (!v.is_array()) throw ConfigError(path + ": expected an array of numbers");
    std::vector<double> xs;
    for (std::size_t i = 0; i < v.size(); ++i) xs.push_back(as_double(v[i], path + "[" + std::to_string(i) + "]"));
    return xs;
  } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
    if (!v.is_array()) throw ConfigError(path + ": expected an array of strings");
    std::vector<std::string> xs;
    for (std::size_t i = 0; i < v.size(); ++i) xs.push_back(as<std::string>(v[i], path + "[" + std::to_string(i) + "]"));
    return xs;
  } else {
    static_assert(sizeof(T) == 0, "unsupported config type");
  }
}

template <class T>
T Keys::get(const std::string& k, T fallback) {
  const json* v = find(k);
  return v ? as<T>(*v, sub(k)) : fallback;
}

template <class T>
T Keys::req(const std::string& k) {
  return as<T>(need(k), sub(k));
}

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path + ": " + what);
}

Grid3 parse_grid(const json& j, const std::string& path) {
  Keys o(j, path);
  const json& n = o.need("n");
  const double L = o.req<double>("box_length");
  o.finish();
  std::array<long long, 3> dims{};
  if (n.is_array()) {
    require(n.size() == 3, o.sub("n"), "expected an integer or an array of 3 integers");
    for (int a = 0; a < 3; ++a) dims[a] = as_integer(n[a], o.sub("n") + "[" + std::to_string(a) + "]");
  } else {
    dims.fill(as_integer(n, o.sub("n")));
  }
  for (long long d : dims) require(d >= 2, o.sub("n"), "grid sizes must be >= 2");
  require(L > 0.0, o.sub("box_length"), "must be positive");
  return Grid3(static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1]), static_cast<std::size_t>(dims[2]),
               L);
}

BmoConfig parse_bmo(const json& j, const std::string& path) {
  Keys o(j, path);
  BmoConfig c;
  c.radius_ladder_factor = o.get("radius_ladder_factor", c.radius_ladder_factor);
  c.min_radius_cells = o.get("min_radius_cells", c.min_radius_cells);
  c.center_stride = o.get("center_stride", c.center_stride);
  c.max_radius_factor = o.get("max_radius_factor", c.max_radius_factor);
  o.finish();
  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return c;
}

}  // namespace

AnalyticFunction parse_analytic(const json& j, const std::string& path, const std::uint64_t* seed) {
  using namespace analytic;
  Keys o(j, path);
  const auto family = o.req<std::string>("family");
  const auto positive = [&](double x, const std::string& k) {
    require(x > 0.0, o.sub(k), "must be positive");
    return x;
  };
  AnalyticFunction f;
  if (family == "constant") {
    Constant c;
    c.value = o.get("value", c.value);
    f = c;
  } else if (family == "trig") {
    TrigPolynomial p;
    p.period = positive(o.get("period", p.period), "period");
    const json& terms = o.need("terms");
    require(terms.is_array() && !terms.empty(), o.sub("terms"), "expected a nonempty array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      Keys t(terms[i], o.sub("terms") + "[" + std::to_string(i) + "]");
      TrigTerm term;
      term.amplitude = t.get("amplitude", term.amplitude);
      term.modes = t.get("modes", term.modes);
      term.phase = t.get("phase", term.phase);
      t.finish();
      p.terms.push_back(term);
    }
    f = p;
  } else if (family == "truncated-log") {
    TruncatedLog t;
    t.eps = positive(o.get("eps", t.eps), "eps");
    t.center = o.get("center", t.center);
    t.cutoff_inner = positive(o.get("cutoff_inner", t.cutoff_inner), "cutoff_inner");
    t.cutoff_outer = o.get("cutoff_outer", t.cutoff_outer);
    require(t.cutoff_outer > t.cutoff_inner, o.sub("cutoff_outer"), "must exceed cutoff_inner");
    f = t;
  } else if (family == "gaussian") {
    GaussianBump g;
    g.amplitude = o.get("amplitude", g.amplitude);
    g.sigma = positive(o.get("sigma", g.sigma), "sigma");
    g.center = o.get("center", g.center);
    f = g;
  } else if (family == "step") {
    Step s;
    s.axis = o.get("axis", s.axis);
    require(s.axis >= 0 && s.axis <= 2, o.sub("axis"), "must be 0, 1 or 2");
    s.offset = o.get("offset", s.offset);
    f = s;
  } else if (family == "linear") {
    Linear l;
    l.gradient = o.get("gradient", l.gradient);
    l.offset = o.get("offset", l.offset);
    f = l;
  } else if (family == "radial-power") {
    RadialPower r;
    r.exponent = o.get("exponent", r.exponent);
    r.center = o.get("center", r.center);
    f = r;
  } else if (family == "taylor-green") {
    TaylorGreen t;
    t.amplitude = o.get("amplitude", t.amplitude);
    t.period = positive(o.get("period", t.period), "period");
    f = t;
  } else if (family == "abc") {
    Abc a;
    a.a = o.get("a", a.a);
    a.b = o.get("b", a.b);
    a.c = o.get("c", a.c);
    a.period = positive(o.get("period", a.period), "period");
    f = a;
  } else if (family == "constant-vector") {
    ConstantVector c;
    c.value = o.get("value", c.value);
    f = c;
  } else if (family == "random-solenoidal") {
    RandomSolenoidal r;
    if (seed) r.seed = *seed;
    r.seed = o.get("seed", r.seed);
    r.spectrum_slope = o.get("spectrum_slope", r.spectrum_slope);
    r.max_mode = o.get("max_mode", r.max_mode);
    require(r.max_mode >= 1, o.sub("max_mode"), "must be >= 1");
    r.rms = o.get("rms", r.rms);
    require(r.rms >= 0.0, o.sub("rms"), "must be >= 0");
    r.period = positive(o.get("period", r.period), "period");
    f = r;
  } else {
    throw ConfigError(o.sub("family") + ": unknown family '" + family +
                      "' (known: constant, trig, truncated-log, gaussian, step, linear, radial-power, taylor-green, "
                      "abc, constant-vector, random-solenoidal)");
  }
  o.finish();
  return f;
}

namespace {

struct Context {
  std::optional<fs::path> config;
  fs::path out_dir = ".";
  bool out_given = false;
  std::optional<std::uint64_t> seed;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

struct LoadedConfig {
  json doc;
  std::string hash;
  std::vector<std::string> inputs;  // provenance inputs the command adds to
};

LoadedConfig load_config(const Context& ctx, bool required) {
  std::string text = "{}";
  if (ctx.config) {
    std::ifstream in(*ctx.config, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + ctx.config->string());
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else if (required) {
    throw ConfigError("--config is required for this command");
  }
  LoadedConfig c;
  try {
    c.doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError((ctx.config ? ctx.config->string() : std::string("config")) + ": " + e.what());
  }
  if (!c.doc.is_object()) throw ConfigError("config: top level must be an object");
  c.hash = fnv1a_hex(text);
  if (ctx.seed) c.inputs.push_back("seed=" + std::to_string(*ctx.seed));
  return c;
}

ojson provenance_json(const Provenance& p) {
  ojson j;
  j["tool"] = p.tool;
  j["version"] = p.version;
  j["config_hash"] = p.config_hash;
  j["inputs"] = p.inputs;
  return j;
}

Provenance provenance(const LoadedConfig& c) {
  Provenance p;
  p.version = tool_version();
  p.config_hash = c.hash;
  p.inputs = c.inputs;
  return p;
}

std::string num(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// RFC-4180 field: quoted when it holds a separator, quote or line break.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row(header); }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) text_ += (i ? "," : "") + csv_field(fields[i]);
    text_ += "\r\n";
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

void make_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
  if (!f) throw ConfigError("write failed for " + path.string());
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06zu.bkm1", index);
  return buf;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Context& ctx) {
  const auto cfg_file = load_config(ctx, true);
  Keys o(cfg_file.doc, "config");
  o.allow({"grid", "dt", "cfl", "t_end", "dealias", "snapshot_every", "max_steps", "initial"});
  SimConfig cfg;
  cfg.grid = parse_grid(o.need("grid"), o.sub("grid"));
  cfg.dt = o.get("dt", cfg.dt);
  cfg.cfl = o.get("cfl", cfg.cfl);
  cfg.t_end = o.get("t_end", cfg.t_end);
  cfg.dealias = o.get("dealias", cfg.dealias);
  cfg.snapshot_every = o.get("snapshot_every", cfg.snapshot_every);
  cfg.max_steps = o.get("max_steps", cfg.max_steps);
  if (const json* ic = o.find("initial"); ic && !ic->is_null()) {
    cfg.initial = parse_analytic(*ic, o.sub("initial"), ctx.seed ? &*ctx.seed : nullptr);
  }
  o.finish();
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  make_out_dir(ctx.out_dir);
  std::vector<std::string> written;
  const auto series = run(cfg, [&](const VectorField3& v, std::size_t i) {
    write_snapshot(ctx.out_dir / snapshot_name(i), v);
    written.push_back(snapshot_name(i));
  });

  Csv energy({"step", "time", "energy", "max_div"});
  for (const auto& r : series.energy_log) energy.row({std::to_string(r.step), num(r.time), num(r.energy), num(r.max_div)});
  write_text(ctx.out_dir / "energy.csv", energy.text());

  ojson run_json;
  run_json["provenance"] = provenance_json(provenance(cfg_file));
  run_json["snapshots"] = written;
  run_json["stopped_early"] = series.stopped_early;
  run_json["last_valid_time"] = series.last_valid_time;
  run_json["stop_reason"] = series.stop_reason;
  write_text(ctx.out_dir / "run.json", dump(run_json));

  *ctx.out << "wrote " << written.size() << " snapshots to " << ctx.out_dir.string() << "\n";
  if (series.stopped_early) {
    *ctx.err << "early stop at t = " << num(series.last_valid_time) << ": " << series.stop_reason << "\n";
    return kExitEarlyStop;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- diagnose

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<std::string> paths;
  if (rc == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) paths.emplace_back(g.gl_pathv[i]);
  globfree(&g);
  if (rc != 0 && rc != GLOB_NOMATCH) throw ConfigError("cannot expand input pattern '" + pattern + "'");
  return paths;  // glob sorts
}

int cmd_diagnose(const Context& ctx) {
  auto cfg_file = load_config(ctx, true);
  Keys o(cfg_file.doc, "config");
  o.allow({"inputs", "balls", "q_list", "bmo"});
  std::vector<std::string> patterns;
  const json& inputs = o.need("inputs");
  if (inputs.is_string()) {
    patterns.push_back(inputs.get<std::string>());
  } else {
    patterns = as<std::vector<std::string>>(inputs, o.sub("inputs"));
  }
  std::vector<Ball> balls;
  if (const json* bs = o.find("balls")) {
    require(bs->is_array(), o.sub("balls"), "expected an array");
    for (std::size_t i = 0; i < bs->size(); ++i) {
      Keys b((*bs)[i], o.sub("balls") + "[" + std::to_string(i) + "]");
      const Vec3 c = b.req<Vec3>("center");
      const double r = b.req<double>("radius");
      b.finish();
      require(r > 0.0, b.sub("radius"), "must be positive");
      balls.emplace_back(c, r);
    }
  }
  require(!balls.empty(), o.sub("balls"), "at least one ball is required");
  const auto q_list = o.get("q_list", std::vector<double>{4.0});
  for (std::size_t i = 0; i < q_list.size(); ++i)
    require(q_list[i] >= 1.0, o.sub("q_list") + "[" + std::to_string(i) + "]", "q must be >= 1");
  BmoConfig bmo;
  if (const json* b = o.find("bmo")) bmo = parse_bmo(*b, o.sub("bmo"));
  o.finish();

  std::vector<std::string> paths;
  for (const auto& p : patterns) {
    const auto m = expand_glob(p);
    paths.insert(paths.end(), m.begin(), m.end());
  }
  if (paths.empty()) throw ConfigError("no input: no snapshot matches " + o.sub("inputs"));

  std::vector<Snapshot> snaps;
  for (const auto& p : paths) {
    snaps.push_back(read_snapshot(p));
    if (snaps.back().components.size() != 3) throw ConfigError(p + ": not a velocity snapshot");
    if (!(snaps.back().grid == snaps.front().grid)) throw ConfigError(p + ": grid differs from " + paths.front());
  }
  std::vector<std::size_t> order(snaps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return snaps[a].time < snaps[b].time; });
  SnapshotSeries series;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && !(snaps[order[k]].time > snaps[order[k - 1]].time))
      throw ConfigError(paths[order[k]] + ": duplicate time tag " + num(snaps[order[k]].time));
    series.velocity.push_back(snaps[order[k]].vector());
    cfg_file.inputs.push_back(paths[order[k]]);
  }
  snaps.clear();

  const auto report = build_report(series, balls, q_list, bmo, provenance(cfg_file));
  make_out_dir(ctx.out_dir);
  write_text(ctx.out_dir / "report.json", dump(to_json(report)));

  std::vector<std::string> names{"bmo", "sup"};
  for (double q : q_list) names.push_back(NormSpec{NormSpec::Kind::lq, q}.name());
  const auto write_series = [&](const DiagnosticsRow& row, const std::string& label) {
    for (std::size_t i = 0; i < row.series.size() && i < names.size(); ++i) {
      Csv csv({"time", "value"});
      for (std::size_t s = 0; s < row.series[i].times.size(); ++s)
        csv.row({num(row.series[i].times[s]), num(row.series[i].values[s])});
      write_text(ctx.out_dir / (label + "_" + names[i] + ".csv"), csv.text());
    }
  };
  write_series(report.global, "global");
  for (std::size_t b = 0; b < report.balls.size(); ++b) {
    write_series(report.balls[b], "ball" + std::to_string(b));
    for (const auto& n : report.balls[b].notes) *ctx.err << "ball " << b << ": " << n << "\n";
  }
  *ctx.out << "wrote report for " << series.size() << " snapshots and " << balls.size() << " balls to "
           << ctx.out_dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const Context& ctx) {
  const auto cfg_file = load_config(ctx, false);
  Keys o(cfg_file.doc, "config");
  o.allow({"ids", "family", "grids", "scales", "box_length", "params"});
  std::vector<std::string> ids;
  for (const auto& [id, title] : inequality_catalog()) ids.push_back(id);
  ids = o.get("ids", ids);
  std::string unknown;
  for (const auto& id : ids)
    if (!is_known_inequality(id)) unknown += (unknown.empty() ? "'" : ", '") + id + "'";
  if (!unknown.empty()) {
    std::string known;
    for (const auto& [id, title] : inequality_catalog()) known += (known.empty() ? "" : ", ") + id;
    throw ConfigError(o.sub("ids") + ": unknown inequality id(s) " + unknown + "; known ids: " + known);
  }

  const double box = o.get("box_length", 4.0);
  require(box > 0.0, o.sub("box_length"), "must be positive");
  auto base = TestFamily::default_family(box);
  if (ctx.seed)
    for (auto& m : base.members)
      if (auto* r = std::get_if<analytic::RandomSolenoidal>(&m.f)) r->seed = *ctx.seed;
  TestFamily family = base;
  if (const json* fam = o.find("family")) {
    if (fam->is_string()) {
      require(fam->get<std::string>() == "default", o.sub("family"), "expected \"default\" or an array of members");
    } else {
      require(fam->is_array(), o.sub("family"), "expected \"default\" or an array of members");
      family.members.clear();
      for (std::size_t i = 0; i < fam->size(); ++i) {
        const std::string path = o.sub("family") + "[" + std::to_string(i) + "]";
        const json& e = (*fam)[i];
        if (e.is_string()) {
          const auto name = e.get<std::string>();
          const auto it = std::find_if(base.members.begin(), base.members.end(),
                                       [&](const LabMember& m) { return m.name == name; });
          if (it == base.members.end()) {
            std::string known;
            for (const auto& m : base.members) known += (known.empty() ? "" : ", ") + m.name;
            throw ConfigError(path + ": unknown member '" + name + "'; default members: " + known);
          }
          family.members.push_back(*it);
        } else {
          Keys m(e, path);
          LabMember member;
          member.name = m.req<std::string>("name");
          member.f = parse_analytic(m.need("function"), m.sub("function"), ctx.seed ? &*ctx.seed : nullptr);
          member.smooth = m.get("smooth", true);
          m.finish();
          family.members.push_back(member);
        }
      }
    }
  }

  std::vector<Grid3> grids;
  const json* gs = o.find("grids");
  const std::vector<double> grid_sizes = gs ? as<std::vector<double>>(*gs, o.sub("grids")) : std::vector<double>{32};
  for (std::size_t i = 0; i < grid_sizes.size(); ++i) {
    const double n = grid_sizes[i];
    require(n >= 8 && n == std::floor(n), o.sub("grids") + "[" + std::to_string(i) + "]", "expected an integer >= 8");
    grids.emplace_back(static_cast<std::size_t>(n), box);
  }
  const auto scales = o.get("scales", std::vector<double>{1.0});
  for (std::size_t i = 0; i < scales.size(); ++i)
    require(scales[i] > 0.0, o.sub("scales") + "[" + std::to_string(i) + "]", "must be positive");

  LabParams params;
  if (const json* pj = o.find("params")) {
    Keys p(*pj, o.sub("params"));
    params.r = p.get("r", params.r);
    params.q = p.get("q", params.q);
    params.m = p.get("m", params.m);
    params.k_interp = p.get("k_interp", params.k_interp);
    params.m_second = p.get("m_second", params.m_second);
    params.k_second = p.get("k_second", params.k_second);
    params.m_gn = p.get("m_gn", params.m_gn);
    params.m_sup = p.get("m_sup", params.m_sup);
    params.ratio_cap = p.get("ratio_cap", params.ratio_cap);
    if (const json* b = p.find("bmo")) params.bmo = parse_bmo(*b, p.sub("bmo"));
    p.finish();
    require(params.r > 0.0, p.sub("r"), "must be positive");
    require(params.q >= 1.0, p.sub("q"), "must be >= 1");
    require(params.ratio_cap > 0.0, p.sub("ratio_cap"), "must be positive");
  }
  o.finish();

  const auto sweep = run_family_sweep(ids, family, grids, scales, params);
  ojson j;
  j["provenance"] = provenance_json(provenance(cfg_file));
  const ojson body = to_json(sweep);
  for (const auto& [k, v] : body.items()) j[k] = v;
  make_out_dir(ctx.out_dir);
  write_text(ctx.out_dir / "sweep.json", dump(j));

  for (const auto& [id, s] : sweep.summary)
    *ctx.out << id << ": " << s.reports << " reports, max ratio " << num(s.max_ratio)
             << (s.below_cap ? "" : " (above cap)") << "\n";
  *ctx.out << sweep.reports.size() << " reports, " << sweep.skipped.size() << " skipped\n";
  return kExitOk;
}

// ---------------------------------------------------------------- gronwall

struct NamedFunction {
  std::string name;
  std::function<double(double)> f;
  double a, b, integral;
};

const std::vector<NamedFunction>& identity_functions() {
  static const std::vector<NamedFunction> fs = {
      {"one", [](double) { return 1.0; }, 0.0, 1.0, 1.0},
      {"t", [](double t) { return t; }, 0.0, 1.0, 0.5},
      {"exp", [](double t) { return std::exp(t); }, 0.0, 1.0, std::numbers::e - 1.0},
      {"abs-sin", [](double t) { return std::abs(std::sin(t)); }, 0.0, 2.0 * std::numbers::pi, 4.0},
  };
  return fs;
}

std::function<double(double)> parse_density(const json& j, const std::string& path) {
  Keys o(j, path);
  const auto kind = o.req<std::string>("kind");
  std::function<double(double)> f;
  if (kind == "constant") {
    const double v = o.get("value", 1.0);
    require(v >= 0.0, o.sub("value"), "must be >= 0");
    f = [v](double) { return v; };
  } else if (kind == "abs-sin") {
    const double amp = o.get("amplitude", 1.0), w = o.get("frequency", 1.0);
    require(amp >= 0.0, o.sub("amplitude"), "must be >= 0");
    f = [amp, w](double t) { return amp * std::abs(std::sin(w * t)); };
  } else if (kind == "exp") {
    const double amp = o.get("amplitude", 1.0), rate = o.get("rate", 1.0);
    require(amp >= 0.0, o.sub("amplitude"), "must be >= 0");
    f = [amp, rate](double t) { return amp * std::exp(rate * t); };
  } else {
    throw ConfigError(o.sub("kind") + ": unknown density '" + kind + "' (known: constant, abs-sin, exp)");
  }
  o.finish();
  return f;
}

struct NamedProblem {
  std::string name;
  IterationProblem problem;
};

std::vector<NamedProblem> canned_problems(std::size_t intervals) {
  return {
      {"constant", make_problem([](double) { return 1.0; }, 1.0, [](double) { return 6.0; }, 0.0, 1.0, intervals)},
      {"oscillating",
       make_problem([](double t) { return std::abs(std::sin(7.0 * t)); }, 1.3, [](double) { return 24.0; }, 0.0, 2.0,
                    intervals)},
      {"growing",
       make_problem([](double t) { return 0.5 * std::exp(t); }, 0.5, [](double) { return 32.0; }, 0.0, 1.5, intervals)},
  };
}

int cmd_gronwall(const Context& ctx) {
  const auto cfg_file = load_config(ctx, false);
  Keys o(cfg_file.doc, "config");
  o.allow({"identity", "problems", "m_max", "seed"});
  std::size_t id_intervals = 10000;
  int k_max = 6;
  std::vector<std::string> fnames;
  for (const auto& f : identity_functions()) fnames.push_back(f.name);
  if (const json* id = o.find("identity")) {
    Keys i(*id, o.sub("identity"));
    id_intervals = i.get("intervals", id_intervals);
    k_max = i.get("k_max", k_max);
    fnames = i.get("functions", fnames);
    i.finish();
    require(id_intervals >= 2 && id_intervals % 2 == 0, i.sub("intervals"), "expected an even number >= 2");
    require(k_max >= 1 && k_max <= 8, i.sub("k_max"), "must lie in [1, 8]");
  }
  std::vector<const NamedFunction*> funcs;
  for (std::size_t i = 0; i < fnames.size(); ++i) {
    const auto& all = identity_functions();
    const auto it = std::find_if(all.begin(), all.end(), [&](const NamedFunction& f) { return f.name == fnames[i]; });
    require(it != all.end(), o.sub("identity.functions") + "[" + std::to_string(i) + "]",
            "unknown function '" + fnames[i] + "' (known: one, t, exp, abs-sin)");
    funcs.push_back(&*it);
  }

  const int m_max = o.get("m_max", 20);
  require(m_max >= 1 && m_max <= 30, o.sub("m_max"), "must lie in [1, 30]");
  std::uint64_t seed = o.get<std::uint64_t>("seed", 1);
  if (ctx.seed) seed = *ctx.seed;
  std::vector<NamedProblem> problems;
  if (const json* ps = o.find("problems")) {
    require(ps->is_array(), o.sub("problems"), "expected an array");
    for (std::size_t i = 0; i < ps->size(); ++i) {
      Keys p((*ps)[i], o.sub("problems") + "[" + std::to_string(i) + "]");
      const auto name = p.req<std::string>("name");
      const auto a = parse_density(p.need("density"), p.sub("density"));
      const double C = p.req<double>("C"), K = p.req<double>("K");
      const double t0 = p.get("t0", 0.0), t1 = p.req<double>("t1");
      const std::size_t n = p.get<std::size_t>("intervals", 2000);
      p.finish();
      require(K > 0.0, p.sub("K"), "must be positive");
      require(n >= 1, p.sub("intervals"), "must be >= 1");
      try {
        problems.push_back({name, make_problem(a, C, [K](double) { return K; }, t0, t1, n)});
      } catch (const Error& e) {
        throw ConfigError(o.sub("problems") + "[" + std::to_string(i) + "]: " + e.what());
      }
    }
  } else {
    problems = canned_problems(2000);
  }
  o.finish();

  Csv identity({"function", "a", "b", "k", "nested", "closed_form", "exact", "rel_err"});
  for (const auto* f : funcs) {
    const auto s = sample_function(f->f, f->a, f->b, id_intervals);
    double fact = 1.0;
    for (int k = 1; k <= k_max; ++k) {
      fact *= k;
      const double nested = iterated_integral(s, k), closed = iterated_integral_closed_form(s, k);
      const double exact = std::pow(f->integral, k) / fact;
      identity.row({f->name, num(f->a), num(f->b), std::to_string(k), num(nested), num(closed), num(exact),
                    num(std::abs(nested - closed) / std::abs(closed))});
    }
  }

  Csv bound({"problem", "mode", "t", "integral_a", "bound", "beta0", "margin"});
  std::size_t violations = 0;
  for (const auto& [name, p] : problems) {
    for (auto mode : {RecursionMode::equality, RecursionMode::random_slack}) {
      const auto v = simulate_recursion(p, m_max, mode, seed);
      violations += v.violations;
      const std::size_t n = p.a.intervals();
      for (int j = 0; j <= 10; ++j) {  // eleven evenly spaced samples
        const std::size_t i = n * static_cast<std::size_t>(j) / 10;
        const double t = p.a.time(i), b = iteration_bound(p, t), beta = v.beta.values[0][i];
        bound.row({name, mode == RecursionMode::equality ? "equality" : "random-slack", num(t),
                   num(integral_of_density(p, t)), num(b), num(beta), num(b - beta)});
      }
    }
  }

  if (ctx.out_given) {
    make_out_dir(ctx.out_dir);
    write_text(ctx.out_dir / "identity.csv", identity.text());
    write_text(ctx.out_dir / "bound.csv", bound.text());
  }
  *ctx.out << identity.text() << "\r\n" << bound.text();
  if (violations) *ctx.err << violations << " samples violate the iteration bound\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local BMO vorticity diagnostics and inequality checks for 3D Euler", "bkm"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  std::string config, out_dir;
  int threads = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config, "JSON config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for random families and slack");
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "run the Euler solver, write snapshots and energy.csv"},
      {"diagnose", "criterion integrals over balls from snapshots"},
      {"verify", "inequality sweep over a test family"},
      {"gronwall", "iterated-integral identity and iteration bound tables"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  Context ctx;
  ctx.out = &out;
  ctx.err = &err;
  if (!config.empty()) ctx.config = config;
  if (!out_dir.empty()) {
    ctx.out_dir = out_dir;
    ctx.out_given = true;
  }
  if (app.count("--seed")) ctx.seed = seed;
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "simulate") return cmd_simulate(ctx);
    if (cmd == "diagnose") return cmd_diagnose(ctx);
    if (cmd == "verify") return cmd_verify(ctx);
    return cmd_gronwall(ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace bkm
