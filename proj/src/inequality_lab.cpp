#include "bkm/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>

#include "bkm/errors.hpp"
#include "bkm/euler.hpp"
#include "bkm/extension.hpp"
#include "bkm/spectral.hpp"

namespace bkm {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double kDivTolerance = 1e-10;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw PreconditionError(msg);
}

void require_div_free(const VectorField3& u, const std::string& id) {
  const double d = max_divergence(u);
  require(d < kDivTolerance, id + ": field is not divergence-free (max|div| = " + fmt(d) + ")");
}

Ball support_ball(const CutoffFunction& psi) { return Ball(psi.center(), psi.r_outer()); }

Ball padded_ball(const CutoffFunction& psi) { return Ball(psi.center(), kLabPadding * psi.r_outer()); }

// cutoff has to live in B(center, r)
void require_inside(const CutoffFunction& psi, double r, const std::string& id) {
  require(r > 0.0 && psi.r_outer() <= r * (1.0 + 1e-12), id + ": cutoff support exceeds B(r)");
}

// ||f psi^m||_p over supp psi
double wnorm(const FieldView& f, const CutoffFunction& psi, double m, double p) {
  return lq_norm(FieldView(weighted(f, psi, m)), support_ball(psi), p);
}

double wbmo(const FieldView& f, const CutoffFunction& psi, double m, const BmoConfig& cfg) {
  return weighted_bmo(f, psi, m, cfg, padded_ball(psi));
}

// gradients of every component of a stack, component-major
std::vector<ScalarField3> gradient_stack(const FieldView& u) {
  std::vector<ScalarField3> out;
  for (std::size_t c = 0; c < u.components(); ++c) {
    const auto src = u.component(c);
    const VectorField3 g = gradient(ScalarField3(u.grid(), std::vector<double>(src.begin(), src.end())));
    for (int a = 0; a < 3; ++a) out.push_back(g[a]);
  }
  return out;
}

InequalityReport make(const std::string& id, double lhs, std::vector<std::pair<std::string, double>> terms,
                      std::map<std::string, double> params) {
  InequalityReport r;
  r.inequality_id = id;
  r.lhs = lhs;
  r.rhs_terms = std::move(terms);
  r.params = std::move(params);
  r.finalize();
  return r;
}

double multiplicative_exponent(double q) { return (5.0 * q - 6.0) / (2.0 * q); }

}  // namespace

const std::vector<std::pair<std::string, std::string>>& inequality_catalog() {
  static const std::vector<std::pair<std::string, std::string>> ids{
      {"7.12", "local logarithmic Sobolev inequality"},
      {"8.2", "extension: gradient bound"},
      {"8.2a", "extension: BMO bound"},
      {"8.13a", "gradient by curl with cutoff"},
      {"8.13b", "interpolation of u with cutoff"},
      {"8.14", "BMO of the gradient with cutoff"},
      {"8.15zz", "BMO of the curl with cutoff"},
      {"8.15e", "BMO of the gradient, combined form"},
      {"8.16", "gradient by second gradient"},
      {"8.17", "second gradient by gradient of curl"},
      {"8.17a", "gradient by gradient of curl"},
      {"8.22", "second gradient with L2 remainder"},
      {"10.40a", "local Kozono-Taniuchi product inequality"},
      {"B.1", "Gagliardo-Nirenberg with cutoff"},
      {"B.2", "sup norm by Gagliardo-Nirenberg with cutoff"},
      {"B.3", "John-Nirenberg embedding"},
  };
  return ids;
}

bool is_known_inequality(const std::string& id) {
  const auto& c = inequality_catalog();
  return std::any_of(c.begin(), c.end(), [&](const auto& e) { return e.first == id; });
}

InequalityReport check_log_sobolev(const ScalarField3& u, double r, double q, const BmoConfig& cfg) {
  require(q > 3.0 && std::isfinite(q), "7.12: needs 3 < q < inf");
  const Ball b({0.0, 0.0, 0.0}, r);
  const double bmo = bmo_norm(u, b, cfg);
  const double grad = lq_norm(gradient(u), b, q);
  const double l2 = std::pow(r, -1.0 + 3.0 / q - 1.5) * lq_norm(u, b, 2.0);
  return make("7.12", lq_norm(u, b, inf),
              {{"bmo_log_grad", (1.0 + bmo) * std::log(std::numbers::e + grad)},
               {"bmo_log_l2", (1.0 + bmo) * std::log(std::numbers::e + l2)}},
              {{"q", q}, {"r", r}, {"bmo_norm", bmo}});
}

InequalityReport check_gradient_curl_lq(const VectorField3& u, const CutoffFunction& psi, double m, double q) {
  require(q > 2.0 && std::isfinite(q), "8.13a: needs 2 < q < inf");
  const double a = multiplicative_exponent(q);
  require(m >= a, "8.13a: needs m >= (5q-6)/(2q) = " + fmt(a));
  require_div_free(u, "8.13a");
  const double gp = psi.measured_grad_max();
  return make("8.13a", wnorm(jacobian(u), psi, m, q),
              {{"curl_psi_m_Lq", wnorm(curl(u), psi, m, q)},
               {"gradpsi_a_u_psi_m-a_L2", std::pow(gp, a) * wnorm(u, psi, m - a, 2.0)}},
              {{"q", q}, {"m", m}, {"a", a}, {"r", psi.r_outer()}});
}

InequalityReport check_u_psi_interpolation(const VectorField3& u, const CutoffFunction& psi, double m, double k,
                                           double q) {
  require(q > 2.0 && std::isfinite(q), "8.13b: needs 2 < q < inf");
  const double a = multiplicative_exponent(q);
  require(m >= a, "8.13b: needs m >= (5q-6)/(2q)");
  require(k >= 1.0 && k <= m / a, "8.13b: needs 1 <= k <= m/a = " + fmt(m / a));
  require_div_free(u, "8.13b");
  const double gp = psi.measured_grad_max();
  const double l2 = wnorm(u, psi, m - k * a, 2.0);
  const double c = wnorm(curl(u), psi, m, q);
  return make("8.13b", wnorm(u, psi, m - k, q),
              {{"interp_L2_curl_Lq", std::pow(l2, 1.0 / a) * std::pow(c, 1.0 - 1.0 / a)},
               {"gradpsi_a-1_u_L2", std::pow(gp, a - 1.0) * l2}},
              {{"q", q}, {"m", m}, {"k", k}, {"a", a}, {"r", psi.r_outer()}});
}

InequalityReport check_grad_bmo(const VectorField3& u, const CutoffFunction& psi, double r, const BmoConfig& cfg) {
  require_inside(psi, r, "8.14");
  require_div_free(u, "8.14");
  const double gp = psi.measured_grad_max();
  const double l2 = wnorm(u, psi, 1.0, 2.0);
  return make("8.14", wbmo(jacobian(u), psi, 6.0, cfg),
              {{"curl_psi5_bmo", wbmo(curl(u), psi, 5.0, cfg)},
               {"r^1.5_gradpsi^5_u_psi_L2", std::pow(r, 1.5) * std::pow(gp, 5) * l2},
               {"gradpsi^2.5_u_psi_L2", std::pow(gp, 2.5) * l2}},
              {{"r", r}});
}

InequalityReport check_curl_cutoff_bmo(const VectorField3& u, const CutoffFunction& psi, double r,
                                       const BmoConfig& cfg) {
  require_inside(psi, r, "8.15zz");
  const Ball b(psi.center(), r);
  const double f = 1.0 + std::pow(r * psi.measured_grad_max(), 5);
  const VectorField3 w = curl(u);
  return make("8.15zz", wbmo(w, psi, 5.0, cfg),
              {{"factor_curl_bmo_ball", f * bmo_seminorm(w, b, cfg)},
               {"factor_r^-2.5_u_L2_ball", f * std::pow(r, -2.5) * lq_norm(u, b, 2.0)}},
              {{"r", r}});
}

InequalityReport check_grad_bmo_combined(const VectorField3& u, const CutoffFunction& psi, double r,
                                         const BmoConfig& cfg) {
  require_inside(psi, r, "8.15e");
  require_div_free(u, "8.15e");
  const Ball b(psi.center(), r);
  const double g5 = std::pow(psi.measured_grad_max(), 5);
  const auto ju = weighted(FieldView(jacobian(u)), psi, 6.0);
  return make("8.15e", bmo_norm(FieldView(ju), b, cfg),
              {{"factor_curl_bmo_ball", (1.0 + std::pow(r, 5) * g5) * bmo_seminorm(curl(u), b, cfg)},
               {"factor_u_L2_ball", (std::pow(r, -2.5) + std::pow(r, 2.5) * g5) * lq_norm(u, b, 2.0)}},
              {{"r", r}});
}

InequalityReport check_second_gradient(const VectorField3& u, const CutoffFunction& psi, double m, double k, double q,
                                       const std::string& id) {
  require(q >= 2.0 && std::isfinite(q), id + ": needs 2 <= q < inf");
  const double gp = psi.measured_grad_max();
  std::map<std::string, double> params{{"q", q}, {"k", k}, {"r", psi.r_outer()}};
  if (id == "8.16") {
    require(m >= 2.0 && k > 0.0 && k <= 2.0 * m, "8.16: needs m >= 2 and 0 < k <= 2m");
    params["m"] = m;
    const double interp =
        std::sqrt(wnorm(u, psi, 2.0 * m - k, q)) * std::sqrt(wnorm(second_derivatives(u), psi, k, q));
    return make(id, wnorm(jacobian(u), psi, m, q),
                {{"interp_u_second_grad", interp}, {"gradpsi_u_psi_m-1_Lq", gp * wnorm(u, psi, m - 1.0, q)}}, params);
  }
  if (id == "8.17" || id == "8.17a") {
    require(m >= 2.0 && k >= m + 1.0 && k <= 2.0 * m, id + ": needs m >= 2 and m+1 <= k <= 2m");
    require_div_free(u, id);
    params["m"] = m;
    const auto gcurl = jacobian(curl(u));
    if (id == "8.17") {
      return make(id, wnorm(second_derivatives(u), psi, k, q),
                  {{"grad_curl_psi_k_Lq", wnorm(gcurl, psi, k, q)},
                   {"gradpsi^2_u_psi_k-2_Lq", gp * gp * wnorm(u, psi, k - 2.0, q)}},
                  params);
    }
    const double interp = std::sqrt(wnorm(u, psi, 2.0 * m - k, q)) * std::sqrt(wnorm(gcurl, psi, k, q));
    return make(id, wnorm(jacobian(u), psi, m, q),
                {{"interp_u_grad_curl", interp}, {"gradpsi_u_psi_m-1_Lq", gp * wnorm(u, psi, m - 1.0, q)}}, params);
  }
  if (id == "8.22") {
    require(k > 5.0, "8.22: needs k > 5");
    require_div_free(u, id);
    const double e = (7.0 * q - 6.0) / (2.0 * q);
    params["exponent"] = e;
    return make(id, wnorm(second_derivatives(u), psi, k, q),
                {{"grad_curl_psi_k_Lq", wnorm(jacobian(curl(u)), psi, k, q)},
                 {"gradpsi^e_u_psi_k-5_L2", std::pow(gp, e) * wnorm(u, psi, k - 5.0, 2.0)}},
                params);
  }
  throw PreconditionError("unknown second-gradient id '" + id + "'");
}

InequalityReport check_kozono_taniuchi_product(const ScalarField3& f, const ScalarField3& g, double r, double q,
                                               const BmoConfig& cfg) {
  require(q > 1.0 && std::isfinite(q), "10.40a: needs 1 < q < inf");
  if (!(f.grid() == g.grid())) throw PreconditionError("10.40a: f and g live on different grids");
  const Ball b({0.0, 0.0, 0.0}, r);
  std::vector<double> fg(f.size());
  for (std::size_t i = 0; i < fg.size(); ++i) fg[i] = f[i] * g[i];
  const ScalarField3 prod(f.grid(), std::move(fg));
  const double fq = lq_norm(f, b, q), gq = lq_norm(g, b, q);
  return make("10.40a", lq_norm(prod, b, q),
              {{"f_bmo_g_Lq", bmo_seminorm(f, b, cfg) * gq},
               {"g_bmo_f_Lq", bmo_seminorm(g, b, cfg) * fq},
               {"r^-3/q_f_Lq_g_Lq", std::pow(r, -3.0 / q) * fq * gq}},
              {{"q", q}, {"r", r}});
}

InequalityReport check_gn_cutoff(const FieldView& u, const CutoffFunction& psi, double m, double k, double q,
                                 const std::string& id) {
  const double gp = psi.measured_grad_max();
  if (id == "B.1") {
    require(q > 2.0 && std::isfinite(q), "B.1: needs 2 < q < inf");
    require(k >= 1.0, "B.1: needs k >= 1");
    const double d = 3.0 * (q - 2.0) + 2.0 * q;
    const double shift = k * d / (2.0 * q);
    require(m >= shift, "B.1: needs m >= k(3(q-2)+2q)/(2q) = " + fmt(shift));
    const double l2 = wnorm(u, psi, m - shift, 2.0);
    const double grad = wnorm(FieldView(gradient_stack(u)), psi, m, q);
    return make(id, wnorm(u, psi, m - k, q),
                {{"interp_L2_grad_Lq", std::pow(l2, 2.0 * q / d) * std::pow(grad, 3.0 * (q - 2.0) / d)},
                 {"gradpsi_u_L2", std::pow(gp, 3.0 * (q - 2.0) / (2.0 * q)) * l2}},
                {{"q", q}, {"m", m}, {"k", k}, {"r", psi.r_outer()}});
  }
  if (id == "B.2") {
    require(q > 3.0 && std::isfinite(q), "B.2: needs 3 < q < inf");
    require(m >= 0.5 * q, "B.2: needs m >= q/2");
    require(u.components() == 3, "B.2: needs a divergence-free vector field");
    std::array<ScalarField3, 3> c{ScalarField3::zeros(u.grid()), ScalarField3::zeros(u.grid()),
                                  ScalarField3::zeros(u.grid())};
    for (int a = 0; a < 3; ++a) {
      const auto s = u.component(static_cast<std::size_t>(a));
      c[a] = ScalarField3(u.grid(), std::vector<double>(s.begin(), s.end()));
    }
    const VectorField3 v(std::move(c));
    require_div_free(v, id);
    const double d = 5.0 * q - 6.0;
    const double l2 = wnorm(v, psi, m - 0.5 * q, 2.0);
    const double grad = wnorm(jacobian(v), psi, m, q);
    return make(id, wnorm(v, psi, m, inf),
                {{"interp_L2_grad_Lq", std::pow(l2, 2.0 * (q - 3.0) / d) * std::pow(grad, 3.0 * q / d)},
                 {"gradpsi^1.5_u_L2", std::pow(gp, 1.5) * l2}},
                {{"q", q}, {"m", m}, {"r", psi.r_outer()}});
  }
  throw PreconditionError("unknown cutoff Gagliardo-Nirenberg id '" + id + "'");
}

InequalityReport check_bmo_embedding(const ScalarField3& u, double r, double q, const BmoConfig& cfg) {
  require(q >= 1.0 && std::isfinite(q), "B.3: needs 1 <= q < inf");
  const Ball b({0.0, 0.0, 0.0}, r);
  return make("B.3", lq_norm(u, b, q), {{"r^3/q_bmo_norm", std::pow(r, 3.0 / q) * bmo_norm(u, b, cfg)}},
              {{"q", q}, {"r", r}});
}

TestFamily TestFamily::default_family(double L) {
  using namespace analytic;
  TestFamily f;
  TrigPolynomial trig;
  trig.period = L;
  trig.terms = {{1.0, {1, 0, 0}, 0.0}, {0.5, {1, 2, 0}, 0.3}, {0.25, {0, 1, 3}, 1.1}};
  f.members.push_back({"trig", trig, true});
  f.members.push_back({"gauss", GaussianBump{1.0, 0.25, {0.0, 0.0, 0.0}}, true});
  for (double eps : {0.2, 0.05, 0.01}) {
    // support 1.5 keeps the 10% guard band on a box of side 4
    TruncatedLog tl{eps, {0.0, 0.0, 0.0}, 0.275 * L, 0.375 * L};
    f.members.push_back({"truncated-log-" + fmt(eps), tl, false});
  }
  f.members.push_back({"taylor-green", TaylorGreen{1.0, L}, true});
  f.members.push_back({"abc", Abc{1.0, 1.0, 1.0, L}, true});
  f.members.push_back({"random-solenoidal", RandomSolenoidal{7, -2.0, 3, 1.0, L}, true});
  return f;
}

namespace {

enum class Input { scalar, vector, any };

Input input_of(const std::string& id) {
  if (id == "7.12" || id == "8.2" || id == "8.2a" || id == "10.40a" || id == "B.3") return Input::scalar;
  if (id == "B.1") return Input::any;
  return Input::vector;
}

// one field on the lambda-scaled box with identical node values
struct Sample {
  std::optional<ScalarField3> s;
  std::optional<VectorField3> v;
};

Sample scaled_sample(const AnalyticFunction& f, const Grid3& base, double lambda) {
  const Grid3 g = base.scaled(1.0 / lambda);
  Sample out;
  if (is_vector(f)) {
    const VectorField3 v = leray_project(sample_vector(f, base));
    std::array<ScalarField3, 3> c{ScalarField3::zeros(g), ScalarField3::zeros(g), ScalarField3::zeros(g)};
    for (int a = 0; a < 3; ++a) {
      const auto vals = v[a].values();
      c[a] = ScalarField3(g, std::vector<double>(vals.begin(), vals.end()));
    }
    out.v = VectorField3(std::move(c));
  } else {
    const ScalarField3 u = sample_scalar(f, base);
    out.s = ScalarField3(g, std::vector<double>(u.values().begin(), u.values().end()));
  }
  return out;
}

// not homogeneous: measured at ||u||_{L2(B(r))} = 1
ScalarField3 normalized(const ScalarField3& u, double r) {
  const double n = lq_norm(u, Ball({0.0, 0.0, 0.0}, r), 2.0);
  if (n == 0.0) return u;
  std::vector<double> v(u.values().begin(), u.values().end());
  for (double& x : v) x /= n;
  return ScalarField3(u.grid(), std::move(v), u.time_tag());
}

InequalityReport dispatch(const std::string& id, const Sample& x, double lambda, const LabParams& p) {
  const double r = p.r / lambda;
  const CutoffFunction psi({0.0, 0.0, 0.0}, 0.5 * r, r);
  if (id == "7.12") return check_log_sobolev(normalized(*x.s, r), r, p.q, p.bmo);
  if (id == "8.2") return extension_gradient_report(*x.s, 0.5 * r, p.q);
  if (id == "8.2a") return extension_bmo_report(*x.s, 0.5 * r, p.bmo);
  if (id == "8.13a") return check_gradient_curl_lq(*x.v, psi, p.m, p.q);
  if (id == "8.13b") return check_u_psi_interpolation(*x.v, psi, p.m, p.k_interp, p.q);
  if (id == "8.14") return check_grad_bmo(*x.v, psi, r, p.bmo);
  if (id == "8.15zz") return check_curl_cutoff_bmo(*x.v, psi, r, p.bmo);
  if (id == "8.15e") return check_grad_bmo_combined(*x.v, psi, r, p.bmo);
  if (id == "8.16" || id == "8.17" || id == "8.17a" || id == "8.22")
    return check_second_gradient(*x.v, psi, p.m_second, p.k_second, p.q, id);
  if (id == "10.40a") {
    const ScalarField3 u = normalized(*x.s, r);
    return check_kozono_taniuchi_product(u, u, r, p.q, p.bmo);
  }
  if (id == "B.1") {
    return x.s ? check_gn_cutoff(FieldView(*x.s), psi, p.m_gn, 1.0, p.q, id)
               : check_gn_cutoff(FieldView(*x.v), psi, p.m_gn, 1.0, p.q, id);
  }
  if (id == "B.2") return check_gn_cutoff(FieldView(*x.v), psi, p.m_sup, 1.0, p.q, id);
  if (id == "B.3") return check_bmo_embedding(*x.s, r, p.q, p.bmo);
  throw ConfigError("unknown inequality id '" + id + "'");
}

double rel_change(double a, double b) {
  const double lo = std::min(a, b);
  if (lo <= 0.0) return a == b ? 0.0 : inf;
  return std::abs(a - b) / lo;
}

nlohmann::ordered_json num(double x) { return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr); }

}  // namespace

SweepResult run_family_sweep(const std::vector<std::string>& ids, const TestFamily& family,
                             const std::vector<Grid3>& grids, const std::vector<double>& scales,
                             const LabParams& params) {
  std::string known;
  for (const auto& [id, title] : inequality_catalog()) known += (known.empty() ? "" : ", ") + id;
  for (const auto& id : ids)
    if (!is_known_inequality(id)) throw ConfigError("unknown inequality id '" + id + "' (known: " + known + ")");
  for (double l : scales)
    if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("scales must be positive and finite");
  params.bmo.validate();

  SweepResult out;
  for (const auto& id : ids) {
    IdSummary sum;
    for (const auto& mem : family.members) {
      // ratio[grid][lambda], -1 where the case did not run
      std::vector<std::vector<double>> ratio(grids.size(), std::vector<double>(scales.size(), -1.0));
      for (std::size_t gi = 0; gi < grids.size(); ++gi) {
        const Grid3& g = grids[gi];
        for (std::size_t li = 0; li < scales.size(); ++li) {
          const double lambda = scales[li];
          SkippedCase skip{id, mem.name, g.nx(), lambda, ""};
          const Input need = input_of(id);
          if (need == Input::scalar && is_vector(mem.f)) {
            skip.reason = "needs a scalar field";
          } else if (need == Input::vector && !is_vector(mem.f)) {
            skip.reason = "needs a vector field";
          }
          if (!skip.reason.empty()) {
            out.skipped.push_back(std::move(skip));
            continue;
          }
          try {
            const Sample x = scaled_sample(mem.f, g, lambda);
            InequalityReport r = dispatch(id, x, lambda, params);
            r.member = mem.name;
            r.params["lambda"] = lambda;
            r.params["grid_n"] = static_cast<double>(g.nx());
            ratio[gi][li] = r.ratio;
            sum.max_ratio = std::max(sum.max_ratio, r.ratio);
            ++sum.reports;
            out.reports.push_back(std::move(r));
          } catch (const Error& e) {
            skip.reason = e.what();
            out.skipped.push_back(std::move(skip));
          }
        }
      }
      // drifts over the cases that ran
      for (std::size_t gi = 0; gi < grids.size(); ++gi) {
        double lo = inf, hi = -inf;
        for (double x : ratio[gi])
          if (x >= 0.0) lo = std::min(lo, x), hi = std::max(hi, x);
        if (hi >= lo) sum.scale_drift = std::max(sum.scale_drift, rel_change(lo, hi));
      }
      if (mem.smooth && grids.size() >= 2) {
        for (std::size_t li = 0; li < scales.size(); ++li) {
          const double a = ratio.front()[li], b = ratio.back()[li];
          if (a >= 0.0 && b >= 0.0) sum.refinement_drift = std::max(sum.refinement_drift, rel_change(a, b));
        }
      }
    }
    sum.below_cap = sum.max_ratio <= params.ratio_cap;
    if (!family.members.empty()) out.summary[id] = sum;
  }
  return out;
}

nlohmann::ordered_json to_json(const InequalityReport& r) {
  nlohmann::ordered_json terms = nlohmann::ordered_json::object();
  for (const auto& [name, v] : r.rhs_terms) terms[name] = num(v);
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [name, v] : r.params) params[name] = num(v);
  return {{"inequality_id", r.inequality_id}, {"member", r.member},  {"lhs", num(r.lhs)},
          {"rhs_terms", terms},               {"ratio", num(r.ratio)}, {"params", params}};
}

nlohmann::ordered_json to_json(const SweepResult& s) {
  nlohmann::ordered_json j;
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : s.reports) j["reports"].push_back(to_json(r));
  j["skipped"] = nlohmann::ordered_json::array();
  for (const auto& k : s.skipped)
    j["skipped"].push_back({{"inequality_id", k.inequality_id},
                            {"member", k.member},
                            {"grid_n", k.grid_n},
                            {"lambda", k.lambda},
                            {"reason", k.reason}});
  nlohmann::ordered_json sum = nlohmann::ordered_json::object();
  for (const auto& [id, x] : s.summary)
    sum[id] = {{"reports", x.reports},
               {"max_ratio", num(x.max_ratio)},
               {"refinement_drift", num(x.refinement_drift)},
               {"scale_drift", num(x.scale_drift)},
               {"below_cap", x.below_cap}};
  j["summary"] = sum;
  return j;
}

}  // namespace bkm
