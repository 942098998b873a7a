#include "bkm/gronwall.hpp"

#include <algorithm>
#include <cmath>

#include "bkm/analytic.hpp"
#include "bkm/errors.hpp"

namespace bkm {

namespace {

constexpr double kDelta = 1e-6;

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Nested integral with a given sample stride (stride 2 = step 2h).
double nested(const SampledFunction& f, int k, std::size_t stride) {
  const std::size_t n = f.intervals() / stride;
  const double h = f.step() * static_cast<double>(stride);
  std::vector<double> inner(n + 1, 1.0), next(n + 1);
  for (int level = 0; level < k; ++level) {
    next[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      const double g0 = f.values[(i - 1) * stride] * inner[i - 1];
      const double g1 = f.values[i * stride] * inner[i];
      next[i] = next[i - 1] + 0.5 * h * (g0 + g1);
    }
    inner.swap(next);
  }
  return inner[n];
}

double extrapolated(const SampledFunction& f, int k) {
  if (k < 1 || k > 8) throw ParameterError("iterated integral order must lie in [1, 8]");
  if (f.values.size() < 3 || f.intervals() % 2 != 0) {
    throw ParameterError("iterated integral needs an even number (>= 2) of intervals");
  }
  if (!(f.b > f.a)) throw DomainError("integration interval must have b > a");
  const double fine = nested(f, k, 1), coarse = nested(f, k, 2);
  return (4.0 * fine - coarse) / 3.0;
}

// Cumulative integral of samples g with step h, each interval integrated by
// the quadratic through three neighboring samples: third order globally.
std::vector<double> cumulative_quadratic(const std::vector<double>& g, double h) {
  std::vector<double> out(g.size(), 0.0);
  const std::size_t n = g.size();
  for (std::size_t i = 1; i < n; ++i) {
    double piece;
    if (n < 3) {
      piece = 0.5 * h * (g[i - 1] + g[i]);
    } else if (i + 1 < n) {
      piece = h / 12.0 * (5.0 * g[i - 1] + 8.0 * g[i] - g[i + 1]);
    } else {
      piece = h / 12.0 * (-g[i - 2] + 8.0 * g[i - 1] + 5.0 * g[i]);
    }
    out[i] = out[i - 1] + piece;
  }
  return out;
}

}  // namespace

SampledFunction sample_function(const std::function<double(double)>& f, double a, double b, std::size_t intervals) {
  if (intervals < 1) throw ParameterError("need at least one interval");
  if (!(b > a)) throw DomainError("sampling interval must have b > a");
  SampledFunction s{a, b, std::vector<double>(intervals + 1)};
  for (std::size_t i = 0; i <= intervals; ++i) s.values[i] = f(s.time(i));
  return s;
}

std::vector<double> cumulative_trapezoid(const SampledFunction& f) {
  std::vector<double> out(f.values.size(), 0.0);
  const double h = f.step();
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (f.values[i - 1] + f.values[i]);
  return out;
}

double iterated_integral(const SampledFunction& f, int k) { return extrapolated(f, k); }

double iterated_integral_closed_form(const SampledFunction& f, int k) {
  const double I = extrapolated(f, 1);
  return std::pow(I, k) / factorial(k);
}

void IterationProblem::validate() const {
  if (a.values.size() < 2) throw ConfigError("iteration problem needs sampled density");
  if (!(C > 0.0) || !std::isfinite(C)) throw ConfigError("iteration problem needs C > 0");
  if (K.values.size() != a.values.size() || K.a != a.a || K.b != a.b) {
    throw ConfigError("K must share the density's sampling");
  }
  for (double v : a.values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("density a must be finite and >= 0");
  for (double v : K.values)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("K must be finite and > 0");
}

IterationProblem make_problem(const std::function<double(double)>& a, double C,
                              const std::function<double(double)>& K, double t0, double t1, std::size_t intervals) {
  IterationProblem p{sample_function(a, t0, t1, intervals), C, sample_function(K, t0, t1, intervals)};
  p.validate();
  return p;
}

double integral_of_density(const IterationProblem& p, double t) {
  if (t < p.t0() || t > p.t1() || std::isnan(t)) throw DomainError("time outside the problem interval");
  const SampledFunction& a = p.a;
  const double h = a.step();
  const auto A = cumulative_quadratic(a.values, h);
  const std::size_t i = std::min(static_cast<std::size_t>(std::floor((t - a.a) / h)), a.intervals());
  if (i == a.intervals()) return A[i];
  // partial interval: integral of the linear interpolant
  const double w = t - a.time(i);
  const double slope = (a.values[i + 1] - a.values[i]) / h;
  return A[i] + w * a.values[i] + 0.5 * slope * w * w;
}

double iteration_bound(const IterationProblem& p, double t) {
  const double A = integral_of_density(p, t);
  return p.C * A * std::exp(A);
}

RecursionVerdict simulate_recursion(const IterationProblem& p, int m_max, RecursionMode mode, std::uint64_t seed,
                                    double tolerance) {
  p.validate();
  if (m_max < 1 || m_max > 30) throw ParameterError("m_max must lie in [1, 30]");
  const std::size_t ns = p.a.values.size();
  const double h = p.a.step();
  SplitMix64 rng(seed);
  RecursionVerdict v;
  auto& beta = v.beta.values;
  beta.assign(static_cast<std::size_t>(m_max) + 1, std::vector<double>(ns));
  for (std::size_t i = 0; i < ns; ++i) {
    beta[m_max][i] = std::min(p.C * m_max, std::pow(p.K.values[i], m_max) * (1.0 - kDelta));
  }
  std::vector<double> integrand(ns);
  for (int m = m_max - 1; m >= 0; --m) {
    for (std::size_t i = 0; i < ns; ++i) integrand[i] = p.a.values[i] * beta[m + 1][i];
    const auto acc = cumulative_quadratic(integrand, h);
    for (std::size_t i = 0; i < ns; ++i) {
      double b = p.C * m + acc[i];
      if (mode == RecursionMode::random_slack) b -= rng.uniform() * 0.5 * std::abs(b);
      beta[m][i] = b;
    }
  }
  for (int m = 1; m <= m_max; ++m)
    for (std::size_t i = 0; i < ns; ++i) {
      if (!(std::abs(beta[m][i]) < std::pow(p.K.values[i], m))) {
        throw ConstructionError("constructed beta_" + std::to_string(m) + " violates |beta_m| < K^m at t = " +
                                std::to_string(p.a.time(i)));
      }
    }
  v.worst_margin = INFINITY;
  const auto A = cumulative_quadratic(p.a.values, h);
  for (std::size_t i = 0; i < ns; ++i) {
    const double margin = p.C * A[i] * std::exp(A[i]) - beta[0][i];
    v.worst_margin = std::min(v.worst_margin, margin);
    if (margin < -tolerance) ++v.violations;
  }
  return v;
}

PartialSum partial_sum_bound(const IterationProblem& p, double t, int m) {
  if (m < 1) throw ParameterError("partial sum needs m >= 1");
  const double A = integral_of_density(p, t);
  PartialSum s;
  double term = p.C * A;  // k = 1: C A^1 / 0!
  for (int k = 1; k <= m; ++k) {
    s.partial += term;
    term *= A / k;
  }
  const double Kmax = *std::max_element(p.K.values.begin(), p.K.values.end());
  s.remainder_cap = std::pow(Kmax * A, m + 1) / factorial(m + 1);
  return s;
}

}  // namespace bkm
