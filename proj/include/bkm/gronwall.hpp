#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace bkm {

/// Uniform samples of a function on [a, b], endpoints included.
struct SampledFunction {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> values;

  std::size_t intervals() const { return values.size() - 1; }
  double step() const { return (b - a) / static_cast<double>(intervals()); }
  double time(std::size_t i) const { return a + static_cast<double>(i) * step(); }
};

SampledFunction sample_function(const std::function<double(double)>& f, double a, double b, std::size_t intervals);

/// Cumulative trapezoid integral from a to every sample.
std::vector<double> cumulative_trapezoid(const SampledFunction& f);

/// k-fold nested integral int_a^b f(t1) int_a^t1 f(t2) ... dt_k ... dt1 by
/// recursive cumulative trapezoid, Richardson-extrapolated from steps h and
/// 2h (needs an even number of intervals). k <= 8.
double iterated_integral(const SampledFunction& f, int k);
/// (1/k!) (int f)^k with the integral by the same extrapolated quadrature.
double iterated_integral_closed_form(const SampledFunction& f, int k);

/// beta_m(t) <= C m + int_t0^t a beta_{m+1}, |beta_m| < K^m.
struct IterationProblem {
  SampledFunction a;  // density on [t0, t1]; t0 = a.a, t1 = a.b
  double C = 1.0;
  SampledFunction K;  // same sampling as a

  double t0() const { return a.a; }
  double t1() const { return a.b; }
  void validate() const;
};

IterationProblem make_problem(const std::function<double(double)>& a, double C,
                              const std::function<double(double)>& K, double t0, double t1,
                              std::size_t intervals = 10000);

/// A(t) = int_t0^t a: third-order cumulative rule at samples, linear
/// interpolant inside the last partial interval.
double integral_of_density(const IterationProblem& p, double t);
/// C A(t) exp(A(t)).
double iteration_bound(const IterationProblem& p, double t);

enum class RecursionMode { equality, random_slack };

struct BetaSequence {
  std::vector<std::vector<double>> values;  // [m][sample]
};

struct RecursionVerdict {
  BetaSequence beta;
  double worst_margin = 0.0;  // min over samples of bound - beta_0 (>= -tol means pass)
  std::size_t violations = 0;
};

/// Integrals use a third-order cumulative rule (local quadratic per interval).
/// Builds beta_m backward from beta_{m_max} = min(C m_max, K^m_max (1 - delta))
/// with equality in the recursion (or minus nonnegative random slack), checks
/// |beta_m| < K^m for m >= 1 (ConstructionError otherwise) and compares
/// beta_0 with iteration_bound at every sample.
RecursionVerdict simulate_recursion(const IterationProblem& p, int m_max, RecursionMode mode,
                                    std::uint64_t seed = 0, double tolerance = 1e-6);

struct PartialSum {
  double partial = 0.0;        // sum_{k=1}^m C A^k / (k-1)!
  double remainder_cap = 0.0;  // (sup K * A)^{m+1} / (m+1)!
};

PartialSum partial_sum_bound(const IterationProblem& p, double t, int m);

}  // namespace bkm
