#include "bkm/analytic.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "bkm/errors.hpp"

namespace bkm {

namespace {

double transition(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
double transition_derivative(double s) { return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct SolenoidalMode {
  std::array<int, 3> m;
  std::array<std::complex<double>, 3> amp;
};

std::vector<SolenoidalMode> solenoidal_modes(const analytic::RandomSolenoidal& d) {
  if (d.max_mode < 1 || d.max_mode > 16) throw ConfigError("random-solenoidal max_mode must lie in [1, 16]");
  SplitMix64 rng(d.seed);
  std::vector<SolenoidalMode> modes;
  const int K = d.max_mode;
  double energy = 0.0;
  for (int mz = -K; mz <= K; ++mz) {
    for (int my = -K; my <= K; ++my) {
      for (int mx = -K; mx <= K; ++mx) {
        const int m2 = mx * mx + my * my + mz * mz;
        if (m2 == 0 || m2 > K * K) continue;
        // one representative of each +-m pair
        const bool positive = mz > 0 || (mz == 0 && (my > 0 || (my == 0 && mx > 0)));
        if (!positive) continue;
        SolenoidalMode mode{{mx, my, mz}, {}};
        for (auto& a : mode.amp) a = {rng.normal(), rng.normal()};
        std::complex<double> md{0.0, 0.0};
        for (int c = 0; c < 3; ++c) md += static_cast<double>(mode.m[c]) * mode.amp[c];
        const double scale = std::pow(std::sqrt(static_cast<double>(m2)), d.spectrum_slope);
        for (int c = 0; c < 3; ++c) {
          mode.amp[c] = scale * (mode.amp[c] - static_cast<double>(mode.m[c]) * md / static_cast<double>(m2));
          energy += 0.5 * std::norm(mode.amp[c]);
        }
        modes.push_back(mode);
      }
    }
  }
  const double s = energy > 0.0 ? d.rms / std::sqrt(energy) : 0.0;
  for (auto& mode : modes)
    for (auto& a : mode.amp) a *= s;
  return modes;
}

Vec3 eval_modes(const std::vector<SolenoidalMode>& modes, double kappa, const Vec3& x) {
  Vec3 v{0.0, 0.0, 0.0};
  for (const auto& mode : modes) {
    const double theta = kappa * (mode.m[0] * x[0] + mode.m[1] * x[1] + mode.m[2] * x[2]);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int a = 0; a < 3; ++a) v[a] += mode.amp[a].real() * c - mode.amp[a].imag() * s;
  }
  return v;
}

double eval_scalar_impl(const AnalyticFunction& f, const Vec3& x) {
  using namespace analytic;
  return std::visit(
      Overloaded{
          [&](const Constant& d) { return d.value; },
          [&](const TrigPolynomial& d) {
            const double kappa = 2.0 * std::numbers::pi / d.period;
            double s = 0.0;
            for (const auto& t : d.terms) {
              s += t.amplitude * std::sin(kappa * (t.modes[0] * x[0] + t.modes[1] * x[1] + t.modes[2] * x[2]) +
                                          t.phase);
            }
            return s;
          },
          [&](const TruncatedLog& d) {
            const double r = norm(x - d.center);
            const double chi = smooth_step(r, d.cutoff_inner, d.cutoff_outer);
            return chi == 0.0 ? 0.0 : chi * std::log(1.0 / (r + d.eps));
          },
          [&](const GaussianBump& d) {
            const Vec3 y = x - d.center;
            return d.amplitude * std::exp(-dot(y, y) / (2.0 * d.sigma * d.sigma));
          },
          [&](const Step& d) {
            const double s = x[d.axis] - d.offset;
            return s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
          },
          [&](const Linear& d) { return dot(d.gradient, x) + d.offset; },
          [&](const RadialPower& d) { return std::pow(norm(x - d.center), d.exponent); },
          [&](const auto&) -> double { throw ConfigError("vector family sampled as scalar"); },
      },
      f);
}

Vec3 eval_vector_impl(const AnalyticFunction& f, const Vec3& x, const std::vector<SolenoidalMode>* modes) {
  using namespace analytic;
  return std::visit(
      Overloaded{
          [&](const TaylorGreen& d) -> Vec3 {
            const double k = 2.0 * std::numbers::pi / d.period;
            const double sx = std::sin(k * x[0]), cx = std::cos(k * x[0]);
            const double sy = std::sin(k * x[1]), cy = std::cos(k * x[1]);
            const double cz = std::cos(k * x[2]);
            return {d.amplitude * sx * cy * cz, -d.amplitude * cx * sy * cz, 0.0};
          },
          [&](const Abc& d) -> Vec3 {
            const double k = 2.0 * std::numbers::pi / d.period;
            return {d.a * std::sin(k * x[2]) + d.c * std::cos(k * x[1]),
                    d.b * std::sin(k * x[0]) + d.a * std::cos(k * x[2]),
                    d.c * std::sin(k * x[1]) + d.b * std::cos(k * x[0])};
          },
          [&](const ConstantVector& d) -> Vec3 { return d.value; },
          [&](const RandomSolenoidal& d) -> Vec3 {
            const double kappa = 2.0 * std::numbers::pi / d.period;
            if (modes) return eval_modes(*modes, kappa, x);
            return eval_modes(solenoidal_modes(d), kappa, x);
          },
          [&](const auto&) -> Vec3 { throw ConfigError("scalar family sampled as vector"); },
      },
      f);
}

/// Support ball of compactly supported (or rapidly decaying) families.
bool support_of(const AnalyticFunction& f, Ball& out) {
  if (const auto* d = std::get_if<analytic::TruncatedLog>(&f)) {
    out = Ball(d->center, d->cutoff_outer);
    return true;
  }
  if (const auto* d = std::get_if<analytic::GaussianBump>(&f)) {
    out = Ball(d->center, 6.0 * d->sigma);
    return true;
  }
  return false;
}

}  // namespace

// The transition runs in the normalized variable s = (rho - inner) / (outer - inner),
// so the profile is the same shape at every width and |d psi| * width is a
// width-independent constant.
double smooth_step(double rho, double inner, double outer) {
  if (rho <= inner) return 1.0;
  if (rho >= outer) return 0.0;
  const double s = (rho - inner) / (outer - inner);
  const double g = transition(1.0 - s);
  const double k = transition(s);
  return g / (g + k);
}

double smooth_step_derivative(double rho, double inner, double outer) {
  if (rho <= inner || rho >= outer) return 0.0;
  const double w = outer - inner;
  const double s = (rho - inner) / w;
  const double g = transition(1.0 - s);
  const double k = transition(s);
  const double dg = -transition_derivative(1.0 - s);
  const double dk = transition_derivative(s);
  const double sum = g + k;
  return (dg * k - g * dk) / (sum * sum) / w;
}

bool is_vector(const AnalyticFunction& f) {
  return std::holds_alternative<analytic::TaylorGreen>(f) || std::holds_alternative<analytic::Abc>(f) ||
         std::holds_alternative<analytic::ConstantVector>(f) || std::holds_alternative<analytic::RandomSolenoidal>(f);
}

std::string family_name(const AnalyticFunction& f) {
  using namespace analytic;
  return std::visit(Overloaded{
                        [](const Constant&) { return std::string("constant"); },
                        [](const TrigPolynomial&) { return std::string("trig"); },
                        [](const TruncatedLog&) { return std::string("truncated-log"); },
                        [](const GaussianBump&) { return std::string("gaussian"); },
                        [](const Step&) { return std::string("step"); },
                        [](const Linear&) { return std::string("linear"); },
                        [](const RadialPower&) { return std::string("radial-power"); },
                        [](const TaylorGreen&) { return std::string("taylor-green"); },
                        [](const Abc&) { return std::string("abc"); },
                        [](const ConstantVector&) { return std::string("constant-vector"); },
                        [](const RandomSolenoidal&) { return std::string("random-solenoidal"); },
                    },
                    f);
}

double evaluate_scalar(const AnalyticFunction& f, const Vec3& x) { return eval_scalar_impl(f, x); }

Vec3 evaluate_vector(const AnalyticFunction& f, const Vec3& x) { return eval_vector_impl(f, x, nullptr); }

std::variant<ScalarField3, VectorField3> sample(const AnalyticFunction& f, const Grid3& grid, double t, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("sampling scale must be positive");
  Ball support;
  if (support_of(f, support)) {
    const Ball scaled((1.0 / scale) * support.center, support.radius / scale);
    if (!scaled.fits_in(grid, 0.1 * grid.box_length())) {
      throw DomainError(family_name(f) + " support does not keep a 10% guard band inside the box");
    }
  }
  const std::size_t n = grid.size();
  if (!is_vector(f)) {
    std::vector<double> values(n);
    for (std::size_t k = 0; k < grid.nz(); ++k)
      for (std::size_t j = 0; j < grid.ny(); ++j)
        for (std::size_t i = 0; i < grid.nx(); ++i)
          values[grid.index(i, j, k)] = eval_scalar_impl(f, scale * grid.node(i, j, k));
    ScalarField3 out(grid, std::move(values), t);
    if (!out.all_finite()) throw NumericError(family_name(f) + " produced non-finite samples");
    return out;
  }
  std::vector<SolenoidalMode> modes;
  const std::vector<SolenoidalMode>* mp = nullptr;
  if (const auto* d = std::get_if<analytic::RandomSolenoidal>(&f)) {
    modes = solenoidal_modes(*d);
    mp = &modes;
  }
  std::array<std::vector<double>, 3> c{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t k = 0; k < grid.nz(); ++k)
    for (std::size_t j = 0; j < grid.ny(); ++j)
      for (std::size_t i = 0; i < grid.nx(); ++i) {
        const auto idx = grid.index(i, j, k);
        const Vec3 v = eval_vector_impl(f, scale * grid.node(i, j, k), mp);
        for (int a = 0; a < 3; ++a) c[a][idx] = v[a];
      }
  VectorField3 out(ScalarField3(grid, std::move(c[0]), t), ScalarField3(grid, std::move(c[1]), t),
                   ScalarField3(grid, std::move(c[2]), t));
  if (!out.all_finite()) throw NumericError(family_name(f) + " produced non-finite samples");
  return out;
}

ScalarField3 sample_scalar(const AnalyticFunction& f, const Grid3& grid, double t, double scale) {
  if (is_vector(f)) throw ConfigError(family_name(f) + " is a vector family");
  return std::get<ScalarField3>(sample(f, grid, t, scale));
}

VectorField3 sample_vector(const AnalyticFunction& f, const Grid3& grid, double t, double scale) {
  if (!is_vector(f)) throw ConfigError(family_name(f) + " is a scalar family");
  return std::get<VectorField3>(sample(f, grid, t, scale));
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::normal() {
  // Box-Muller, one draw per call
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace bkm
