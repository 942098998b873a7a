#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "bkm/grid.hpp"

namespace bkm {

/// Radial C-infinity transition built from f(s) = exp(-1/s) on the normalized
/// variable s = (rho - inner) / (outer - inner): f(1-s) / (f(1-s) + f(s)),
/// 1 for rho <= inner, 0 for rho >= outer.
double smooth_step(double rho, double inner, double outer);
/// d/drho of smooth_step.
double smooth_step_derivative(double rho, double inner, double outer);

namespace analytic {

// Scalar families.

struct Constant {
  double value = 1.0;
};

struct TrigTerm {
  double amplitude = 1.0;
  std::array<int, 3> modes{1, 0, 0};
  double phase = 0.0;
};

/// sum_j a_j sin(2 pi / period * (m_j . x) + phase_j)
struct TrigPolynomial {
  std::vector<TrigTerm> terms;
  double period = 6.283185307179586;
};

/// log(1 / (|x - c| + eps)) times a smooth radial cutoff (inner, outer).
struct TruncatedLog {
  double eps = 0.05;
  Vec3 center{0.0, 0.0, 0.0};
  double cutoff_inner = 1.2;
  double cutoff_outer = 1.6;
};

struct GaussianBump {
  double amplitude = 1.0;
  double sigma = 0.25;
  Vec3 center{0.0, 0.0, 0.0};
};

/// sign(x_axis - offset); zero exactly on the plane.
struct Step {
  int axis = 0;
  double offset = 0.0;
};

/// g . x + b (not periodic; only for derivative-free norms).
struct Linear {
  Vec3 gradient{1.0, 0.0, 0.0};
  double offset = 0.0;
};

/// |x - c|^p (not periodic; only for derivative-free uses).
struct RadialPower {
  double exponent = 2.0;
  Vec3 center{0.0, 0.0, 0.0};
};

// Vector families.

/// (a sin kx cos ky cos kz, -a cos kx sin ky cos kz, 0), k = 2 pi / period.
struct TaylorGreen {
  double amplitude = 1.0;
  double period = 6.283185307179586;
};

/// Arnold-Beltrami-Childress field; curl v = (2 pi / period) v.
struct Abc {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double period = 6.283185307179586;
};

struct ConstantVector {
  Vec3 value{1.0, 0.0, 0.0};
};

/// Random solenoidal trigonometric field: modes with 1 <= |m| <= max_mode,
/// amplitudes |m|^slope with Gaussian random complex coefficients projected
/// orthogonally to m, rescaled so the root-mean-square speed equals rms.
struct RandomSolenoidal {
  std::uint64_t seed = 7;
  double spectrum_slope = -2.0;
  int max_mode = 3;
  double rms = 1.0;
  double period = 6.283185307179586;
};

}  // namespace analytic

using AnalyticFunction =
    std::variant<analytic::Constant, analytic::TrigPolynomial, analytic::TruncatedLog, analytic::GaussianBump,
                 analytic::Step, analytic::Linear, analytic::RadialPower, analytic::TaylorGreen, analytic::Abc,
                 analytic::ConstantVector, analytic::RandomSolenoidal>;

bool is_vector(const AnalyticFunction& f);
std::string family_name(const AnalyticFunction& f);

double evaluate_scalar(const AnalyticFunction& f, const Vec3& x);
Vec3 evaluate_vector(const AnalyticFunction& f, const Vec3& x);

/// Samples f(scale * x) at every node. Compactly supported families must
/// keep a guard band of 10% of the box length (DomainError otherwise).
std::variant<ScalarField3, VectorField3> sample(const AnalyticFunction& f, const Grid3& grid, double t = 0.0,
                                                double scale = 1.0);
ScalarField3 sample_scalar(const AnalyticFunction& f, const Grid3& grid, double t = 0.0, double scale = 1.0);
VectorField3 sample_vector(const AnalyticFunction& f, const Grid3& grid, double t = 0.0, double scale = 1.0);

/// Deterministic 64-bit generator (splitmix64) with portable uniform/normal
/// draws; std distributions are implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();  // [0, 1)
  double normal();

 private:
  std::uint64_t state_;
};

}  // namespace bkm
