#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bkm/ball_norms.hpp"
#include "bkm/euler.hpp"
#include "bkm/grid.hpp"
#include "json.hpp"

namespace bkm {

/// Which norm of omega = curl v a series samples.
struct NormSpec {
  enum class Kind { bmo, sup, lq };
  Kind kind = Kind::sup;
  double q = 0.0;  // lq only

  /// "bmo", "sup" or "lq:<q>".
  static NormSpec parse(const std::string& s);
  std::string name() const;
};

struct NormSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::string norm_id;

  /// Throws NumericError unless times strictly increase and values are finite and >= 0.
  void validate() const;
};

std::string ball_label(const Ball& b);

/// Norm of curl v over the ball at every snapshot.
NormSeries norm_series(const SnapshotSeries& series, const Ball& ball, const NormSpec& spec, const BmoConfig& cfg);
/// Same over the whole periodic box (bmo: periodic_bmo_scan).
NormSeries global_norm_series(const SnapshotSeries& series, const NormSpec& spec, const BmoConfig& cfg);

/// Composite trapezoid over the samples.
double bkm_integral(const NormSeries& s);

struct Provenance {
  std::string tool = "bkm";
  std::string version;
  std::string config_hash;
  std::vector<std::string> inputs;
};

struct DiagnosticsRow {
  std::optional<Ball> ball;  // empty for the whole-box row
  std::optional<double> bmo_integral;
  std::optional<double> sup_integral;
  /// int ||v||_{L^inf}^{4/3} dt; reported, no inequality attached
  std::optional<double> velocity_sup_43_integral;
  std::map<double, double> omega_lq_max;
  std::optional<double> energy_sup;  // sup over time of 1/2 int_B |v|^2
  std::vector<std::string> notes;
  std::vector<NormSeries> series;  // bmo, sup, then lq:q
};

struct DiagnosticsReport {
  Provenance provenance;
  DiagnosticsRow global;
  std::vector<DiagnosticsRow> balls;
};

/// Per-ball failures become rows with empty entries and a note.
DiagnosticsReport build_report(const SnapshotSeries& series, const std::vector<Ball>& balls,
                               const std::vector<double>& q_list, const BmoConfig& cfg, Provenance provenance = {});

nlohmann::ordered_json to_json(const DiagnosticsReport& r);

/// Time frame of the rescaling V(y,t) = v((1 + sqrt(-t)) y, t). Snapshot time
/// time_origin plays the role of t = 0.
struct RescaledFrame {
  double t_star = 0.0;
  double t0 = 0.0;
  double rho = 0.0;
  double rho0 = 0.0;
  double C0 = 0.0;
  double time_origin = 0.0;

  /// 1/2 rho^2 (-t_star)^(-1/2) - 4 C0, positive when the frame is admissible.
  double tstar_margin() const;
  /// (1/4) tstar_margin(): lower bound for the numerator of W.y on the annulus.
  double chain_bound() const;
  void validate() const;
};

struct RescaledFields {
  VectorField3 V;  // on nodes of the closed ball B(rho0), zero elsewhere
  VectorField3 W;
};

/// V by trilinear interpolation of the snapshot nearest to t (within
/// time_tolerance), W = (1/2 (-t)^(-1/2) y + V) / (1 + (-t)^(1/2)).
RescaledFields rescale_frame(const SnapshotSeries& series, const RescaledFrame& frame, double t,
                             double time_tolerance = 1e-12);

/// Frame with C0 measured as max over snapshots in [t0, 0) of ||V.y||_inf on
/// B(rho0) and t_star placed halfway between t0 and the most negative
/// admissible value. PreconditionError when no admissible t_star exists.
RescaledFrame make_frame(const SnapshotSeries& series, double rho, double t0, double time_origin = 0.0);

/// min of W(y).y over nodes with inner <= |y| <= outer.
double annulus_positivity(const VectorField3& W, double inner, double outer);

}  // namespace bkm
