#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bkm/analytic.hpp"
#include "bkm/grid.hpp"

namespace bkm {

struct SimConfig {
  Grid3 grid{32, 6.283185307179586};
  double dt = 0.0;   // fixed step when > 0
  double cfl = 0.0;  // adaptive step when > 0 (exactly one of dt, cfl)
  double t_end = 0.5;
  bool dealias = true;
  std::optional<AnalyticFunction> initial;  // empty: fluid at rest
  int snapshot_every = 1;
  long max_steps = 10'000'000;

  void validate() const;
};

struct EnergyRecord {
  long step = 0;
  double time = 0.0;
  double energy = 0.0;
  double max_div = 0.0;
};

struct SnapshotSeries {
  std::vector<VectorField3> velocity;  // time tags strictly increasing
  std::vector<EnergyRecord> energy_log;
  bool stopped_early = false;
  double last_valid_time = 0.0;
  std::string stop_reason;

  std::size_t size() const { return velocity.size(); }
  double time(std::size_t i) const { return velocity[i].time_tag(); }
};

/// 1/2 sum |v|^2 h^3.
double energy(const VectorField3& v);
double max_divergence(const VectorField3& v);

/// Initial velocity for a config: sampled, Leray-projected (zero when empty).
VectorField3 initial_velocity(const SimConfig& cfg);

/// One RK4 step of dv/dt = P(v x omega) (dealiased per cfg), re-projected.
/// Throws BlowUpSuspected when the result has non-finite values.
VectorField3 step(const VectorField3& v, double dt, const SimConfig& cfg);

/// Step size for the next step: fixed dt or cfl / sum_a(max|v_a| / h_a).
double next_dt(const VectorField3& v, const SimConfig& cfg);

/// Runs to t_end. A blow-up stops the run gracefully: the partial series is
/// returned with stopped_early set. on_snapshot sees every stored snapshot.
SnapshotSeries run(const SimConfig& cfg, const std::function<void(const VectorField3&, std::size_t)>& on_snapshot = {});

/// max |d_t omega + v . grad omega - omega . grad v| at snapshot index, with
/// d_t by the three-point centered difference on the (possibly nonuniform)
/// snapshot times.
double vorticity_residual(const SnapshotSeries& series, std::size_t index);

}  // namespace bkm
