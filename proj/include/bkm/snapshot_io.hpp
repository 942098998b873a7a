#pragma once

#include <filesystem>
#include <vector>

#include "bkm/grid.hpp"

namespace bkm {

/// On-disk snapshot: "BKM1", u32 n_x, u32 n_y, u32 n_z, f64 box_length,
/// f64 time_tag, u32 component_count (1 or 3), then component_count arrays
/// of n_x n_y n_z f64, x-fastest. All little-endian regardless of host.
struct Snapshot {
  Grid3 grid;
  double time = 0.0;
  std::vector<ScalarField3> components;

  VectorField3 vector() const;
};

void write_snapshot(const std::filesystem::path& path, const VectorField3& v);
void write_snapshot(const std::filesystem::path& path, const ScalarField3& u);
/// Throws ConfigError for unreadable or malformed files.
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace bkm
