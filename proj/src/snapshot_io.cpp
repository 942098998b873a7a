#include "bkm/snapshot_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "bkm/errors.hpp"

namespace bkm {

namespace {

constexpr char kMagic[4] = {'B', 'K', 'M', '1'};

template <class T>
void put_le(std::ostream& os, T value) {
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(value);
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  char buf[sizeof(T)];
  for (std::size_t b = 0; b < sizeof(T); ++b) buf[b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
  os.write(buf, sizeof(T));
}

template <class T>
T get_le(std::istream& is, const std::filesystem::path& path) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw ConfigError("truncated snapshot file " + path.string());
  }
  std::uint64_t bits = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
  if constexpr (std::is_same_v<T, double>) {
    return std::bit_cast<double>(bits);
  } else {
    return static_cast<T>(bits);
  }
}

void write_components(const std::filesystem::path& path, const Grid3& g, double t,
                      std::span<const ScalarField3> comps) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.nx()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.ny()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.nz()));
  put_le<double>(os, g.box_length());
  put_le<double>(os, t);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(comps.size()));
  for (const auto& c : comps)
    for (double v : c.values()) put_le<double>(os, v);
  if (!os) throw ConfigError("write failed for " + path.string());
}

}  // namespace

VectorField3 Snapshot::vector() const {
  if (components.size() != 3) throw ConfigError("snapshot does not hold a vector field");
  return VectorField3(components[0], components[1], components[2]);
}

void write_snapshot(const std::filesystem::path& path, const VectorField3& v) {
  write_components(path, v.grid(), v.time_tag(), v.components());
}

void write_snapshot(const std::filesystem::path& path, const ScalarField3& u) {
  write_components(path, u.grid(), u.time_tag(), std::span<const ScalarField3>(&u, 1));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open snapshot " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError(path.string() + " is not a BKM1 snapshot");
  }
  const auto nx = get_le<std::uint32_t>(is, path);
  const auto ny = get_le<std::uint32_t>(is, path);
  const auto nz = get_le<std::uint32_t>(is, path);
  const double L = get_le<double>(is, path);
  const double t = get_le<double>(is, path);
  const auto comps = get_le<std::uint32_t>(is, path);
  if (comps != 1 && comps != 3) throw ConfigError(path.string() + ": component count must be 1 or 3");
  if (nx > 4096 || ny > 4096 || nz > 4096) throw ConfigError(path.string() + ": implausible grid size");
  Grid3 grid(nx, ny, nz, L);
  Snapshot s{grid, t, {}};
  for (std::uint32_t c = 0; c < comps; ++c) {
    std::vector<double> vals(grid.size());
    for (auto& v : vals) v = get_le<double>(is, path);
    s.components.emplace_back(grid, std::move(vals), t);
  }
  if (is.peek() != std::char_traits<char>::eof()) throw ConfigError(path.string() + ": trailing bytes");
  return s;
}

}  // namespace bkm
