#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "mhd/compressible.hpp"
#include "mhd/errors.hpp"
#include "mhd/incompressible.hpp"

// Binary state file, little-endian throughout:
//   char[4]  "MHD0"
//   u32      version (1)
//   u32      kind: 0 = incompressible (u, B), 1 = compressible (rho, m, H)
//   u32      n
//   u32      ncomp: 6 or 7
//   f64      t
//   f64      aux: accumulated dissipation for kind 0, 0 otherwise
//   ncomp blocks of n*n*(n/2+1) complex values as (re, im) f64 pairs in
//   half-spectrum order (h fastest, then k2, then k3)
// Storing coefficients keeps write -> read -> write byte-identical and makes
// restarts exact.

namespace mhd {

static_assert(std::endian::native == std::endian::little, "snapshot IO assumes little-endian");

enum class SnapshotKind : std::uint32_t { Incompressible = 0, Compressible = 1 };

struct Snapshot {
  SnapshotKind kind = SnapshotKind::Incompressible;
  double t = 0.0;
  double aux = 0.0;
  int n = 0;
  std::vector<std::vector<cplx>> comps;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

namespace detail {

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("truncated snapshot: " + path);
  return v;
}

} // namespace detail

inline void write_snapshot(const std::string& path, const Snapshot& s) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write("MHD0", 4);
  detail::put(out, kSnapshotVersion);
  detail::put(out, static_cast<std::uint32_t>(s.kind));
  detail::put(out, static_cast<std::uint32_t>(s.n));
  detail::put(out, static_cast<std::uint32_t>(s.comps.size()));
  detail::put(out, s.t);
  detail::put(out, s.aux);
  for (const auto& c : s.comps)
    out.write(reinterpret_cast<const char*>(c.data()),
              static_cast<std::streamsize>(c.size() * sizeof(cplx)));
  if (!out) throw IoError("write failed: " + path);
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "MHD0", 4) != 0) throw IoError("not a snapshot file: " + path);
  if (detail::get<std::uint32_t>(in, path) != kSnapshotVersion)
    throw IoError("unsupported snapshot version: " + path);
  Snapshot s;
  const auto kind = detail::get<std::uint32_t>(in, path);
  if (kind > 1) throw IoError("unknown snapshot kind: " + path);
  s.kind = static_cast<SnapshotKind>(kind);
  const auto n = detail::get<std::uint32_t>(in, path);
  const auto ncomp = detail::get<std::uint32_t>(in, path);
  if (n < 4 || n % 2 != 0 || n > 4096) throw IoError("bad grid size in snapshot: " + path);
  if (ncomp != (s.kind == SnapshotKind::Incompressible ? 6u : 7u))
    throw IoError("bad component count in snapshot: " + path);
  s.n = static_cast<int>(n);
  s.t = detail::get<double>(in, path);
  s.aux = detail::get<double>(in, path);
  const std::size_t size = make_grid(s.n).spectral_size();
  s.comps.assign(ncomp, std::vector<cplx>(size));
  for (auto& c : s.comps) {
    in.read(reinterpret_cast<char*>(c.data()), static_cast<std::streamsize>(size * sizeof(cplx)));
    if (!in) throw IoError("truncated snapshot: " + path);
  }
  if (in.peek() != std::ifstream::traits_type::eof()) throw IoError("trailing bytes in snapshot: " + path);
  return s;
}

inline Snapshot to_snapshot(const SimState& s, double cum_dissipation = 0.0) {
  Snapshot out;
  out.kind = SnapshotKind::Incompressible;
  out.t = s.t;
  out.aux = cum_dissipation;
  out.n = s.grid().n;
  for (const auto& c : s.u.c) out.comps.push_back(c);
  for (const auto& c : s.B.c) out.comps.push_back(c);
  return out;
}

inline Snapshot to_snapshot(const ConservedState& s) {
  Snapshot out;
  out.kind = SnapshotKind::Compressible;
  out.t = s.t;
  out.n = s.rho.grid.n;
  out.comps.push_back(s.rho.v);
  for (const auto& c : s.m.c) out.comps.push_back(c);
  for (const auto& c : s.H.c) out.comps.push_back(c);
  return out;
}

inline SimState sim_state_from(const Snapshot& s) {
  if (s.kind != SnapshotKind::Incompressible) throw IoError("snapshot is not incompressible");
  const Grid g = make_grid(s.n);
  SimState out = zero_state(g, s.t);
  for (int j = 0; j < 3; ++j) {
    out.u.c[j] = s.comps[j];
    out.B.c[j] = s.comps[3 + j];
  }
  return out;
}

inline ConservedState conserved_from(const Snapshot& s) {
  if (s.kind != SnapshotKind::Compressible) throw IoError("snapshot is not compressible");
  const Grid g = make_grid(s.n);
  ConservedState out;
  out.t = s.t;
  out.rho = SpectralField(g);
  out.rho.v = s.comps[0];
  out.m = SpectralVectorField(g);
  out.H = SpectralVectorField(g);
  for (int j = 0; j < 3; ++j) {
    out.m.c[j] = s.comps[1 + j];
    out.H.c[j] = s.comps[4 + j];
  }
  out.H.solenoidal = true;
  return out;
}

} // namespace mhd
