#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mhd/diagnostics.hpp"
#include "mhd/incompressible.hpp"

namespace mhd {

/// Unit vector perpendicular to k (k != 0).
inline Vec3 transverse_unit(const Mode& k) {
  const Vec3 kk{double(k[0]), double(k[1]), double(k[2])};
  // cross with the axis least aligned with k
  int axis = 0;
  for (int j = 1; j < 3; ++j)
    if (std::abs(kk[j]) < std::abs(kk[axis])) axis = j;
  Vec3 e{0.0, 0.0, 0.0};
  e[axis] = 1.0;
  Vec3 t{kk[1] * e[2] - kk[2] * e[1], kk[2] * e[0] - kk[0] * e[2],
         kk[0] * e[1] - kk[1] * e[0]};
  const double norm = std::sqrt(t[0] * t[0] + t[1] * t[1] + t[2] * t[2]);
  if (!(norm > 0.0)) throw ValidationError("transverse_unit needs k != 0");
  for (double& x : t) x /= norm;
  return t;
}

/// Random real solenoidal field with modes 0 < max_j |k_j| <= kmax and
/// coefficient spread ~ 1/(1 + |k|^2). Deterministic in seed.
inline SpectralVectorField random_solenoidal(const Grid& g, int kmax, std::uint64_t seed) {
  if (kmax < 1 || kmax >= g.n / 2)
    throw ValidationError("random field kmax must be in [1, n/2)");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralVectorField f(g);
  for_each_mode(g, [&](std::size_t i, const Mode& k) {
    const int kinf = std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
    // draw for every slot so the stream does not depend on kmax
    std::array<cplx, 3> z;
    for (auto& zz : z) {
      const double re = normal(rng);
      const double im = normal(rng);
      zz = cplx(re, im);
    }
    if (kinf == 0 || kinf > kmax) return;
    const double a = 1.0 / (1.0 + detail::mode_k2(k));
    for (int j = 0; j < 3; ++j) f.c[j][i] = a * z[j];
  });
  for (auto& comp : f.c) make_hermitian(g, comp);
  leray_project_inplace(f);
  return f;
}

/// Rescales f to the given L2 norm over the box (no-op for a zero field).
inline void normalize_l2(SpectralVectorField& f, double target) {
  const double n = l2_norm(f);
  if (n > 0.0) scale(f, target / n);
}

struct PresetSpec {
  std::string name = "alfven-mode";
  double amplitude = 1e-2;
  Mode k = {1, 0, 0};  // alfven-mode wavevector
  int kmax = 4;        // random-bandlimited band limit
  std::uint64_t seed = 1;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"steady", "alfven-mode",
                                                 "taylor-green-mhd", "random-bandlimited"};
  return names;
}

/// Initial conditions:
///  steady              u = 0, B = 0
///  alfven-mode         u = B = a e sin(k.x), e a unit vector normal to k
///                      (a travelling Alfven wave along H_tilde)
///  taylor-green-mhd    u = a (sin x1 cos x2 cos x3, -cos x1 sin x2 cos x3, 0),
///                      B = a (sin x3, sin x1, sin x2)
///  random-bandlimited  independent random solenoidal u, B with max|k_j| <= kmax,
///                      each with rms value a
inline SimState make_preset(const Grid& g, const PresetSpec& spec) {
  const double a = spec.amplitude;
  if (!std::isfinite(a)) throw ValidationError("preset amplitude must be finite");
  if (spec.name == "steady") return zero_state(g);
  if (spec.name == "alfven-mode") {
    const Mode k = spec.k;
    for (int kj : k)
      if (3 * std::abs(kj) > g.n) throw ValidationError("alfven-mode k outside resolved band");
    const Vec3 e = transverse_unit(k);
    auto f = [&](const Vec3& x) {
      const double s = a * std::sin(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
      return Vec3{s * e[0], s * e[1], s * e[2]};
    };
    const RealVectorField v = sample_field(g, f);
    return make_state(v, v);
  }
  if (spec.name == "taylor-green-mhd") {
    const RealVectorField u = sample_field(g, [&](const Vec3& x) {
      return Vec3{a * std::sin(x[0]) * std::cos(x[1]) * std::cos(x[2]),
                  -a * std::cos(x[0]) * std::sin(x[1]) * std::cos(x[2]), 0.0};
    });
    const RealVectorField B = sample_field(g, [&](const Vec3& x) {
      return Vec3{a * std::sin(x[2]), a * std::sin(x[0]), a * std::sin(x[1])};
    });
    return make_state(u, B);
  }
  if (spec.name == "random-bandlimited") {
    SimState s = zero_state(g);
    s.u = random_solenoidal(g, spec.kmax, spec.seed);
    s.B = random_solenoidal(g, spec.kmax, spec.seed + 0x9e3779b97f4a7c15ULL);
    const double target = a * std::sqrt(g.volume());
    normalize_l2(s.u, target);
    normalize_l2(s.B, target);
    return s;
  }
  throw ValidationError("unknown preset '" + spec.name + "'");
}

/// Rescales (u, B) so that ||u||_{H^2} + ||B||_{H^2} equals target.
inline void scale_to_h2_sum(SimState& s, double target) {
  const double sum = sobolev_norm(s.u, 2) + sobolev_norm(s.B, 2);
  if (!(sum > 0.0)) return;
  scale(s.u, target / sum);
  scale(s.B, target / sum);
}

} // namespace mhd
