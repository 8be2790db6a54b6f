#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "mhd/errors.hpp"

namespace mhd {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Vec3 = std::array<double, 3>;
using Mode = std::array<int, 3>;

/// Periodic box [0, 2pi)^3 sampled on n^3 points.
///
/// Real-space arrays are x1-fastest: index = i1 + n*(i2 + n*i3).
/// Spectral arrays use the r2c half layout, halved along x1:
/// index = h + nh*(j2 + n*j3) with h in [0, n/2], nh = n/2 + 1.
/// Index n/2 on any axis is the Nyquist wavenumber -n/2.
///
/// Coefficients are normalized so that f(x) = sum_k fhat(k) exp(i k.x);
/// hence int |f|^2 dx = (2pi)^3 sum_k |fhat(k)|^2 over the full wavenumber set,
/// which in half storage means weight 2 for 0 < h < n/2 and weight 1 otherwise.
struct Grid {
  int n = 0;
  double L = kTwoPi;
  double dx = 0.0;

  int nh() const noexcept { return n / 2 + 1; }
  std::size_t real_size() const noexcept {
    return static_cast<std::size_t>(n) * n * n;
  }
  std::size_t spectral_size() const noexcept {
    return static_cast<std::size_t>(n) * n * nh();
  }
  double volume() const noexcept { return L * L * L; }
  double cell_volume() const noexcept { return dx * dx * dx; }

  // Signed wavenumber of a full-axis index; index n/2 maps to -n/2.
  int wavenumber(int i) const noexcept { return i < n / 2 ? i : i - n; }

  bool is_nyquist(int k) const noexcept { return k == -n / 2 || k == n / 2; }

  std::size_t real_index(int i1, int i2, int i3) const noexcept {
    return static_cast<std::size_t>(i1) +
           static_cast<std::size_t>(n) * (i2 + static_cast<std::size_t>(n) * i3);
  }

  Mode mode(std::size_t idx) const noexcept {
    const auto half = static_cast<std::size_t>(nh());
    const int h = static_cast<int>(idx % half);
    const auto rest = idx / half;
    const int j2 = static_cast<int>(rest % n);
    const int j3 = static_cast<int>(rest / n);
    return {wavenumber(h), wavenumber(j2), wavenumber(j3)};
  }

  // Parseval multiplicity of a half-storage slot.
  double weight(std::size_t idx) const noexcept {
    const int h = static_cast<int>(idx % static_cast<std::size_t>(nh()));
    return (h == 0 || h == n / 2) ? 1.0 : 2.0;
  }

  Vec3 position(int i1, int i2, int i3) const noexcept {
    return {i1 * dx, i2 * dx, i3 * dx};
  }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.n == b.n;
  }
};

inline Grid make_grid(int n) {
  if (n < 4 || n % 2 != 0) {
    throw ValidationError("grid size must be even and >= 4, got " +
                          std::to_string(n));
  }
  Grid g;
  g.n = n;
  g.L = kTwoPi;
  g.dx = kTwoPi / n;
  return g;
}

/// Calls f(idx, k) for every half-storage slot, slowest axis outermost.
template <typename F>
void for_each_mode(const Grid& g, F&& f) {
  const int n = g.n;
  const int nh = g.nh();
  std::size_t idx = 0;
  for (int j3 = 0; j3 < n; ++j3) {
    const int k3 = g.wavenumber(j3);
    for (int j2 = 0; j2 < n; ++j2) {
      const int k2 = g.wavenumber(j2);
      for (int h = 0; h < nh; ++h, ++idx) {
        const int k1 = (h == n / 2) ? -n / 2 : h;
        f(idx, Mode{k1, k2, k3});
      }
    }
  }
}

/// Calls f(idx, x) for every grid node in storage order.
template <typename F>
void for_each_point(const Grid& g, F&& f) {
  std::size_t idx = 0;
  for (int i3 = 0; i3 < g.n; ++i3)
    for (int i2 = 0; i2 < g.n; ++i2)
      for (int i1 = 0; i1 < g.n; ++i1, ++idx) f(idx, g.position(i1, i2, i3));
}

/// Locates the half-storage slot holding wavenumber k.
/// Returns false in `conjugate` when the slot stores fhat(k) directly and
/// true when it stores fhat(-k).
inline std::size_t spectral_slot(const Grid& g, Mode k, bool& conjugate) {
  auto wrap = [&](int kk) { return ((kk % g.n) + g.n) % g.n; };
  int h = wrap(k[0]);
  int j2 = wrap(k[1]);
  int j3 = wrap(k[2]);
  conjugate = false;
  if (h > g.n / 2) {
    h = g.n - h;
    j2 = wrap(-k[1]);
    j3 = wrap(-k[2]);
    conjugate = true;
  }
  return static_cast<std::size_t>(h) +
         static_cast<std::size_t>(g.nh()) *
             (static_cast<std::size_t>(j2) + static_cast<std::size_t>(g.n) * j3);
}

/// Enforces fhat(-k) = conj(fhat(k)) inside the h = 0 and h = n/2 planes,
/// the only planes where half storage holds both k and -k.
inline void make_hermitian(const Grid& g, std::vector<cplx>& v) {
  for_each_mode(g, [&](std::size_t i, const Mode& k) {
    if (k[0] != 0 && !g.is_nyquist(k[0])) return;
    bool conj = false;
    const std::size_t partner = spectral_slot(g, Mode{k[0], -k[1], -k[2]}, conj);
    if (partner < i) {
      v[i] = std::conj(v[partner]);
    } else if (partner == i) {
      v[i] = v[i].real();
    }
  });
}

struct RealField {
  Grid grid;
  std::vector<double> v;

  RealField() = default;
  explicit RealField(const Grid& g) : grid(g), v(g.real_size(), 0.0) {}
};

struct RealVectorField {
  Grid grid;
  std::array<std::vector<double>, 3> c;

  RealVectorField() = default;
  explicit RealVectorField(const Grid& g) : grid(g) {
    for (auto& comp : c) comp.assign(g.real_size(), 0.0);
  }
};

struct SpectralField {
  Grid grid;
  std::vector<cplx> v;

  SpectralField() = default;
  explicit SpectralField(const Grid& g) : grid(g), v(g.spectral_size()) {}
};

struct SpectralVectorField {
  Grid grid;
  std::array<std::vector<cplx>, 3> c;
  // Set by leray_project; cleared by any operation that can break it.
  bool solenoidal = false;

  SpectralVectorField() = default;
  explicit SpectralVectorField(const Grid& g) : grid(g) {
    for (auto& comp : c) comp.assign(g.spectral_size(), cplx{});
  }
};

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) {
    throw ValidationError("grid mismatch: n=" + std::to_string(a.n) +
                          " vs n=" + std::to_string(b.n));
  }
}

inline bool all_finite(const RealVectorField& f) {
  for (const auto& comp : f.c)
    for (double x : comp)
      if (!std::isfinite(x)) return false;
  return true;
}

inline bool all_finite(const SpectralVectorField& f) {
  for (const auto& comp : f.c)
    for (const cplx& z : comp)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

/// Samples an analytic vector function f(x) -> Vec3 at every grid node.
template <typename F>
RealVectorField sample_field(const Grid& g, F&& f) {
  RealVectorField out(g);
  for_each_point(g, [&](std::size_t idx, const Vec3& x) {
    const Vec3 val = f(x);
    for (int j = 0; j < 3; ++j) {
      if (!std::isfinite(val[j])) {
        throw ValidationError("non-finite sample in component " +
                              std::to_string(j + 1));
      }
      out.c[j][idx] = val[j];
    }
  });
  return out;
}

template <typename F>
RealField sample_scalar(const Grid& g, F&& f) {
  RealField out(g);
  for_each_point(g, [&](std::size_t idx, const Vec3& x) {
    const double val = f(x);
    if (!std::isfinite(val)) throw ValidationError("non-finite scalar sample");
    out.v[idx] = val;
  });
  return out;
}

// Small spectral-vector algebra used by the time integrators.

inline void axpy(SpectralVectorField& y, double a, const SpectralVectorField& x) {
  for (int j = 0; j < 3; ++j) {
    auto& yj = y.c[j];
    const auto& xj = x.c[j];
    for (std::size_t i = 0; i < yj.size(); ++i) yj[i] += a * xj[i];
  }
  y.solenoidal = y.solenoidal && x.solenoidal;
}

inline void scale(SpectralVectorField& y, double a) {
  for (auto& comp : y.c)
    for (auto& z : comp) z *= a;
}

inline void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

} // namespace mhd
