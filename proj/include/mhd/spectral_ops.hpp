#pragma once

#include <algorithm>
#include <cmath>

#include "mhd/fft.hpp"
#include "mhd/grid.hpp"

namespace mhd {

// Spectral derivatives use i*k with every Nyquist-plane mode zeroed
// (any |k_j| == n/2). The discrete divergence D and gradient G are adjoint,
// and leray_project is the orthogonal projector onto ker D: at Nyquist-plane
// modes D vanishes, so the projector is the identity there.

namespace detail {

inline bool on_nyquist_plane(const Grid& g, const Mode& k) {
  return g.is_nyquist(k[0]) || g.is_nyquist(k[1]) || g.is_nyquist(k[2]);
}

inline void check_axis(int axis) {
  if (axis < 0 || axis > 2)
    throw ValidationError("axis must be 0, 1 or 2, got " + std::to_string(axis));
}

} // namespace detail

/// d/dx_axis of a scalar spectral field; axis is 0-based.
inline SpectralField derivative(const SpectralField& f, int axis) {
  detail::check_axis(axis);
  SpectralField out(f.grid);
  for_each_mode(f.grid, [&](std::size_t i, const Mode& k) {
    if (detail::on_nyquist_plane(f.grid, k)) return;
    out.v[i] = cplx(0.0, k[axis]) * f.v[i];
  });
  return out;
}

/// d/dx_axis applied to every component.
inline SpectralVectorField derivative(const SpectralVectorField& f, int axis) {
  detail::check_axis(axis);
  SpectralVectorField out(f.grid);
  for_each_mode(f.grid, [&](std::size_t i, const Mode& k) {
    if (detail::on_nyquist_plane(f.grid, k)) return;
    const cplx ik(0.0, k[axis]);
    for (int j = 0; j < 3; ++j) out.c[j][i] = ik * f.c[j][i];
  });
  // A derivative of a solenoidal field is solenoidal (the operators commute).
  out.solenoidal = f.solenoidal;
  return out;
}

inline SpectralVectorField gradient(const SpectralField& f) {
  SpectralVectorField out(f.grid);
  for_each_mode(f.grid, [&](std::size_t i, const Mode& k) {
    if (detail::on_nyquist_plane(f.grid, k)) return;
    for (int j = 0; j < 3; ++j) out.c[j][i] = cplx(0.0, k[j]) * f.v[i];
  });
  return out;
}

inline SpectralVectorField curl(const SpectralVectorField& f) {
  SpectralVectorField out(f.grid);
  for_each_mode(f.grid, [&](std::size_t i, const Mode& k) {
    if (detail::on_nyquist_plane(f.grid, k)) return;
    const cplx a = f.c[0][i], b = f.c[1][i], c = f.c[2][i];
    const cplx I(0.0, 1.0);
    out.c[0][i] = I * (double(k[1]) * c - double(k[2]) * b);
    out.c[1][i] = I * (double(k[2]) * a - double(k[0]) * c);
    out.c[2][i] = I * (double(k[0]) * b - double(k[1]) * a);
  });
  out.solenoidal = true;
  return out;
}

inline SpectralField divergence(const SpectralVectorField& f) {
  SpectralField out(f.grid);
  for_each_mode(f.grid, [&](std::size_t i, const Mode& k) {
    if (detail::on_nyquist_plane(f.grid, k)) return;
    out.v[i] = cplx(0.0, 1.0) * (double(k[0]) * f.c[0][i] + double(k[1]) * f.c[1][i] +
                                 double(k[2]) * f.c[2][i]);
  });
  return out;
}

inline SpectralVectorField laplacian(const SpectralVectorField& f) {
  SpectralVectorField out(f.grid);
  for_each_mode(f.grid, [&](std::size_t i, const Mode& k) {
    if (detail::on_nyquist_plane(f.grid, k)) return;
    const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    for (int j = 0; j < 3; ++j) out.c[j][i] = -k2 * f.c[j][i];
  });
  out.solenoidal = f.solenoidal;
  return out;
}

inline SpectralField laplacian(const SpectralField& f) {
  SpectralField out(f.grid);
  for_each_mode(f.grid, [&](std::size_t i, const Mode& k) {
    if (detail::on_nyquist_plane(f.grid, k)) return;
    const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    out.v[i] = -k2 * f.v[i];
  });
  return out;
}

/// Removes the gradient part: fhat(k) -= k (k.fhat(k)) / |k|^2 for k != 0.
/// The mean mode and Nyquist-plane modes are left as they are.
inline void leray_project_inplace(SpectralVectorField& f) {
  for_each_mode(f.grid, [&](std::size_t i, const Mode& k) {
    if (detail::on_nyquist_plane(f.grid, k)) return;
    const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    if (k2 == 0.0) return;
    const cplx kf = double(k[0]) * f.c[0][i] + double(k[1]) * f.c[1][i] +
                    double(k[2]) * f.c[2][i];
    const cplx s = kf / k2;
    for (int j = 0; j < 3; ++j) f.c[j][i] -= double(k[j]) * s;
  });
  f.solenoidal = true;
}

inline SpectralVectorField leray_project(SpectralVectorField f) {
  leray_project_inplace(f);
  return f;
}

inline bool dealias_keeps(const Grid& g, const Mode& k) {
  return 3 * std::abs(k[0]) <= g.n && 3 * std::abs(k[1]) <= g.n &&
         3 * std::abs(k[2]) <= g.n;
}

/// 2/3 rule: zero every mode with some |k_j| > n/3.
inline void dealias_inplace(SpectralVectorField& f) {
  for_each_mode(f.grid, [&](std::size_t i, const Mode& k) {
    if (dealias_keeps(f.grid, k)) return;
    for (auto& comp : f.c) comp[i] = cplx{};
  });
}

inline void dealias_inplace(const Grid& g, std::vector<cplx>& v) {
  for_each_mode(g, [&](std::size_t i, const Mode& k) {
    if (!dealias_keeps(g, k)) v[i] = cplx{};
  });
}

inline SpectralVectorField dealias_two_thirds(SpectralVectorField f) {
  dealias_inplace(f);
  return f;
}

inline SpectralField dealias_two_thirds(SpectralField f) {
  dealias_inplace(f.grid, f.v);
  return f;
}

inline RealField multiply_pointwise(const RealField& f, const RealField& g) {
  require_same_grid(f.grid, g.grid);
  RealField out(f.grid);
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = f.v[i] * g.v[i];
  return out;
}

/// Component-wise product.
inline RealVectorField multiply_pointwise(const RealVectorField& f,
                                          const RealVectorField& g) {
  require_same_grid(f.grid, g.grid);
  RealVectorField out(f.grid);
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < out.c[j].size(); ++i)
      out.c[j][i] = f.c[j][i] * g.c[j][i];
  return out;
}

inline RealVectorField cross(const RealVectorField& a, const RealVectorField& b) {
  require_same_grid(a.grid, b.grid);
  RealVectorField out(a.grid);
  for (std::size_t i = 0; i < a.grid.real_size(); ++i) {
    out.c[0][i] = a.c[1][i] * b.c[2][i] - a.c[2][i] * b.c[1][i];
    out.c[1][i] = a.c[2][i] * b.c[0][i] - a.c[0][i] * b.c[2][i];
    out.c[2][i] = a.c[0][i] * b.c[1][i] - a.c[1][i] * b.c[0][i];
  }
  return out;
}

inline SpectralVectorField cross(const SpectralVectorField& a, const Vec3& e) {
  SpectralVectorField out(a.grid);
  for (std::size_t i = 0; i < a.grid.spectral_size(); ++i) {
    out.c[0][i] = a.c[1][i] * e[2] - a.c[2][i] * e[1];
    out.c[1][i] = a.c[2][i] * e[0] - a.c[0][i] * e[2];
    out.c[2][i] = a.c[0][i] * e[1] - a.c[1][i] * e[0];
  }
  return out;
}

/// (a . grad) v for real-space a and the nine real-space derivatives
/// dv[l].c[j] = d v_j / d x_l.
inline RealVectorField advect(const RealVectorField& a,
                              const std::array<RealVectorField, 3>& dv) {
  RealVectorField out(a.grid);
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < a.grid.real_size(); ++i)
      out.c[j][i] = a.c[0][i] * dv[0].c[j][i] + a.c[1][i] * dv[1].c[j][i] +
                    a.c[2][i] * dv[2].c[j][i];
  return out;
}

/// max_k |k . fhat(k)| / max_k |fhat(k)| over all components; 0 for a zero field.
inline double divergence_residual(const SpectralVectorField& f) {
  double num = 0.0, den = 0.0;
  for_each_mode(f.grid, [&](std::size_t i, const Mode& k) {
    for (int j = 0; j < 3; ++j) den = std::max(den, std::abs(f.c[j][i]));
    if (detail::on_nyquist_plane(f.grid, k)) return;
    const cplx kf = double(k[0]) * f.c[0][i] + double(k[1]) * f.c[1][i] +
                    double(k[2]) * f.c[2][i];
    num = std::max(num, std::abs(kf));
  });
  return den > 0.0 ? num / den : 0.0;
}

/// Parseval L2 norm over the box: (int |f|^2 dx)^(1/2).
inline double l2_norm(const SpectralVectorField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.grid.spectral_size(); ++i) {
    const double w = f.grid.weight(i);
    for (int j = 0; j < 3; ++j) s += w * std::norm(f.c[j][i]);
  }
  return std::sqrt(f.grid.volume() * s);
}

inline double l2_norm(const SpectralField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.grid.spectral_size(); ++i)
    s += f.grid.weight(i) * std::norm(f.v[i]);
  return std::sqrt(f.grid.volume() * s);
}

/// Trapezoidal (equivalently, rectangle) rule over the periodic box.
inline double l2_norm_real(const RealVectorField& f) {
  double s = 0.0;
  for (const auto& comp : f.c)
    for (double x : comp) s += x * x;
  return std::sqrt(f.grid.cell_volume() * s);
}

inline double l2_norm_real(const RealField& f) {
  double s = 0.0;
  for (double x : f.v) s += x * x;
  return std::sqrt(f.grid.cell_volume() * s);
}

inline double max_abs(const RealVectorField& f) {
  double m = 0.0;
  for (const auto& comp : f.c)
    for (double x : comp) m = std::max(m, std::abs(x));
  return m;
}

/// Largest pointwise Euclidean magnitude.
inline double max_magnitude(const RealVectorField& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.grid.real_size(); ++i) {
    const double s = f.c[0][i] * f.c[0][i] + f.c[1][i] * f.c[1][i] + f.c[2][i] * f.c[2][i];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

inline SpectralVectorField difference(const SpectralVectorField& a,
                                      const SpectralVectorField& b) {
  require_same_grid(a.grid, b.grid);
  SpectralVectorField out = a;
  axpy(out, -1.0, b);
  out.solenoidal = false;
  return out;
}

} // namespace mhd
