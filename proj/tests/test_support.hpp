#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "mhd/fft.hpp"
#include "mhd/grid.hpp"
#include "mhd/presets.hpp"
#include "mhd/spectral_ops.hpp"

namespace mhd::test {

inline double max_abs_diff(const RealVectorField& a, const RealVectorField& b) {
  double m = 0.0;
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < a.c[j].size(); ++i)
      m = std::max(m, std::abs(a.c[j][i] - b.c[j][i]));
  return m;
}

inline double max_abs_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

inline double max_coeff(const SpectralVectorField& f) {
  double m = 0.0;
  for (const auto& comp : f.c)
    for (const cplx& z : comp) m = std::max(m, std::abs(z));
  return m;
}

inline double max_coeff(const SpectralField& f) {
  double m = 0.0;
  for (const cplx& z : f.v) m = std::max(m, std::abs(z));
  return m;
}

inline double max_coeff_diff(const SpectralVectorField& a, const SpectralVectorField& b) {
  double m = 0.0;
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < a.c[j].size(); ++i)
      m = std::max(m, std::abs(a.c[j][i] - b.c[j][i]));
  return m;
}

// max |a - b| / max(max|a|, max|b|)
inline double rel_diff(const SpectralVectorField& a, const SpectralVectorField& b) {
  const double scale = std::max(max_coeff(a), max_coeff(b));
  return scale > 0.0 ? max_coeff_diff(a, b) / scale : 0.0;
}

// Smooth random real scalar with modes max|k_j| <= kmax, drawn spectrally.
inline SpectralField random_scalar(const Grid& g, int kmax, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(g);
  for_each_mode(g, [&](std::size_t i, const Mode& k) {
    const double re = normal(rng), im = normal(rng);
    if (std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])}) > kmax) return;
    const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    f.v[i] = cplx(re, im) / (1.0 + k2);
  });
  make_hermitian(g, f.v);
  return f;
}

// Random band-limited real vector field, not solenoidal.
inline SpectralVectorField random_vector(const Grid& g, int kmax, std::uint64_t seed) {
  SpectralVectorField f(g);
  for (int j = 0; j < 3; ++j) f.c[j] = random_scalar(g, kmax, seed * 3 + j).v;
  return f;
}

// Finite-difference weights for the m-th derivative at 0 from the given
// nodes (Fornberg's recursion).
inline std::vector<double> fd_weights(const std::vector<double>& nodes, int m) {
  const int np = static_cast<int>(nodes.size());
  std::vector<std::vector<double>> c(np, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = nodes[0];
  c[0][0] = 1.0;
  for (int i = 1; i < np; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(np);
  for (int i = 0; i < np; ++i) w[i] = c[i][m];
  return w;
}

using Mat6 = std::array<std::array<cplx, 6>, 6>;

inline Mat6 mat_mul(const Mat6& a, const Mat6& b) {
  Mat6 c{};
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k)
      for (int j = 0; j < 6; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// exp(A) by scaling and squaring with a 30-term Taylor series.
inline Mat6 mat_exp(Mat6 a) {
  double norm = 0.0;
  for (const auto& row : a) {
    double r = 0.0;
    for (const cplx& z : row) r += std::abs(z);
    norm = std::max(norm, r);
  }
  int squarings = 0;
  while (norm > 0.5) {
    norm *= 0.5;
    ++squarings;
  }
  const double f = std::ldexp(1.0, -squarings);
  for (auto& row : a)
    for (cplx& z : row) z *= f;
  Mat6 result{}, term{};
  for (int i = 0; i < 6; ++i) result[i][i] = term[i][i] = 1.0;
  for (int m = 1; m <= 30; ++m) {
    term = mat_mul(term, a);
    for (auto& row : term)
      for (cplx& z : row) z /= double(m);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) result[i][j] += term[i][j];
  }
  for (int i = 0; i < squarings; ++i) result = mat_mul(result, result);
  return result;
}

// Linearization about (u, B) = (0, H_tilde) for one Fourier mode k:
//   d/dt uhat = -lambda |k|^2 uhat + i (k.H) P_k Bhat,   d/dt Bhat = i (k.H) uhat
// Returns exp(A t) acting on (uhat, Bhat).
inline Mat6 linear_mode_propagator(const Mode& k, double lambda, const Vec3& H, double t) {
  const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
  const double omega = k[0] * H[0] + k[1] * H[1] + k[2] * H[2];
  Mat6 a{};
  for (int i = 0; i < 3; ++i) {
    a[i][i] = -lambda * k2 * t;
    a[3 + i][i] = cplx(0.0, omega * t);
    for (int j = 0; j < 3; ++j) {
      const double p = (i == j ? 1.0 : 0.0) - k[i] * k[j] / k2;
      a[i][3 + j] = cplx(0.0, omega * t * p);
    }
  }
  return mat_exp(a);
}

// Real fields u = a_u e sin(k.x), B = a_B e sin(k.x) evolved by the linear
// propagator and sampled on the grid.
inline std::pair<RealVectorField, RealVectorField>
linear_mode_solution(const Grid& g, const Mode& k, const Vec3& e, double a_u, double a_B,
                     double lambda, const Vec3& H, double t) {
  // sin(k.x) = (e^{ikx} - e^{-ikx}) / 2i, so the +k coefficient is a e / 2i
  std::array<cplx, 6> z{};
  for (int j = 0; j < 3; ++j) {
    z[j] = a_u * e[j] / cplx(0.0, 2.0);
    z[3 + j] = a_B * e[j] / cplx(0.0, 2.0);
  }
  const Mat6 prop = linear_mode_propagator(k, lambda, H, t);
  std::array<cplx, 6> y{};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) y[i] += prop[i][j] * z[j];
  RealVectorField u(g), B(g);
  for_each_point(g, [&](std::size_t idx, const Vec3& x) {
    const cplx ph = std::exp(cplx(0.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
    for (int j = 0; j < 3; ++j) {
      u.c[j][idx] = 2.0 * (y[j] * ph).real();
      B.c[j][idx] = 2.0 * (y[3 + j] * ph).real();
    }
  });
  return {u, B};
}

// Relative L2 distance of (u, B) from a reference pair, over both fields.
inline double relative_l2_error(const SimState& s, const RealVectorField& u_ref,
                                const RealVectorField& B_ref) {
  const RealVectorField u = to_real(s.u), B = to_real(s.B);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < u.c[j].size(); ++i) {
      num += std::pow(u.c[j][i] - u_ref.c[j][i], 2) + std::pow(B.c[j][i] - B_ref.c[j][i], 2);
      den += u_ref.c[j][i] * u_ref.c[j][i] + B_ref.c[j][i] * B_ref.c[j][i];
    }
  return std::sqrt(num / den);
}

} // namespace mhd::test
