#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mhd/incompressible.hpp"

namespace mhd {

namespace detail {

inline double mode_k2(const Mode& k) {
  return double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
}

// (2pi)^3 sum_k w(k) weight(|k|^2) |fhat(k)|^2, derivative convention
// (Nyquist planes dropped) unless include_nyquist.
template <typename W>
double weighted_square(const SpectralVectorField& f, W&& weight,
                       bool include_nyquist = false) {
  double s = 0.0;
  for_each_mode(f.grid, [&](std::size_t i, const Mode& k) {
    if (!include_nyquist && on_nyquist_plane(f.grid, k)) return;
    const double m = f.grid.weight(i) * weight(mode_k2(k));
    s += m * (std::norm(f.c[0][i]) + std::norm(f.c[1][i]) + std::norm(f.c[2][i]));
  });
  return f.grid.volume() * s;
}

} // namespace detail

/// Diagnostics sampled along a trajectory. Norms are over the box [0, 2pi)^3.
struct DiagnosticsRecord {
  double t = 0.0;
  double E_kin = 0.0;
  double E_mag = 0.0;
  double dissipation = 0.0;      // lambda ||grad u||^2
  double cum_dissipation = 0.0;  // trapezoidal time integral of dissipation
  // hs_norms[0][s] = ||u||_{H^s}, hs_norms[1][s] = ||B||_{H^s}, s = 0..3
  std::array<std::array<double, 4>, 2> hs_norms{};
  double X = 0.0;
  std::array<double, 4> w_norms{};  // ||w^1||, ||w^2||, ||w^3||, ||w||
  double div_u = 0.0;
  double div_B = 0.0;
  double identity_residual = 0.0;
  double tail_fraction = 0.0;
  // ratio_linf_u, ratio_l4_u, ratio_linf_B, ratio_l4_B; 0 when undefined
  std::array<double, 4> interp_ratios{};

  double energy() const { return E_kin + E_mag; }
};

/// (1/2 ||u||^2, 1/2 ||B||^2) by Parseval.
inline std::pair<double, double> energy(const SimState& s) {
  auto one = [](double) { return 1.0; };
  return {0.5 * detail::weighted_square(s.u, one, true),
          0.5 * detail::weighted_square(s.B, one, true)};
}

/// Same quantity by the rectangle rule on the grid (spectrally exact for
/// band-limited fields).
inline std::pair<double, double> energy_real_space(const SimState& s) {
  const double eu = l2_norm_real(to_real(s.u));
  const double eb = l2_norm_real(to_real(s.B));
  return {0.5 * eu * eu, 0.5 * eb * eb};
}

inline double dissipation(const SimState& s, double lambda) {
  return lambda * detail::weighted_square(s.u, [](double k2) { return k2; });
}

/// ( sum_k (1+|k|^2)^s |fhat(k)|^2 )^(1/2) scaled so that s = 0 is the L2 norm.
inline double sobolev_norm(const SpectralVectorField& f, int s) {
  if (s < 0 || s > 3) throw ValidationError("sobolev order must be in 0..3");
  if (s == 0) return std::sqrt(detail::weighted_square(f, [](double) { return 1.0; }, true));
  return std::sqrt(detail::weighted_square(
      f, [s](double k2) { return std::pow(1.0 + k2, s); }, true));
}

inline double sobolev_norm(const SpectralField& f, int s) {
  if (s < 0 || s > 3) throw ValidationError("sobolev order must be in 0..3");
  double sum = 0.0;
  for_each_mode(f.grid, [&](std::size_t i, const Mode& k) {
    sum += f.grid.weight(i) * std::pow(1.0 + detail::mode_k2(k), s) * std::norm(f.v[i]);
  });
  return std::sqrt(f.grid.volume() * sum);
}

/// X = ||Lap B||^2 + ||grad B||^2 + ||grad u||^2 + ||u_t||^2, with u_t taken
/// from the semi-discrete right-hand side.
inline double x_functional(const SimState& s, const SolverParams& p) {
  const double lapB = detail::weighted_square(s.B, [](double k2) { return k2 * k2; });
  const double gradB = detail::weighted_square(s.B, [](double k2) { return k2; });
  const double gradu = detail::weighted_square(s.u, [](double k2) { return k2; });
  const auto [du, dB] = rhs_incompressible(s, p);
  const double ut = detail::weighted_square(du, [](double) { return 1.0; }, true);
  return lapB + gradB + gradu + ut;
}

struct AuxiliaryW {
  std::array<SpectralVectorField, 3> wj;  // w^j = Lap u + 3/lambda (curl B) x e_j
  SpectralVectorField w;                  // sum_j w^j
};

inline AuxiliaryW compute_w(const SimState& s, const SolverParams& p) {
  if (!(p.lambda > 0.0)) throw ValidationError("compute_w needs lambda > 0");
  const SpectralVectorField lap_u = laplacian(s.u);
  const SpectralVectorField curlB = curl(s.B);
  AuxiliaryW out;
  out.w = SpectralVectorField(s.grid());
  for (int j = 0; j < 3; ++j) {
    Vec3 e{0.0, 0.0, 0.0};
    e[j] = 1.0;
    out.wj[j] = lap_u;
    axpy(out.wj[j], 3.0 / p.lambda, cross(curlB, e));
    out.wj[j].solenoidal = false;
    axpy(out.w, 1.0, out.wj[j]);
  }
  return out;
}

/// max_j || Lap B_j + div[(curl B) x e_j] ||_{L2} / max(1, ||Lap B||_{L2}).
/// Vanishes (to round-off) exactly when div B = 0.
inline double identity_residual(const SpectralVectorField& B) {
  const SpectralVectorField lapB = laplacian(B);
  const SpectralVectorField curlB = curl(B);
  double worst = 0.0;
  for (int j = 0; j < 3; ++j) {
    Vec3 e{0.0, 0.0, 0.0};
    e[j] = 1.0;
    SpectralField r = divergence(cross(curlB, e));
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] += lapB.c[j][i];
    worst = std::max(worst, l2_norm(r));
  }
  return worst / std::max(1.0, l2_norm(lapB));
}

/// Largest wavenumber kept by the discretization: n/3 with 2/3 truncation,
/// n/2 - 1 without.
inline int resolved_kmax(const Grid& g, bool dealias) {
  return dealias ? g.n / 3 : g.n / 2 - 1;
}

/// Fraction of the spectral energy of (u, B) in the top third of the
/// resolved band: modes with max_j |k_j| > 2/3 resolved_kmax.
inline double tail_fraction(const SimState& s, bool dealias) {
  const int kmax = resolved_kmax(s.grid(), dealias);
  double tail = 0.0, total = 0.0;
  for_each_mode(s.grid(), [&](std::size_t i, const Mode& k) {
    const double w = s.grid().weight(i);
    double e = 0.0;
    for (int j = 0; j < 3; ++j) e += std::norm(s.u.c[j][i]) + std::norm(s.B.c[j][i]);
    total += w * e;
    const int kinf = std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
    if (3 * kinf > 2 * kmax) tail += w * e;
  });
  return total > 0.0 ? tail / total : 0.0;
}

enum class InterpNorm { Linf, L4 };

/// Gagliardo-Nirenberg ratio monitors:
///   Linf: ||v||_inf / (||v||^{1/4} ||D^2 v||^{3/4})
///   L4:   ||v||_4   / (||v||^{5/8} ||D^2 v||^{3/8})
/// with ||D^2 v||^2 = sum_{ij} ||d_i d_j v||^2 and the left-hand norms taken
/// on the grid. Throws for a field with zero L2 norm or zero Hessian.
inline double interpolation_ratio(const SpectralVectorField& f, InterpNorm which) {
  const double l2 = std::sqrt(detail::weighted_square(f, [](double) { return 1.0; }, true));
  const double d2 = std::sqrt(detail::weighted_square(f, [](double k2) { return k2 * k2; }));
  if (!(l2 > 0.0)) throw ValidationError("interpolation ratio of a zero field");
  if (!(d2 > 0.0)) throw ValidationError("interpolation ratio of a constant field");
  const RealVectorField v = to_real(f);
  if (which == InterpNorm::Linf) {
    return max_magnitude(v) / (std::pow(l2, 0.25) * std::pow(d2, 0.75));
  }
  double s4 = 0.0;
  for (std::size_t i = 0; i < v.grid.real_size(); ++i) {
    const double m2 = v.c[0][i] * v.c[0][i] + v.c[1][i] * v.c[1][i] + v.c[2][i] * v.c[2][i];
    s4 += m2 * m2;
  }
  const double l4 = std::pow(v.grid.cell_volume() * s4, 0.25);
  return l4 / (std::pow(l2, 0.625) * std::pow(d2, 0.375));
}

namespace detail {

inline double ratio_or_zero(const SpectralVectorField& f, InterpNorm which) {
  const double l2 = weighted_square(f, [](double) { return 1.0; }, true);
  const double d2 = weighted_square(f, [](double k2) { return k2 * k2; });
  if (!(l2 > 0.0) || !(d2 > 0.0)) return 0.0;
  return interpolation_ratio(f, which);
}

} // namespace detail

/// Everything except cum_dissipation, which depends on the history.
inline DiagnosticsRecord make_record(const SimState& s, const SolverParams& p) {
  DiagnosticsRecord r;
  r.t = s.t;
  std::tie(r.E_kin, r.E_mag) = energy(s);
  r.dissipation = dissipation(s, p.lambda);
  for (int order = 0; order < 4; ++order) {
    r.hs_norms[0][order] = sobolev_norm(s.u, order);
    r.hs_norms[1][order] = sobolev_norm(s.B, order);
  }
  r.X = x_functional(s, p);
  const AuxiliaryW w = compute_w(s, p);
  for (int j = 0; j < 3; ++j) r.w_norms[j] = l2_norm(w.wj[j]);
  r.w_norms[3] = l2_norm(w.w);
  r.div_u = divergence_residual(s.u);
  r.div_B = divergence_residual(s.B);
  r.identity_residual = identity_residual(s.B);
  r.tail_fraction = tail_fraction(s, p.dealias);
  r.interp_ratios[0] = detail::ratio_or_zero(s.u, InterpNorm::Linf);
  r.interp_ratios[1] = detail::ratio_or_zero(s.u, InterpNorm::L4);
  r.interp_ratios[2] = detail::ratio_or_zero(s.B, InterpNorm::Linf);
  r.interp_ratios[3] = detail::ratio_or_zero(s.B, InterpNorm::L4);
  return r;
}

/// Trapezoidal integral of dissipation over a record sequence.
inline double integrated_dissipation(std::span<const DiagnosticsRecord> seg) {
  double q = 0.0;
  for (std::size_t i = 1; i < seg.size(); ++i)
    q += 0.5 * (seg[i].t - seg[i - 1].t) * (seg[i].dissipation + seg[i - 1].dissipation);
  return q;
}

/// |E(t2) - E(t1) + int_{t1}^{t2} lambda ||grad u||^2 dt| over a segment.
inline double energy_balance_residual(std::span<const DiagnosticsRecord> seg) {
  if (seg.size() < 2) throw ValidationError("energy balance needs >= 2 records");
  const double q = integrated_dissipation(seg);
  return std::abs(seg.back().energy() - seg.front().energy() + q);
}

struct DissipationBudget {
  double cum_dissipation = 0.0;
  double E0 = 0.0;
  double E_end = 0.0;
  bool ok = true;  // cum_dissipation <= E0 (1 + 1e-6)

  // |E0 - E_end - cum| / E0; 0 when E0 == 0.
  double closure_error() const {
    return E0 > 0.0 ? std::abs(E0 - E_end - cum_dissipation) / E0
                    : std::abs(E_end + cum_dissipation);
  }
};

inline DissipationBudget dissipation_budget(std::span<const DiagnosticsRecord> records) {
  DissipationBudget b;
  if (records.empty()) return b;
  b.E0 = records.front().energy();
  b.E_end = records.back().energy();
  b.cum_dissipation = integrated_dissipation(records);
  b.ok = b.cum_dissipation <= b.E0 * (1.0 + 1e-6);
  return b;
}

} // namespace mhd
