#pragma once

#include <cmath>
#include <iostream>
#include <limits>
#include <utility>

#include "mhd/fft.hpp"
#include "mhd/params.hpp"
#include "mhd/spectral_ops.hpp"

namespace mhd {

/// State of the background-field system: velocity u and the magnetic
/// perturbation B = H - H_tilde, both solenoidal spectral fields.
struct SimState {
  double t = 0.0;
  SpectralVectorField u;
  SpectralVectorField B;

  const Grid& grid() const { return u.grid; }
};

inline SimState make_state(const RealVectorField& u, const RealVectorField& B,
                           double t = 0.0) {
  require_same_grid(u.grid, B.grid);
  SimState s;
  s.t = t;
  s.u = leray_project(to_spectral(u));
  s.B = leray_project(to_spectral(B));
  return s;
}

inline SimState zero_state(const Grid& g, double t = 0.0) {
  SimState s;
  s.t = t;
  s.u = SpectralVectorField(g);
  s.B = SpectralVectorField(g);
  s.u.solenoidal = s.B.solenoidal = true;
  return s;
}

/// Nonlinear and background-coupling terms of the system, before pressure
/// elimination:
///   momentum  = -(u.grad)u + (curl B) x B + (curl B) x H_tilde
///   induction = -(u.grad)B + (B.grad)u + (H_tilde.grad)u
/// Products are formed in real space and truncated by the 2/3 rule when
/// params.dealias is set. The H_tilde terms are linear and applied spectrally.
struct NonlinearTerms {
  SpectralVectorField momentum;
  SpectralVectorField induction;
  // max|u| + max|B + H_tilde| over the grid, for the CFL check.
  double signal_speed = 0.0;
};

inline NonlinearTerms nonlinear_terms(const SimState& s, const SolverParams& p) {
  const Grid& g = s.grid();
  require_same_grid(g, s.B.grid);
  const std::size_t m = g.real_size();

  const RealVectorField u = to_real(s.u);
  const RealVectorField B = to_real(s.B);
  std::array<RealVectorField, 3> du, dB;
  for (int l = 0; l < 3; ++l) {
    du[l] = to_real(derivative(s.u, l));
    dB[l] = to_real(derivative(s.B, l));
  }

  RealVectorField curlB(g);
  for (std::size_t i = 0; i < m; ++i) {
    curlB.c[0][i] = dB[1].c[2][i] - dB[2].c[1][i];
    curlB.c[1][i] = dB[2].c[0][i] - dB[0].c[2][i];
    curlB.c[2][i] = dB[0].c[1][i] - dB[1].c[0][i];
  }

  const RealVectorField u_adv_u = advect(u, du);
  const RealVectorField lorentz = cross(curlB, B);
  const RealVectorField u_adv_B = advect(u, dB);
  const RealVectorField B_adv_u = advect(B, du);

  RealVectorField mom(g), ind(g);
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      mom.c[j][i] = lorentz.c[j][i] - u_adv_u.c[j][i];
      ind.c[j][i] = B_adv_u.c[j][i] - u_adv_B.c[j][i];
    }

  NonlinearTerms out;
  out.momentum = to_spectral(mom);
  out.induction = to_spectral(ind);
  if (p.dealias) {
    dealias_inplace(out.momentum);
    dealias_inplace(out.induction);
  }

  const Vec3& H = p.H_tilde;
  const SpectralVectorField curlB_hat = curl(s.B);
  for_each_mode(g, [&](std::size_t i, const Mode& k) {
    // (curl B) x H_tilde
    const cplx a = curlB_hat.c[0][i], b = curlB_hat.c[1][i], c = curlB_hat.c[2][i];
    out.momentum.c[0][i] += b * H[2] - c * H[1];
    out.momentum.c[1][i] += c * H[0] - a * H[2];
    out.momentum.c[2][i] += a * H[1] - b * H[0];
    // (H_tilde . grad) u
    if (detail::on_nyquist_plane(g, k)) return;
    const cplx ihk(0.0, H[0] * k[0] + H[1] * k[1] + H[2] * k[2]);
    for (int j = 0; j < 3; ++j) out.induction.c[j][i] += ihk * s.u.c[j][i];
  });

  // Every term is a divergence for solenoidal u and B, so the means have no
  // source; pin them so round-off cannot drift the mean modes.
  for (int j = 0; j < 3; ++j) {
    out.momentum.c[j][0] = cplx{};
    out.induction.c[j][0] = cplx{};
  }

  double umax = 0.0, hmax = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double us = 0.0, hs = 0.0;
    for (int j = 0; j < 3; ++j) {
      us += u.c[j][i] * u.c[j][i];
      const double h = B.c[j][i] + H[j];
      hs += h * h;
    }
    umax = std::max(umax, us);
    hmax = std::max(hmax, hs);
  }
  out.signal_speed = std::sqrt(umax) + std::sqrt(hmax);

  if (!all_finite(out.momentum) || !all_finite(out.induction))
    throw BlowupError("non-finite right-hand side", s.t);
  return out;
}

/// Time derivative of (u, B):
///   du = P[ lambda Lap u - (u.grad)u + (curl B) x B + (curl B) x H_tilde ]
///   dB = -(u.grad)B + (B.grad)u + (H_tilde.grad)u
/// where P is the Leray projector (it takes the place of -grad p).
inline std::pair<SpectralVectorField, SpectralVectorField>
rhs_incompressible(const SimState& s, const SolverParams& p) {
  NonlinearTerms nl = nonlinear_terms(s, p);
  SpectralVectorField du = laplacian(s.u);
  scale(du, p.lambda);
  axpy(du, 1.0, nl.momentum);
  leray_project_inplace(du);
  return {std::move(du), std::move(nl.induction)};
}

/// Pressure from Lap p = div N, N = momentum terms above; zero-mean gauge.
inline SpectralField recover_pressure(const SimState& s, const SolverParams& p) {
  const NonlinearTerms nl = nonlinear_terms(s, p);
  SpectralField out(s.grid());
  for_each_mode(s.grid(), [&](std::size_t i, const Mode& k) {
    if (detail::on_nyquist_plane(s.grid(), k)) return;
    const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    if (k2 == 0.0) return;
    const cplx kn = double(k[0]) * nl.momentum.c[0][i] +
                    double(k[1]) * nl.momentum.c[1][i] +
                    double(k[2]) * nl.momentum.c[2][i];
    out.v[i] = -cplx(0.0, 1.0) * kn / k2;
  });
  return out;
}

/// Largest stable step suggested by the advective/Alfvenic CFL bound.
inline double cfl_limit(double signal_speed, const Grid& g, double cfl) {
  return signal_speed > 0.0 ? cfl * g.dx / signal_speed
                            : std::numeric_limits<double>::infinity();
}

namespace detail {

inline void check_cfl(double dt, double speed, const Grid& g, const SolverParams& p,
                      double t) {
  const double limit = cfl_limit(speed, g, p.cfl);
  if (dt <= limit) return;
  const std::string msg = "CFL violated: dt=" + std::to_string(dt) +
                          " > " + std::to_string(limit);
  if (p.cfl_policy == CflPolicy::Error) throw CflError(msg, t);
  if (p.cfl_policy == CflPolicy::Warn) {
    static bool warned = false;
    if (!warned) std::cerr << "warning: " << msg << " at t=" << t << "\n";
    warned = true;
  }
}

// Multiplies every mode of u by exp(-lambda |k|^2 tau).
inline void apply_viscous_factor(SpectralVectorField& u, double lambda, double tau) {
  for_each_mode(u.grid, [&](std::size_t i, const Mode& k) {
    if (on_nyquist_plane(u.grid, k)) return;
    const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    const double e = std::exp(-lambda * k2 * tau);
    for (int j = 0; j < 3; ++j) u.c[j][i] *= e;
  });
}

} // namespace detail

/// One classical RK4 step with an exact integrating factor for lambda Lap u
/// (Lawson form). B has no dissipative term and is advanced by plain RK4.
inline SimState step(const SimState& s, const SolverParams& p) {
  const double dt = p.dt;
  const double h = 0.5 * dt;

  auto stage = [&](const SimState& x) {
    NonlinearTerms nl = nonlinear_terms(x, p);
    leray_project_inplace(nl.momentum);
    return nl;
  };

  NonlinearTerms k1 = stage(s);
  detail::check_cfl(dt, k1.signal_speed, s.grid(), p, s.t);

  // Stage 2: x = E_h (u + h k1)
  SimState x;
  x.t = s.t + h;
  x.u = s.u;
  axpy(x.u, h, k1.momentum);
  detail::apply_viscous_factor(x.u, p.lambda, h);
  leray_project_inplace(x.u);
  x.B = s.B;
  axpy(x.B, h, k1.induction);
  NonlinearTerms k2 = stage(x);

  // Stage 3: x = E_h u + h k2
  SimState eh_u;
  eh_u.u = s.u;
  detail::apply_viscous_factor(eh_u.u, p.lambda, h);
  x.u = eh_u.u;
  axpy(x.u, h, k2.momentum);
  leray_project_inplace(x.u);
  x.B = s.B;
  axpy(x.B, h, k2.induction);
  NonlinearTerms k3 = stage(x);

  // Stage 4: x = E u + dt E_h k3
  x.t = s.t + dt;
  x.u = eh_u.u;
  detail::apply_viscous_factor(x.u, p.lambda, h);
  SpectralVectorField k3u = k3.momentum;
  detail::apply_viscous_factor(k3u, p.lambda, h);
  axpy(x.u, dt, k3u);
  leray_project_inplace(x.u);
  x.B = s.B;
  axpy(x.B, dt, k3.induction);
  NonlinearTerms k4 = stage(x);

  // u_new = E u + dt/6 (E k1 + 2 E_h (k2 + k3) + k4)
  SimState out;
  out.t = s.t + dt;
  SpectralVectorField acc = k1.momentum;
  detail::apply_viscous_factor(acc, p.lambda, h);
  axpy(acc, 2.0, k2.momentum);
  axpy(acc, 2.0, k3.momentum);
  detail::apply_viscous_factor(acc, p.lambda, h);
  axpy(acc, 1.0, k4.momentum);
  out.u = eh_u.u;
  detail::apply_viscous_factor(out.u, p.lambda, h);
  axpy(out.u, dt / 6.0, acc);
  leray_project_inplace(out.u);

  out.B = s.B;
  axpy(out.B, dt / 6.0, k1.induction);
  axpy(out.B, dt / 3.0, k2.induction);
  axpy(out.B, dt / 3.0, k3.induction);
  axpy(out.B, dt / 6.0, k4.induction);
  if (p.reproject_B) leray_project_inplace(out.B);
  out.B.solenoidal = true;

  if (!all_finite(out.u) || !all_finite(out.B))
    throw BlowupError("non-finite state after step", out.t);
  return out;
}

} // namespace mhd
