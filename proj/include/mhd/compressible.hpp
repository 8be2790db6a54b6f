#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mhd/diagnostics.hpp"
#include "mhd/fft.hpp"
#include "mhd/params.hpp"
#include "mhd/presets.hpp"
#include "mhd/simulation.hpp"
#include "mhd/spectral_ops.hpp"

namespace mhd {

/// Parameters of the Mach-number-eps compressible system with P = K rho^gamma.
struct CompressibleParams {
  double mu = 1.0;        // shear viscosity (0 allowed for inviscid checks)
  double lambda_c = 1.0;  // second viscosity coefficient
  double K = 1.0;
  double gamma = 1.4;
  double eps = 0.1;
  double rho_tilde = 1.0;
  Vec3 H_tilde = {1.0, 1.0, 1.0};
  double dt = 1e-3;
  double t_end = 1.0;
  int record_every = 1;
  double cfl = 0.5;
  CflPolicy cfl_policy = CflPolicy::Error;
  bool dealias = true;

  void validate() const {
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw ValidationError("mu must be >= 0");
    if (!(lambda_c >= 0.0) || !std::isfinite(lambda_c))
      throw ValidationError("lambda_c must be >= 0");
    if (!(K > 0.0) || !std::isfinite(K)) throw ValidationError("K must be > 0");
    if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be >= 1");
    if (!(eps > 0.0) || !(eps <= 1.0)) throw ValidationError("eps must be in (0, 1]");
    if (!(rho_tilde > 0.0) || !std::isfinite(rho_tilde))
      throw ValidationError("rho_tilde must be > 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be > 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be >= 0");
    if (record_every < 1) throw ValidationError("record_every must be >= 1");
    if (!(cfl > 0.0)) throw ValidationError("cfl must be > 0");
    for (double h : H_tilde)
      if (!std::isfinite(h)) throw ValidationError("H_tilde must be finite");
  }
};

/// (rho, u, H) with H the full magnetic field, background included.
struct CompressibleState {
  double t = 0.0;
  RealField rho;
  RealVectorField u;
  SpectralVectorField H_hat;

  const Grid& grid() const { return rho.grid; }
};

inline double pressure(double rho, double K, double gamma) {
  if (!(rho > 0.0)) throw BlowupError("nonpositive density", 0.0);
  return gamma == 1.0 ? K * rho : K * std::pow(rho, gamma);
}

inline double pressure_derivative(double rho, double K, double gamma) {
  return gamma == 1.0 ? K : K * gamma * std::pow(rho, gamma - 1.0);
}

/// P = K rho^gamma pointwise; throws BlowupError on rho <= 0.
inline RealField pressure(const RealField& rho, double K, double gamma) {
  RealField out(rho.grid);
  for (std::size_t i = 0; i < rho.v.size(); ++i) {
    if (!(rho.v[i] > 0.0)) throw BlowupError("nonpositive density", 0.0);
    out.v[i] = pressure(rho.v[i], K, gamma);
  }
  return out;
}

/// Spectral conservative variables (rho, m = rho u, H).
struct ConservedState {
  double t = 0.0;
  SpectralField rho;
  SpectralVectorField m;
  SpectralVectorField H;
};

inline ConservedState to_conserved(const CompressibleState& s) {
  const Grid& g = s.grid();
  require_same_grid(g, s.u.grid);
  require_same_grid(g, s.H_hat.grid);
  RealVectorField m(g);
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < g.real_size(); ++i) m.c[j][i] = s.rho.v[i] * s.u.c[j][i];
  ConservedState c;
  c.t = s.t;
  c.rho = to_spectral(s.rho);
  c.m = to_spectral(m);
  c.H = s.H_hat;
  return c;
}

inline CompressibleState to_primitive(const ConservedState& c) {
  const Grid& g = c.rho.grid;
  CompressibleState s;
  s.t = c.t;
  s.rho = to_real(c.rho);
  const RealVectorField m = to_real(c.m);
  s.u = RealVectorField(g);
  for (std::size_t i = 0; i < g.real_size(); ++i) {
    const double r = s.rho.v[i];
    if (!(r > 0.0)) throw BlowupError("nonpositive density", c.t);
    for (int j = 0; j < 3; ++j) s.u.c[j][i] = m.c[j][i] / r;
  }
  s.H_hat = c.H;
  return s;
}

struct CompressibleRhs {
  SpectralField drho;
  SpectralVectorField dm;
  SpectralVectorField dH;
  // eps (max|u| + max|H|) + sqrt(P'(rho_max)), the acoustic CFL denominator
  double signal = 0.0;
  double rho_min = 0.0;
};

/// Conservative right-hand side:
///   drho = -div m
///   dm_j = -d_l [ m_j u_l + delta_jl (eps^-2 (P - P(rho_tilde)) + |H|^2/2) - H_j H_l ]
///          + mu Lap u_j + lambda_c d_j div u
///   dH_j = -d_l [ H_j u_l - u_j H_l ]
/// with u = m / rho and all products formed on the grid.
inline CompressibleRhs compressible_rhs(const ConservedState& c, const CompressibleParams& p) {
  const Grid& g = c.rho.grid;
  const std::size_t n = g.real_size();
  const RealField rho = to_real(c.rho);
  const RealVectorField m = to_real(c.m);
  const RealVectorField H = to_real(c.H);

  const double inv_eps2 = 1.0 / (p.eps * p.eps);
  const double p_ref = pressure(p.rho_tilde, p.K, p.gamma);

  RealVectorField u(g);
  // symmetric momentum flux, upper triangle (11, 22, 33, 12, 13, 23)
  std::array<std::vector<double>, 6> F;
  // antisymmetric induction flux G_jl = H_j u_l - u_j H_l: (12, 13, 23)
  std::array<std::vector<double>, 3> G;
  for (auto& f : F) f.resize(n);
  for (auto& f : G) f.resize(n);
  double umax = 0.0, hmax = 0.0, rho_max = 0.0;
  double rho_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = rho.v[i];
    if (!(r > 0.0) || !std::isfinite(r)) throw BlowupError("nonpositive density", c.t);
    rho_max = std::max(rho_max, r);
    rho_min = std::min(rho_min, r);
    double uu[3], hh[3];
    double u2 = 0.0, h2 = 0.0;
    for (int j = 0; j < 3; ++j) {
      uu[j] = m.c[j][i] / r;
      hh[j] = H.c[j][i];
      u.c[j][i] = uu[j];
      u2 += uu[j] * uu[j];
      h2 += hh[j] * hh[j];
    }
    umax = std::max(umax, u2);
    hmax = std::max(hmax, h2);
    const double iso = inv_eps2 * (pressure(r, p.K, p.gamma) - p_ref) + 0.5 * h2;
    F[0][i] = m.c[0][i] * uu[0] + iso - hh[0] * hh[0];
    F[1][i] = m.c[1][i] * uu[1] + iso - hh[1] * hh[1];
    F[2][i] = m.c[2][i] * uu[2] + iso - hh[2] * hh[2];
    F[3][i] = m.c[0][i] * uu[1] - hh[0] * hh[1];
    F[4][i] = m.c[0][i] * uu[2] - hh[0] * hh[2];
    F[5][i] = m.c[1][i] * uu[2] - hh[1] * hh[2];
    G[0][i] = hh[0] * uu[1] - uu[0] * hh[1];
    G[1][i] = hh[0] * uu[2] - uu[0] * hh[2];
    G[2][i] = hh[1] * uu[2] - uu[1] * hh[2];
  }

  std::array<std::vector<cplx>, 6> Fh;
  std::array<std::vector<cplx>, 3> Gh;
  for (int a = 0; a < 6; ++a) Fh[a] = to_spectral(g, F[a]);
  for (int a = 0; a < 3; ++a) Gh[a] = to_spectral(g, G[a]);
  const SpectralVectorField uh = to_spectral(u);

  static constexpr int sym[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
  CompressibleRhs out;
  out.drho = SpectralField(g);
  out.dm = SpectralVectorField(g);
  out.dH = SpectralVectorField(g);
  for_each_mode(g, [&](std::size_t i, const Mode& k) {
    if (detail::on_nyquist_plane(g, k)) return;
    const cplx ik[3] = {cplx(0.0, k[0]), cplx(0.0, k[1]), cplx(0.0, k[2])};
    const double k2 = detail::mode_k2(k);
    out.drho.v[i] = -(ik[0] * c.m.c[0][i] + ik[1] * c.m.c[1][i] + ik[2] * c.m.c[2][i]);
    const cplx div_u = ik[0] * uh.c[0][i] + ik[1] * uh.c[1][i] + ik[2] * uh.c[2][i];
    for (int j = 0; j < 3; ++j) {
      cplx flux{};
      for (int l = 0; l < 3; ++l) flux += ik[l] * Fh[sym[j][l]][i];
      out.dm.c[j][i] = -flux - p.mu * k2 * uh.c[j][i] + p.lambda_c * ik[j] * div_u;
    }
    // G as a full antisymmetric matrix
    const cplx g12 = Gh[0][i], g13 = Gh[1][i], g23 = Gh[2][i];
    out.dH.c[0][i] = -(ik[1] * g12 + ik[2] * g13);
    out.dH.c[1][i] = -(-ik[0] * g12 + ik[2] * g23);
    out.dH.c[2][i] = -(-ik[0] * g13 - ik[1] * g23);
  });
  if (p.dealias) {
    for (std::size_t i = 0; i < out.drho.v.size(); ++i)
      if (!dealias_keeps(g, g.mode(i))) out.drho.v[i] = cplx{};
    dealias_inplace(out.dm);
    dealias_inplace(out.dH);
  }
  out.signal = p.eps * (std::sqrt(umax) + std::sqrt(hmax)) +
               std::sqrt(pressure_derivative(rho_max, p.K, p.gamma));
  out.rho_min = rho_min;
  return out;
}

/// Right-hand side of (rho, m = rho u, H) for a primitive state.
inline CompressibleRhs rhs_compressible(const CompressibleState& s, const CompressibleParams& p) {
  ConservedState c = to_conserved(s);
  return compressible_rhs(c, p);
}

/// Acoustic CFL bound dt <= C dx eps / (eps (max|u| + max|H|) + sqrt(P'(rho_max))).
inline double compressible_cfl_limit(double signal, const Grid& g, const CompressibleParams& p) {
  return signal > 0.0 ? p.cfl * g.dx * p.eps / signal : std::numeric_limits<double>::infinity();
}

/// Explicit-viscosity bound dt <= 2.5 C rho_min / ((mu + lambda_c) |k|_max^2);
/// 2.5 sits inside the real-axis stability interval of RK4.
inline double compressible_viscous_limit(double rho_min, const Grid& g,
                                         const CompressibleParams& p) {
  const double nu = p.mu + p.lambda_c;
  if (!(nu > 0.0)) return std::numeric_limits<double>::infinity();
  const double kmax = resolved_kmax(g, p.dealias);
  return 2.5 * p.cfl * rho_min / (nu * 3.0 * kmax * kmax);
}

/// Smaller of the acoustic and viscous limits for a right-hand side evaluation.
inline double compressible_dt_limit(const CompressibleRhs& r, const Grid& g,
                                    const CompressibleParams& p) {
  return std::min(compressible_cfl_limit(r.signal, g, p),
                  compressible_viscous_limit(r.rho_min, g, p));
}

/// Fixed smooth perturbation profiles for well-prepared data.
struct Perturbations {
  int kmax = 1;
  std::uint64_t seed_psi = 11;
  std::uint64_t seed_chi = 12;
};

/// Well-prepared data around (u0, H0):
///   rho = rho_tilde + eps^2 phi, phi = c_phi (2 + sin x1), ||phi||_{H^3} = C_prep
///   u   = u0 + eps psi,  ||psi||_{H^4} = C_prep
///   H   = H0 + eps chi,  ||chi||_{H^3} = C_prep, div chi = 0
/// psi and chi are random solenoidal fields with max|k_j| <= kmax.
inline CompressibleState well_prepared_init(const RealVectorField& u0, const RealVectorField& H0,
                                            double eps, double rho_tilde, double C_prep,
                                            const Perturbations& pert = {}) {
  require_same_grid(u0.grid, H0.grid);
  const Grid& g = u0.grid;
  if (!(eps >= 0.0) || !(eps <= 1.0)) throw ValidationError("eps must be in [0, 1]");
  if (!(rho_tilde > 0.0)) throw ValidationError("rho_tilde must be > 0");
  if (!(C_prep >= 0.0) || !std::isfinite(C_prep)) throw ValidationError("C_prep must be >= 0");
  const SpectralVectorField u0h = to_spectral(u0);
  const SpectralVectorField H0h = to_spectral(H0);
  if (divergence_residual(u0h) > 1e-10) throw ValidationError("u0 is not divergence-free");
  if (divergence_residual(H0h) > 1e-10) throw ValidationError("H0 is not divergence-free");

  const RealField profile = sample_scalar(g, [](const Vec3& x) { return 2.0 + std::sin(x[0]); });
  const double c_phi = C_prep / sobolev_norm(to_spectral(profile), 3);

  SpectralVectorField psi = random_solenoidal(g, pert.kmax, pert.seed_psi);
  SpectralVectorField chi = random_solenoidal(g, pert.kmax, pert.seed_chi);
  const double npsi = std::sqrt(detail::weighted_square(
      psi, [](double k2) { return (1.0 + k2) * (1.0 + k2) * (1.0 + k2) * (1.0 + k2); }, true));
  scale(psi, C_prep / npsi);
  scale(chi, C_prep / sobolev_norm(chi, 3));
  const RealVectorField psi_r = to_real(psi);

  CompressibleState s;
  s.rho = RealField(g);
  for (std::size_t i = 0; i < g.real_size(); ++i)
    s.rho.v[i] = rho_tilde + eps * eps * c_phi * profile.v[i];
  s.u = u0;
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < g.real_size(); ++i) s.u.c[j][i] += eps * psi_r.c[j][i];
  s.H_hat = H0h;
  axpy(s.H_hat, eps, chi);
  s.H_hat.solenoidal = true;
  return s;
}

namespace detail {

inline ConservedState add_scaled(const ConservedState& a, double h, const CompressibleRhs& r) {
  ConservedState out = a;
  for (std::size_t i = 0; i < out.rho.v.size(); ++i) out.rho.v[i] += h * r.drho.v[i];
  axpy(out.m, h, r.dm);
  axpy(out.H, h, r.dH);
  return out;
}

} // namespace detail

/// One classical RK4 step of the conservative system; H is re-projected after
/// the step.
inline ConservedState step_conserved(const ConservedState& c, const CompressibleParams& p) {
  const double dt = p.dt;
  const CompressibleRhs k1 = compressible_rhs(c, p);
  const double limit = compressible_dt_limit(k1, c.rho.grid, p);
  if (dt > limit) {
    const std::string msg = "compressible CFL violated: dt=" + std::to_string(dt) + " > " +
                            std::to_string(limit);
    if (p.cfl_policy == CflPolicy::Error) throw CflError(msg, c.t);
    if (p.cfl_policy == CflPolicy::Warn) {
      static bool warned = false;
      if (!warned) std::cerr << "warning: " << msg << " at t=" << c.t << "\n";
      warned = true;
    }
  }
  const CompressibleRhs k2 = compressible_rhs(detail::add_scaled(c, 0.5 * dt, k1), p);
  const CompressibleRhs k3 = compressible_rhs(detail::add_scaled(c, 0.5 * dt, k2), p);
  const CompressibleRhs k4 = compressible_rhs(detail::add_scaled(c, dt, k3), p);

  ConservedState out = c;
  out.t = c.t + dt;
  const double w[4] = {dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0};
  const CompressibleRhs* ks[4] = {&k1, &k2, &k3, &k4};
  for (int s = 0; s < 4; ++s) {
    for (std::size_t i = 0; i < out.rho.v.size(); ++i) out.rho.v[i] += w[s] * ks[s]->drho.v[i];
    axpy(out.m, w[s], ks[s]->dm);
    axpy(out.H, w[s], ks[s]->dH);
  }
  leray_project_inplace(out.H);
  for (const cplx& z : out.rho.v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw BlowupError("non-finite density", out.t);
  if (!all_finite(out.m) || !all_finite(out.H)) throw BlowupError("non-finite state", out.t);
  return out;
}

inline CompressibleState step_compressible(const CompressibleState& s, const CompressibleParams& p) {
  return to_primitive(step_conserved(to_conserved(s), p));
}

struct CompressibleRecord {
  double t = 0.0;
  double mass = 0.0;                 // int rho
  std::array<double, 3> momentum{};  // int rho u
  std::array<double, 3> mean_H{};    // box average of H
  double E_kin = 0.0;                // 1/2 int rho |u|^2
  double E_mag = 0.0;                // 1/2 int |H - H_tilde|^2
  double div_H = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
};

inline CompressibleRecord make_compressible_record(const ConservedState& c,
                                                   const CompressibleParams& p) {
  const Grid& g = c.rho.grid;
  CompressibleRecord r;
  r.t = c.t;
  r.mass = g.volume() * c.rho.v[0].real();
  for (int j = 0; j < 3; ++j) {
    r.momentum[j] = g.volume() * c.m.c[j][0].real();
    r.mean_H[j] = c.H.c[j][0].real();
  }
  const RealField rho = to_real(c.rho);
  const RealVectorField m = to_real(c.m);
  double ek = 0.0;
  r.rho_min = std::numeric_limits<double>::infinity();
  r.rho_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.real_size(); ++i) {
    const double m2 = m.c[0][i] * m.c[0][i] + m.c[1][i] * m.c[1][i] + m.c[2][i] * m.c[2][i];
    ek += 0.5 * m2 / rho.v[i];
    r.rho_min = std::min(r.rho_min, rho.v[i]);
    r.rho_max = std::max(r.rho_max, rho.v[i]);
  }
  r.E_kin = ek * g.cell_volume();
  SpectralVectorField B = c.H;
  for (int j = 0; j < 3; ++j) B.c[j][0] -= p.H_tilde[j];
  r.E_mag = 0.5 * std::pow(l2_norm(B), 2);
  r.div_H = divergence_residual(c.H);
  return r;
}

inline CompressibleRecord make_compressible_record(const CompressibleState& s,
                                                   const CompressibleParams& p) {
  return make_compressible_record(to_conserved(s), p);
}

struct CompressibleTrajectory {
  std::vector<CompressibleRecord> records;
  CompressibleState final_state;
  ConservedState final_conserved;
};

class CompressibleAborted : public std::runtime_error {
public:
  CompressibleAborted(const std::string& what, double t, CompressibleTrajectory partial)
      : std::runtime_error(what), time_(t), partial_(std::move(partial)) {}
  double time() const noexcept { return time_; }
  // final_state / final_conserved hold the last good state
  const CompressibleTrajectory& partial() const noexcept { return partial_; }

private:
  double time_;
  CompressibleTrajectory partial_;
};

/// Integrates the conservative variables to params.t_end with fixed steps
/// (the last possibly shorter), recording at the start, every record_every
/// steps and at the end.
inline CompressibleTrajectory run_conserved(
    const ConservedState& initial, const CompressibleParams& params,
    const std::function<void(const ConservedState&, long)>& on_step = {}) {
  params.validate();
  if (params.t_end < initial.t) throw ValidationError("t_end precedes the initial time");
  CompressibleTrajectory traj;
  ConservedState c = initial;
  auto finish = [&] {
    traj.final_conserved = c;
    traj.final_state = to_primitive(c);
  };
  traj.records.push_back(make_compressible_record(c, params));
  const long nsteps = step_count(initial.t, params.t_end, params.dt);
  CompressibleParams p = params;
  for (long i = 1; i <= nsteps; ++i) {
    const bool last = (i == nsteps);
    p.dt = last ? params.t_end - c.t : params.dt;
    try {
      ConservedState next = step_conserved(c, p);
      if (last) next.t = params.t_end;
      if (last || i % params.record_every == 0)
        traj.records.push_back(make_compressible_record(next, params));
      c = std::move(next);
    } catch (const BlowupError& e) {
      finish();
      throw CompressibleAborted(e.what(), c.t, traj);
    } catch (const CflError& e) {
      finish();
      throw CompressibleAborted(e.what(), c.t, traj);
    }
    if (on_step) on_step(c, i);
  }
  finish();
  return traj;
}

inline CompressibleTrajectory run_compressible(
    const CompressibleState& initial, const CompressibleParams& params,
    const std::function<void(const CompressibleState&, long)>& on_step = {}) {
  if (!on_step) return run_conserved(to_conserved(initial), params);
  return run_conserved(to_conserved(initial), params,
                       [&](const ConservedState& c, long i) { on_step(to_primitive(c), i); });
}

/// Uniform state (rho_tilde, 0, H_tilde).
inline CompressibleState uniform_state(const Grid& g, const CompressibleParams& p) {
  CompressibleState s;
  s.rho = RealField(g);
  for (double& r : s.rho.v) r = p.rho_tilde;
  s.u = RealVectorField(g);
  s.H_hat = SpectralVectorField(g);
  for (int j = 0; j < 3; ++j) s.H_hat.c[j][0] = p.H_tilde[j];
  s.H_hat.solenoidal = true;
  return s;
}

} // namespace mhd
