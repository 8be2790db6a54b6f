#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mhd/compressible.hpp"
#include "mhd/diagnostics.hpp"
#include "mhd/presets.hpp"
#include "mhd/simulation.hpp"

namespace mhd {

struct SweepConfig {
  std::vector<double> eps_list = {0.2, 0.1, 0.05};
  double T = 0.5;
  int n = 32;
  PresetSpec preset{"taylor-green-mhd", 0.005};
  double C_prep = 1.0;
  Perturbations perturbations;
  // ||u0||_{H^3} + ||H0 - H_tilde||_{H^3} must not exceed this
  double max_h3 = 1.0;
  // compressible dt = T / ceil(T / (dt_safety * step limit at t = 0))
  double dt_safety = 0.8;
  SolverParams incompressible;
  CompressibleParams compressible;

  void validate() const {
    if (eps_list.empty()) throw ValidationError("eps_list must not be empty");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
      const double e = eps_list[i];
      if (!(e > 0.0) || !(e <= 1.0)) throw ValidationError("eps_list entries must be in (0, 1]");
      if (i > 0 && !(e < eps_list[i - 1]))
        throw ValidationError("eps_list must be strictly decreasing");
    }
    if (!(T >= 0.0) || !std::isfinite(T)) throw ValidationError("T must be >= 0");
    if (n < 4 || n % 2 != 0) throw ValidationError("n must be even and >= 4");
    if (!(C_prep >= 0.0) || !std::isfinite(C_prep)) throw ValidationError("C_prep must be >= 0");
    if (!(max_h3 > 0.0)) throw ValidationError("max_h3 must be > 0");
    if (!(dt_safety > 0.0) || !(dt_safety <= 1.0))
      throw ValidationError("dt_safety must be in (0, 1]");
    incompressible.validate();
    compressible.validate();
    if (compressible.mu != incompressible.lambda)
      throw ValidationError("compressible.mu must equal incompressible.lambda");
    if (compressible.H_tilde != incompressible.H_tilde)
      throw ValidationError("compressible.H_tilde must equal incompressible.H_tilde");
    if (compressible.rho_tilde != 1.0)
      throw ValidationError("compressible.rho_tilde must be 1 for the limit comparison");
    if (compressible.dealias != incompressible.dealias)
      throw ValidationError("both systems must use the same dealias setting");
  }
};

struct SweepRow {
  double eps = 0.0;
  double e_u = 0.0;    // ||u^eps(T) - u(T)||
  double e_H = 0.0;    // ||H^eps(T) - H(T)||
  double e_rho = 0.0;  // ||rho^eps(T) - rho_tilde||
  // max over compressible steps of max(Ec/Ei, Ei/Ec), energies excluding H_tilde
  double energy_factor = 1.0;
  double dt = 0.0;
  long steps = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double incompressible_energy_T = 0.0;
};

class SweepAborted : public std::runtime_error {
public:
  SweepAborted(const std::string& what, double eps, SweepResult partial)
      : std::runtime_error(what), eps_(eps), partial_(std::move(partial)) {}
  // eps of the failing run, 0 for the incompressible reference
  double eps() const noexcept { return eps_; }
  const SweepResult& partial() const noexcept { return partial_; }

private:
  double eps_;
  SweepResult partial_;
};

namespace detail {

inline double compressible_energy(const CompressibleState& s, const Vec3& H_tilde) {
  const Grid& g = s.grid();
  double ek = 0.0;
  for (std::size_t i = 0; i < g.real_size(); ++i) {
    double u2 = 0.0;
    for (int j = 0; j < 3; ++j) u2 += s.u.c[j][i] * s.u.c[j][i];
    ek += 0.5 * s.rho.v[i] * u2;
  }
  SpectralVectorField B = s.H_hat;
  for (int j = 0; j < 3; ++j) B.c[j][0] -= H_tilde[j];
  return ek * g.cell_volume() + 0.5 * std::pow(l2_norm(B), 2);
}

// Piecewise-linear interpolation on strictly increasing t.
inline double interpolate(const std::vector<std::pair<double, double>>& series, double t) {
  if (t <= series.front().first) return series.front().second;
  if (t >= series.back().first) return series.back().second;
  auto it = std::lower_bound(series.begin(), series.end(), t,
                             [](const auto& a, double v) { return a.first < v; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (t - lo.first) / (hi.first - lo.first);
  return (1.0 - w) * lo.second + w * hi.second;
}

inline double ratio_factor(double a, double b) {
  if (a == b) return 1.0;
  if (!(a > 0.0) || !(b > 0.0)) return std::numeric_limits<double>::infinity();
  return std::max(a / b, b / a);
}

} // namespace detail

/// Shared divergence-free data (u0, H0 = H_tilde + B0) of a sweep.
inline std::pair<RealVectorField, RealVectorField> sweep_initial_data(const SweepConfig& cfg) {
  const Grid g = make_grid(cfg.n);
  const SimState s = make_preset(g, cfg.preset);
  RealVectorField H0 = to_real(s.B);
  for (int j = 0; j < 3; ++j)
    for (double& v : H0.c[j]) v += cfg.incompressible.H_tilde[j];
  return {to_real(s.u), H0};
}

/// Compressible step size for one eps: the largest T / N below
/// dt_safety times the step limit of the initial state.
inline double sweep_step(const CompressibleState& s0, const CompressibleParams& p, double T,
                         double safety) {
  const double limit = compressible_dt_limit(rhs_compressible(s0, p), s0.grid(), p);
  if (!(T > 0.0)) return safety * limit;
  return T / std::ceil(T / (safety * limit));
}

/// One incompressible reference run and one compressible run per eps from
/// well-prepared data around the same (u0, H0); errors in L^2 at time T.
inline SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const Grid g = make_grid(cfg.n);
  SimState ref0 = make_preset(g, cfg.preset);
  const double h3 = sobolev_norm(ref0.u, 3) + sobolev_norm(ref0.B, 3);
  if (h3 > cfg.max_h3)
    throw ValidationError("shared data too large: H^3 norm " + std::to_string(h3) +
                          " exceeds max_h3");
  const auto [u0, H0] = sweep_initial_data(cfg);

  SweepResult result;
  SolverParams ip = cfg.incompressible;
  ip.t_end = cfg.T;
  ip.record_every = std::numeric_limits<int>::max();
  std::vector<std::pair<double, double>> e_inc;
  {
    const auto [ek, em] = energy(ref0);
    e_inc.emplace_back(0.0, ek + em);
  }
  RunOptions opts;
  opts.on_step = [&](const SimState& s, long) {
    const auto [ek, em] = energy(s);
    e_inc.emplace_back(s.t, ek + em);
  };
  SimState ref;
  try {
    ref = run(ref0, ip, opts).final_state;
  } catch (const IntegrationAborted& e) {
    throw SweepAborted(std::string("incompressible reference: ") + e.what(), 0.0, result);
  }
  result.incompressible_energy_T = e_inc.back().second;
  const RealVectorField u_ref = to_real(ref.u);
  SpectralVectorField H_ref = ref.B;
  for (int j = 0; j < 3; ++j) H_ref.c[j][0] += cfg.incompressible.H_tilde[j];

  for (double eps : cfg.eps_list) {
    CompressibleParams cp = cfg.compressible;
    cp.eps = eps;
    cp.t_end = cfg.T;
    cp.record_every = std::numeric_limits<int>::max();
    const CompressibleState s0 =
        well_prepared_init(u0, H0, eps, cp.rho_tilde, cfg.C_prep, cfg.perturbations);
    cp.dt = sweep_step(s0, cp, cfg.T, cfg.dt_safety);

    SweepRow row;
    row.eps = eps;
    row.dt = cp.dt;
    row.steps = step_count(0.0, cfg.T, cp.dt);
    row.energy_factor = detail::ratio_factor(detail::compressible_energy(s0, cp.H_tilde),
                                             e_inc.front().second);
    CompressibleState sT;
    try {
      sT = run_compressible(s0, cp, [&](const CompressibleState& s, long) {
                 const double ec = detail::compressible_energy(s, cp.H_tilde);
                 row.energy_factor = std::max(
                     row.energy_factor, detail::ratio_factor(ec, detail::interpolate(e_inc, s.t)));
               }).final_state;
    } catch (const CompressibleAborted& e) {
      throw SweepAborted(std::string("compressible run: ") + e.what(), eps, result);
    }

    RealVectorField du = sT.u;
    for (int j = 0; j < 3; ++j)
      for (std::size_t i = 0; i < g.real_size(); ++i) du.c[j][i] -= u_ref.c[j][i];
    row.e_u = l2_norm(to_spectral(du));
    row.e_H = l2_norm(difference(sT.H_hat, H_ref));
    RealField drho = sT.rho;
    for (double& r : drho.v) r -= cp.rho_tilde;
    row.e_rho = l2_norm(to_spectral(drho));
    result.rows.push_back(row);
  }
  return result;
}

/// log2(e_coarse / e_fine); exact is set when either error is zero.
struct Order {
  double value = 0.0;
  bool exact = false;
};

inline Order order_from_errors(double e_coarse, double e_fine) {
  if (!(e_coarse >= 0.0) || !(e_fine >= 0.0)) throw ValidationError("errors must be >= 0");
  if (e_coarse == 0.0 || e_fine == 0.0) return {0.0, true};
  return {std::log2(e_coarse / e_fine), false};
}

struct OrderRow {
  double eps_coarse = 0.0;
  double eps_fine = 0.0;
  Order u, H, rho;
};

/// Orders between consecutive rows; each pair must satisfy eps_coarse = 2 eps_fine.
inline std::vector<OrderRow> observed_order(const SweepResult& r) {
  if (r.rows.size() < 2) throw ValidationError("observed_order needs at least two eps values");
  std::vector<OrderRow> out;
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const SweepRow& a = r.rows[i - 1];
    const SweepRow& b = r.rows[i];
    if (std::abs(a.eps - 2.0 * b.eps) > 1e-12 * a.eps)
      throw ValidationError("consecutive eps values must differ by a factor of 2");
    out.push_back({a.eps, b.eps, order_from_errors(a.e_u, b.e_u),
                   order_from_errors(a.e_H, b.e_H), order_from_errors(a.e_rho, b.e_rho)});
  }
  return out;
}

} // namespace mhd
