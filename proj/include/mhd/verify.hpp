#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "mhd/compressible.hpp"
#include "mhd/csv.hpp"
#include "mhd/diagnostics.hpp"
#include "mhd/presets.hpp"
#include "mhd/simulation.hpp"
#include "mhd/snapshot.hpp"

// Invariant suite behind the `verify` command: short runs on a small grid.

namespace mhd {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Exact solution of u' = -a u + i w B, B' = i w u over time t, applied to
// every mode of a state whose nonlinear terms vanish.
inline SimState propagate_linear(const SimState& s, double lambda, const Vec3& H, double t) {
  SimState out = s;
  out.t = s.t + t;
  const Grid& g = s.grid();
  for_each_mode(g, [&](std::size_t i, const Mode& k) {
    const double a = lambda * mode_k2(k);
    const double w = k[0] * H[0] + k[1] * H[1] + k[2] * H[2];
    const cplx tau(-0.5 * a, 0.0);
    const cplx delta = std::sqrt(cplx(0.25 * a * a - w * w, 0.0));
    const cplx e = std::exp(tau * t);
    const cplx c = std::cosh(delta * t);
    const cplx sh = std::abs(delta) > 1e-12 ? std::sinh(delta * t) / delta : cplx(t, 0.0);
    // exp(Mt) = e^{tau t} (cosh(dt) I + sinh(dt)/d (M - tau I))
    const cplx m00 = e * (c + sh * (-a - tau));
    const cplx m01 = e * sh * cplx(0.0, w);
    const cplx m10 = m01;
    const cplx m11 = e * (c - sh * tau);
    for (int j = 0; j < 3; ++j) {
      const cplx u = s.u.c[j][i], b = s.B.c[j][i];
      out.u.c[j][i] = m00 * u + m01 * b;
      out.B.c[j][i] = m10 * u + m11 * b;
    }
  });
  return out;
}

inline std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace detail

inline std::vector<CheckResult> run_verify_suite(int n = 16) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };
  const Grid g = make_grid(n);

  // Alfven mode: energy law, solenoidality, dissipation budget, linear solution
  SolverParams p;
  p.lambda = 0.1;
  p.dt = 1e-3;
  p.t_end = 0.2;
  p.record_every = 10;
  const SimState a0 = make_preset(g, {"alfven-mode", 1e-2, {1, 0, 0}});
  const Trajectory tr = run(a0, p);
  const double E0 = tr.records.front().energy();
  const double law = energy_balance_residual(tr.records) / E0;
  add("energy law", law < 1e-6, "relative residual " + detail::sci(law));
  double div = 0.0;
  for (const auto& r : tr.records) div = std::max({div, r.div_u, r.div_B});
  add("divergence-free", div < 1e-11, "max relative divergence " + detail::sci(div));
  const DissipationBudget budget = dissipation_budget(tr.records);
  add("dissipation budget", budget.ok && budget.closure_error() < 1e-5,
      "closure " + detail::sci(budget.closure_error()));
  const SimState lin = detail::propagate_linear(a0, p.lambda, p.H_tilde, p.t_end);
  const double lin_err =
      std::hypot(l2_norm(difference(tr.final_state.u, lin.u)), l2_norm(difference(tr.final_state.B, lin.B))) /
      std::hypot(l2_norm(lin.u), l2_norm(lin.B));
  add("linear Alfven mode", lin_err < 1e-6, "relative L2 error " + detail::sci(lin_err));

  // steady state
  SolverParams ps;
  ps.t_end = 0.05;
  const Trajectory st = run(zero_state(g), ps);
  double drift = 0.0;
  for (const auto& r : st.records) drift = std::max(drift, r.energy());
  add("steady state", drift == 0.0, "max energy " + detail::sci(drift));

  // identity on random solenoidal fields
  double id = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    id = std::max(id, identity_residual(random_solenoidal(g, 4, seed)));
  add("vector identity", id < 1e-10, "max relative residual " + detail::sci(id));

  // compressible conservation
  CompressibleParams cp;
  cp.eps = 0.1;
  cp.t_end = 0.05;
  cp.dt = 1e-3;
  cp.record_every = 10;
  const SimState tg = make_preset(g, {"taylor-green-mhd", 0.05});
  RealVectorField H0 = to_real(tg.B);
  for (int j = 0; j < 3; ++j)
    for (double& v : H0.c[j]) v += cp.H_tilde[j];
  const CompressibleState c0 = well_prepared_init(to_real(tg.u), H0, cp.eps, cp.rho_tilde, 1.0);
  const CompressibleTrajectory ct = run_compressible(c0, cp);
  double mass = 0.0, divH = 0.0;
  for (const auto& r : ct.records) {
    mass = std::max(mass, std::abs(r.mass - ct.records.front().mass) / ct.records.front().mass);
    divH = std::max(divH, r.div_H);
  }
  add("compressible conservation", mass < 1e-10 && divH < 1e-11,
      "mass drift " + detail::sci(mass) + ", div H " + detail::sci(divH));

  // snapshot round trip and determinism
  namespace fs = std::filesystem;
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  const fs::path dir = fs::temp_directory_path() / ("mhd_verify_" + std::to_string(stamp));
  fs::create_directories(dir);
  const std::string f1 = (dir / "a.bin").string(), f2 = (dir / "b.bin").string();
  write_snapshot(f1, to_snapshot(tr.final_state, tr.records.back().cum_dissipation));
  write_snapshot(f2, read_snapshot(f1));
  const std::string c1 = (dir / "c.bin").string(), c2 = (dir / "d.bin").string();
  write_snapshot(c1, to_snapshot(ct.final_conserved));
  write_snapshot(c2, read_snapshot(c1));
  const bool same = detail::read_bytes(f1) == detail::read_bytes(f2) &&
                    detail::read_bytes(c1) == detail::read_bytes(c2);
  fs::remove_all(dir);
  add("snapshot round trip", same, same ? "byte-identical" : "files differ");
  const bool repeat = records_csv(run(a0, p).records) == records_csv(tr.records) &&
                      compressible_csv(run_compressible(c0, cp).records) == compressible_csv(ct.records);
  add("determinism", repeat, repeat ? "CSV bitwise identical" : "CSV differs");
  return out;
}

} // namespace mhd
