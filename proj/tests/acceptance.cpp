// Acceptance runs: one PASS/FAIL line per criterion.
//
//   acceptance [--strict] [criterion ...]
//
// Exit status is nonzero when a criterion outside kKnownFailures fails, or
// when any criterion fails under --strict.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "mhd/compressible.hpp"
#include "mhd/csv.hpp"
#include "mhd/diagnostics.hpp"
#include "mhd/limit.hpp"
#include "mhd/presets.hpp"
#include "mhd/simulation.hpp"
#include "test_support.hpp"

using namespace mhd;
using namespace mhd::test;

namespace {

const std::set<int> kKnownFailures = {9};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fix(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Budget checks collected from every completed incompressible run.
struct BudgetLog {
  double worst_ratio = 0.0;    // cum / E0
  double worst_closure = 0.0;  // |E0 - E_T - cum| / E0
  int runs = 0;

  void add(const Trajectory& tr) {
    const DissipationBudget b = dissipation_budget(tr.records);
    worst_ratio = std::max(worst_ratio, b.E0 > 0.0 ? b.cum_dissipation / b.E0 : 0.0);
    worst_closure = std::max(worst_closure, b.closure_error());
    ++runs;
  }
};

BudgetLog budgets;

// Alfven-mode run shared by criteria 1, 2, 5
const Trajectory& alfven_run() {
  static const Trajectory tr = [] {
    SolverParams p;
    p.lambda = 0.1;
    p.dt = 1e-3;
    p.t_end = 1.0;
    p.record_every = 1;
    const Trajectory t = run(make_preset(make_grid(32), {"alfven-mode", 1e-2, {1, 0, 0}}), p);
    budgets.add(t);
    return t;
  }();
  return tr;
}

// Single-mode perturbation about (0, H_tilde) with u and B of different size
struct LinearProblem {
  Grid g = make_grid(16);
  Mode k = {2, 1, 1};
  Vec3 e = transverse_unit({2, 1, 1});
  double a_u = 1e-6;
  double a_B = 0.5e-6;
  SolverParams p;

  LinearProblem() {
    p.lambda = 0.1;
    p.t_end = 1.0;
  }

  SimState initial() const {
    const RealVectorField u = sample_field(g, [&](const Vec3& x) {
      const double s = std::sin(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
      return Vec3{a_u * s * e[0], a_u * s * e[1], a_u * s * e[2]};
    });
    const RealVectorField B = sample_field(g, [&](const Vec3& x) {
      const double s = std::sin(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
      return Vec3{a_B * s * e[0], a_B * s * e[1], a_B * s * e[2]};
    });
    return make_state(u, B);
  }

  Trajectory solve(double dt) const {
    SolverParams q = p;
    q.dt = dt;
    return run(initial(), q);
  }

  double error(const Trajectory& tr) const {
    const auto [u_ref, B_ref] = linear_mode_solution(g, k, e, a_u, a_B, p.lambda, p.H_tilde, p.t_end);
    return relative_l2_error(tr.final_state, u_ref, B_ref);
  }
};

const std::vector<double>& linear_errors() {
  static const std::vector<double> errs = [] {
    const LinearProblem lp;
    std::vector<double> out;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
      const Trajectory tr = lp.solve(dt);
      budgets.add(tr);
      out.push_back(lp.error(tr));
    }
    return out;
  }();
  return errs;
}

const Trajectory& small_data_run() {
  static const Trajectory tr = [] {
    const Grid g = make_grid(16);
    SimState s0 = make_preset(g, {"random-bandlimited", 1.0, {1, 0, 0}, 2, 7});
    scale_to_h2_sum(s0, 1e-3);
    SolverParams p;
    p.lambda = 0.1;
    p.dt = 1e-3;
    p.t_end = 10.0;
    const Trajectory t = run(s0, p);
    budgets.add(t);
    return t;
  }();
  return tr;
}

CompressibleParams conservation_params(const CompressibleState& s0) {
  CompressibleParams cp;
  cp.eps = 0.1;
  cp.t_end = 0.5;
  cp.record_every = 10;
  cp.dt = sweep_step(s0, cp, cp.t_end, 0.8);
  return cp;
}

CompressibleState conservation_initial() {
  SweepConfig c;
  const auto [u0, H0] = sweep_initial_data(c);
  return well_prepared_init(u0, H0, 0.1, 1.0, 1.0);
}

Outcome criterion1() {
  const Trajectory& tr = alfven_run();
  const double E0 = tr.records.front().energy();
  const double r = energy_balance_residual(tr.records) / E0;
  return {r < 1e-6, "relative residual " + sci(r) + " over " +
                        std::to_string(tr.records.size()) + " records"};
}

Outcome criterion2() {
  double m = 0.0;
  for (const auto& r : alfven_run().records) m = std::max({m, r.div_u, r.div_B});
  return {m < 1e-11, "max relative divergence " + sci(m)};
}

Outcome criterion3() {
  const double e = linear_errors().back();
  return {e < 1e-3, "relative L2 error at T=1 (dt=1e-3) " + sci(e)};
}

Outcome criterion4() {
  const auto& e = linear_errors();
  const double o1 = std::log2(e[0] / e[1]);
  const double o2 = std::log2(e[1] / e[2]);
  const bool ok = o1 >= 3.5 && o1 <= 4.5 && o2 >= 3.5 && o2 <= 4.5;
  return {ok, "errors " + sci(e[0]) + ", " + sci(e[1]) + ", " + sci(e[2]) + "; orders " +
                  fix(o1) + ", " + fix(o2)};
}

Outcome criterion5() {
  alfven_run();
  linear_errors();
  small_data_run();
  const bool ok = budgets.worst_ratio <= 1.0 + 1e-6 && budgets.worst_closure < 1e-5;
  return {ok, std::to_string(budgets.runs) + " runs; max cum/E0 " + sci(budgets.worst_ratio) +
                  ", max closure " + sci(budgets.worst_closure)};
}

Outcome criterion6() {
  const auto& rec = small_data_run().records;
  const double X0 = rec.front().X;
  double x_ratio = 0.0;
  double rise = 0.0;  // largest increase of the combined H^2 norm above its running minimum
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& r : rec) {
    x_ratio = std::max(x_ratio, r.X / X0);
    const double h2 = std::hypot(r.hs_norms[0][2], r.hs_norms[1][2]);
    lowest = std::min(lowest, h2);
    rise = std::max(rise, h2 - lowest);
  }
  const double h20 = rec.front().hs_norms[0][2] + rec.front().hs_norms[1][2];
  return {x_ratio <= 2.0 && rise <= 1e-6,
          "H2 sum at t=0 " + sci(h20) + "; max X/X(0) " + fix(x_ratio) +
              "; max rise of (|u|^2_H2+|B|^2_H2)^1/2 " + sci(rise)};
}

Outcome criterion7() {
  const Grid g = make_grid(32);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const int kmax = 1 + static_cast<int>(seed % 15);
    worst = std::max(worst, identity_residual(random_solenoidal(g, kmax, seed)));
  }
  return {worst < 1e-10, "100 fields, max relative residual " + sci(worst)};
}

const CompressibleTrajectory& compressible_run() {
  static const CompressibleTrajectory tr = [] {
    const CompressibleState s0 = conservation_initial();
    return run_compressible(s0, conservation_params(s0));
  }();
  return tr;
}

Outcome criterion8() {
  const auto& rec = compressible_run().records;
  double mass = 0.0, div = 0.0;
  for (const auto& r : rec) {
    mass = std::max(mass, std::abs(r.mass - rec.front().mass) / rec.front().mass);
    div = std::max(div, r.div_H);
  }
  return {mass < 1e-10 && div < 1e-11,
          "eps 0.1, t=" + fix(rec.back().t) + ": mass drift " + sci(mass) + ", div H " + sci(div)};
}

Outcome criterion9() {
  const SweepResult r = run_sweep(SweepConfig{});
  std::string d;
  bool decreasing = true;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const SweepRow& row = r.rows[i];
    d += "eps " + fix(row.eps) + ": e_u " + sci(row.e_u) + " e_H " + sci(row.e_H) + "; ";
    if (i > 0)
      decreasing = decreasing && row.e_u < r.rows[i - 1].e_u && row.e_H < r.rows[i - 1].e_H;
  }
  bool in_band = true;
  d += "orders u/H";
  for (const OrderRow& o : observed_order(r)) {
    for (const Order& x : {o.u, o.H})
      in_band = in_band && !x.exact && x.value >= 0.7 && x.value <= 2.5;
    d += " " + fix(o.u.value) + "/" + fix(o.H.value);
  }
  return {decreasing && in_band, d};
}

Outcome criterion10() {
  const LinearProblem lp;
  const bool inc = records_csv(lp.solve(1e-3).records) == records_csv(lp.solve(1e-3).records);
  const CompressibleState s0 = conservation_initial();
  const std::string again = compressible_csv(run_compressible(s0, conservation_params(s0)).records);
  const bool comp = again == compressible_csv(compressible_run().records);
  return {inc && comp, std::string("linear-wave CSV ") + (inc ? "bitwise identical" : "differs") +
                           ", compressible CSV " + (comp ? "bitwise identical" : "differs")};
}

} // namespace

int main(int argc, char** argv) {
  bool strict = false;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--strict") {
      strict = true;
    } else {
      const int id = std::atoi(a.c_str());
      if (id < 1 || id > 10) {
        std::cerr << "usage: acceptance [--strict] [criterion 1-10 ...]\n";
        return 2;
      }
      only.insert(id);
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"energy law", criterion1},
      {"divergence-free", criterion2},
      {"linear-wave oracle", criterion3},
      {"temporal order", criterion4},
      {"dissipation budget", criterion5},
      {"small-data boundedness", criterion6},
      {"vector identity", criterion7},
      {"compressible conservation", criterion8},
      {"incompressible limit", criterion9},
      {"reproducibility", criterion10},
  };

  int unexpected = 0, failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string tag = o.pass ? "PASS" : "FAIL";
    if (!o.pass) {
      ++failed;
      if (kKnownFailures.count(id)) tag += " (known)";
      else ++unexpected;
    }
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", tag.c_str(), id,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d failed, %d unexpected\n", failed, unexpected);
  return (strict ? failed : unexpected) == 0 ? 0 : 1;
}
