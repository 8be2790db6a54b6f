#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mhd/limit.hpp"
#include "test_support.hpp"

using namespace mhd;

namespace {

// sum_k w_k (1+|k|^2)^s |f_k|^2 times the box volume, looped directly
double hs(const SpectralVectorField& f, int s) {
  double sum = 0.0;
  for_each_mode(f.grid, [&](std::size_t i, const Mode& k) {
    const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    for (int j = 0; j < 3; ++j)
      sum += f.grid.weight(i) * std::pow(1.0 + k2, s) * std::norm(f.c[j][i]);
  });
  return std::sqrt(f.grid.volume() * sum);
}

// Relative internal energy Phi(rho) = rho int_{rho_t}^{rho} (P(s) - P(rho_t)) / s^2 ds.
double phi(double rho, const CompressibleParams& p) {
  const double pt = p.K * std::pow(p.rho_tilde, p.gamma);
  const double a = p.gamma == 1.0
                       ? p.K * std::log(rho / p.rho_tilde)
                       : p.K * (std::pow(rho, p.gamma - 1.0) - std::pow(p.rho_tilde, p.gamma - 1.0)) /
                             (p.gamma - 1.0);
  return rho * (a + pt * (1.0 / rho - 1.0 / p.rho_tilde));
}

// kinetic + magnetic perturbation + eps^-2 internal energy, on the grid
double total_energy(const CompressibleState& s, const CompressibleParams& p) {
  const Grid& g = s.grid();
  const RealVectorField H = to_real(s.H_hat);
  double e = 0.0;
  for (std::size_t i = 0; i < g.real_size(); ++i) {
    double u2 = 0.0, b2 = 0.0;
    for (int j = 0; j < 3; ++j) {
      u2 += s.u.c[j][i] * s.u.c[j][i];
      const double b = H.c[j][i] - p.H_tilde[j];
      b2 += b * b;
    }
    e += 0.5 * s.rho.v[i] * u2 + 0.5 * b2 + phi(s.rho.v[i], p) / (p.eps * p.eps);
  }
  return e * g.cell_volume();
}

SweepConfig small_config() {
  SweepConfig c;
  c.n = 16;
  c.T = 0.1;
  c.eps_list = {0.4, 0.2};
  c.preset = {"taylor-green-mhd", 0.005};
  return c;
}

} // namespace

TEST(ObservedOrder, Arithmetic) {
  EXPECT_DOUBLE_EQ(order_from_errors(0.4, 0.2).value, 1.0);
  EXPECT_DOUBLE_EQ(order_from_errors(0.4, 0.1).value, 2.0);
  EXPECT_FALSE(order_from_errors(0.4, 0.1).exact);
  EXPECT_TRUE(order_from_errors(0.4, 0.0).exact);
  EXPECT_TRUE(order_from_errors(0.0, 0.0).exact);
  EXPECT_THROW(order_from_errors(-1.0, 0.1), ValidationError);
}

TEST(ObservedOrder, PerFieldPerPair) {
  SweepResult r;
  r.rows = {{0.2, 0.4, 0.8, 0.16}, {0.1, 0.2, 0.2, 0.04}, {0.05, 0.1, 0.0, 0.01}};
  const auto o = observed_order(r);
  ASSERT_EQ(o.size(), 2u);
  EXPECT_DOUBLE_EQ(o[0].u.value, 1.0);
  EXPECT_DOUBLE_EQ(o[0].H.value, 2.0);
  EXPECT_DOUBLE_EQ(o[0].rho.value, 2.0);
  EXPECT_EQ(o[1].eps_coarse, 0.1);
  EXPECT_EQ(o[1].eps_fine, 0.05);
  EXPECT_TRUE(o[1].H.exact);
}

TEST(ObservedOrder, Preconditions) {
  SweepResult r;
  r.rows = {{0.2, 0.4, 0.4, 0.4}};
  EXPECT_THROW(observed_order(r), ValidationError);
  r.rows.push_back({0.15, 0.3, 0.3, 0.3});
  EXPECT_THROW(observed_order(r), ValidationError);
}

TEST(SweepConfig, Validation) {
  EXPECT_NO_THROW(SweepConfig{}.validate());
  SweepConfig c;
  c.eps_list = {0.1, 0.2};
  EXPECT_THROW(c.validate(), ValidationError);
  c.eps_list = {0.2, 0.2};
  EXPECT_THROW(c.validate(), ValidationError);
  c.eps_list = {1.5};
  EXPECT_THROW(c.validate(), ValidationError);
  c.eps_list = {};
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.T = -1.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.compressible.mu = 0.5;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.compressible.H_tilde = {1, 0, 0};
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(RunSweep, RejectsLargeData) {
  SweepConfig c = small_config();
  c.preset.amplitude = 1.0;
  EXPECT_THROW(run_sweep(c), ValidationError);
}

// No evolution: the errors are the initial perturbations eps psi, eps chi.
TEST(RunSweep, ZeroTimeErrorsArePerturbations) {
  SweepConfig c = small_config();
  c.T = 0.0;
  c.eps_list = {0.2};
  c.C_prep = 1.5;
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.rows.size(), 1u);
  const Grid g = make_grid(c.n);
  const SpectralVectorField psi = random_solenoidal(g, 1, 11);
  const SpectralVectorField chi = random_solenoidal(g, 1, 12);
  const double psi_l2 = c.C_prep * hs(psi, 0) / hs(psi, 4);
  const double chi_l2 = c.C_prep * hs(chi, 0) / hs(chi, 3);
  EXPECT_NEAR(r.rows[0].e_u, 0.2 * psi_l2, 1e-13);
  EXPECT_NEAR(r.rows[0].e_H, 0.2 * chi_l2, 1e-13);
  EXPECT_EQ(r.rows[0].steps, 0);
}

TEST(RunSweep, SmallSweepTrends) {
  SweepConfig c = small_config();
  c.eps_list = {0.4, 0.2, 0.1};
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.rows.size(), 3u);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const SweepRow& row = r.rows[i];
    EXPECT_GE(row.e_u, 0.0);
    EXPECT_LE(row.energy_factor, 1.0 + 10.0 * row.eps) << "eps " << row.eps;
    EXPECT_NEAR(row.dt * row.steps, c.T, 1e-14);
    if (i > 0) {
      EXPECT_LT(row.e_rho, r.rows[i - 1].e_rho);
      EXPECT_LT(row.e_H, r.rows[i - 1].e_H);
    }
  }
  const auto orders = observed_order(r);
  for (const auto& o : orders) EXPECT_NEAR(o.rho.value, 2.0, 0.1);
}

TEST(RunSweep, Deterministic) {
  SweepConfig c = small_config();
  c.T = 0.05;
  const SweepResult a = run_sweep(c);
  const SweepResult b = run_sweep(c);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].e_u, b.rows[i].e_u);
    EXPECT_EQ(a.rows[i].e_H, b.rows[i].e_H);
    EXPECT_EQ(a.rows[i].e_rho, b.rows[i].e_rho);
  }
}

// Zero shared data: the reference stays at rest and the compressible run
// relaxes. Total energy including the eps^-2 internal part cannot grow, so
// ||u(t)|| <= sqrt(2 E(0) / min rho).
TEST(RunSweep, ZeroDataVelocityBoundedByEnergy) {
  const Grid g = make_grid(16);
  for (double eps : {0.4, 0.2}) {
    CompressibleParams p;
    p.eps = eps;
    p.t_end = 1.0;
    p.record_every = 1000000;
    const CompressibleState s0 =
        well_prepared_init(RealVectorField(g), sample_field(g, [&](const Vec3&) { return p.H_tilde; }),
                           eps, p.rho_tilde, 1.0);
    p.dt = sweep_step(s0, p, p.t_end, 0.8);
    const double E0 = total_energy(s0, p);
    double worst = 0.0, e_prev = E0, rise = 0.0;
    run_compressible(s0, p, [&](const CompressibleState& s, long) {
      double rho_min = 1e300;
      for (double r : s.rho.v) rho_min = std::min(rho_min, r);
      worst = std::max(worst, l2_norm(to_spectral(s.u)) / std::sqrt(2.0 * E0 / rho_min));
      const double e = total_energy(s, p);
      rise = std::max(rise, (e - e_prev) / E0);
      e_prev = e;
    });
    EXPECT_LE(worst, 1.0) << "eps " << eps;
    EXPECT_LE(rise, 1e-6) << "eps " << eps;
    EXPECT_LT(e_prev, E0);
  }
}

TEST(RunSweep, ReferenceBlowupAbortsWithNoRows) {
  SweepConfig c = small_config();
  c.max_h3 = 1e9;
  c.preset.amplitude = 50.0;
  c.incompressible.dt = 0.5;
  c.incompressible.cfl_policy = CflPolicy::Ignore;
  c.T = 20.0;
  try {
    run_sweep(c);
    FAIL() << "expected SweepAborted";
  } catch (const SweepAborted& e) {
    EXPECT_EQ(e.eps(), 0.0);
    EXPECT_TRUE(e.partial().rows.empty());
  }
}
