#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mhd/compressible.hpp"
#include "mhd/diagnostics.hpp"
#include "mhd/errors.hpp"
#include "mhd/limit.hpp"

// Diagnostics tables. Values use %.17g so a re-read recovers every double.

namespace mhd {

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

inline void row(std::ostringstream& os, const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << num(v[i]);
  os << '\n';
}

} // namespace detail

inline std::string records_csv(const std::vector<DiagnosticsRecord>& records) {
  std::ostringstream os;
  os << "t,E_kin,E_mag,E,dissipation,cum_dissipation,"
        "u_H0,u_H1,u_H2,u_H3,B_H0,B_H1,B_H2,B_H3,X,w1,w2,w3,w,div_u,div_B,"
        "identity_residual,tail_fraction,ratio_linf_u,ratio_l4_u,ratio_linf_B,ratio_l4_B\n";
  for (const auto& r : records) {
    std::vector<double> v = {r.t, r.E_kin, r.E_mag, r.energy(), r.dissipation, r.cum_dissipation};
    for (const auto& field : r.hs_norms) v.insert(v.end(), field.begin(), field.end());
    v.push_back(r.X);
    v.insert(v.end(), r.w_norms.begin(), r.w_norms.end());
    v.insert(v.end(), {r.div_u, r.div_B, r.identity_residual, r.tail_fraction});
    v.insert(v.end(), r.interp_ratios.begin(), r.interp_ratios.end());
    detail::row(os, v);
  }
  return os.str();
}

inline std::string compressible_csv(const std::vector<CompressibleRecord>& records) {
  std::ostringstream os;
  os << "t,mass,momentum_1,momentum_2,momentum_3,mean_H_1,mean_H_2,mean_H_3,"
        "E_kin,E_mag,div_H,rho_min,rho_max\n";
  for (const auto& r : records)
    detail::row(os, {r.t, r.mass, r.momentum[0], r.momentum[1], r.momentum[2], r.mean_H[0],
                     r.mean_H[1], r.mean_H[2], r.E_kin, r.E_mag, r.div_H, r.rho_min, r.rho_max});
  return os.str();
}

/// One row per eps; order columns compare with the previous row and are
/// empty on the first row, "exact" when an error vanished.
inline std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "eps,e_u,e_H,e_rho,order_u,order_H,order_rho,energy_factor,dt,steps\n";
  auto order_text = [](const Order& o) { return o.exact ? std::string("exact") : detail::num(o.value); };
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const SweepRow& row = r.rows[i];
    os << detail::num(row.eps) << ',' << detail::num(row.e_u) << ',' << detail::num(row.e_H) << ','
       << detail::num(row.e_rho) << ',';
    const SweepRow* prev = i ? &r.rows[i - 1] : nullptr;
    if (prev && std::abs(prev->eps - 2.0 * row.eps) <= 1e-12 * prev->eps) {
      os << order_text(order_from_errors(prev->e_u, row.e_u)) << ','
         << order_text(order_from_errors(prev->e_H, row.e_H)) << ','
         << order_text(order_from_errors(prev->e_rho, row.e_rho)) << ',';
    } else {
      os << ",,,";
    }
    os << detail::num(row.energy_factor) << ',' << detail::num(row.dt) << ',' << row.steps << '\n';
  }
  return os.str();
}

inline void write_csv(const std::string& path, const std::string& text) {
  detail::write_text(path, text);
}

} // namespace mhd
