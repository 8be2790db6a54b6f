#pragma once

#include <cmath>
#include <string>

#include "mhd/errors.hpp"
#include "mhd/grid.hpp"

namespace mhd {

enum class CflPolicy { Error, Warn, Ignore };

inline const char* to_string(CflPolicy p) {
  switch (p) {
  case CflPolicy::Error: return "error";
  case CflPolicy::Warn: return "warn";
  case CflPolicy::Ignore: return "ignore";
  }
  return "error";
}

inline CflPolicy cfl_policy_from_string(const std::string& s) {
  if (s == "error") return CflPolicy::Error;
  if (s == "warn") return CflPolicy::Warn;
  if (s == "ignore") return CflPolicy::Ignore;
  throw ValidationError("unknown CFL policy '" + s + "'");
}

/// Parameters of the incompressible background-field system.
struct SolverParams {
  double lambda = 1.0;          // viscosity
  Vec3 H_tilde = {1.0, 1.0, 1.0};  // background magnetic field
  double dt = 1e-3;
  double t_end = 1.0;
  bool dealias = true;
  int record_every = 1;
  double cfl = 0.5;
  CflPolicy cfl_policy = CflPolicy::Error;
  // Re-project B after each step. Off: the induction equation keeps div B = 0.
  bool reproject_B = false;

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw ValidationError("lambda must be > 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be > 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
      throw ValidationError("t_end must be >= 0");
    if (record_every < 1) throw ValidationError("record_every must be >= 1");
    if (!(cfl > 0.0)) throw ValidationError("cfl must be > 0");
    for (double h : H_tilde)
      if (!std::isfinite(h)) throw ValidationError("H_tilde must be finite");
  }
};

} // namespace mhd
