#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "mhd/diagnostics.hpp"
#include "mhd/incompressible.hpp"

namespace mhd {

struct Trajectory {
  std::vector<DiagnosticsRecord> records;  // strictly increasing t
  std::vector<SimState> snapshots;
  SimState final_state;
};

struct RunOptions {
  // Snapshot times; a snapshot is taken at the first step landing within
  // half a step of each requested time.
  std::vector<double> snapshot_times;
  // Dissipation already accumulated before initial.t (for restarts).
  double cum_dissipation0 = 0.0;
  // Called after every completed step with (state, step index from 1).
  std::function<void(const SimState&, long)> on_step;
  // Called with each new record and the state it was taken from.
  std::function<void(const SimState&, const DiagnosticsRecord&)> on_record;
};

/// Integration failure carrying everything produced before it.
class IntegrationAborted : public std::runtime_error {
public:
  IntegrationAborted(const std::string& what, double t, SimState last_good,
                     Trajectory partial)
      : std::runtime_error(what), time_(t), last_good_(std::move(last_good)),
        partial_(std::move(partial)) {}

  double time() const noexcept { return time_; }
  const SimState& last_good() const noexcept { return last_good_; }
  const Trajectory& partial() const noexcept { return partial_; }

private:
  double time_;
  SimState last_good_;
  Trajectory partial_;
};

/// Number of steps of size <= dt covering [t0, t1]; the last may be shorter.
inline long step_count(double t0, double t1, double dt) {
  if (t1 <= t0) return 0;
  const double ratio = (t1 - t0) / dt;
  const double r = std::round(ratio);
  if (std::abs(ratio - r) <= 1e-9 * std::max(1.0, r)) return static_cast<long>(r);
  return static_cast<long>(std::ceil(ratio));
}

/// Integrates to params.t_end, recording diagnostics at the start, every
/// record_every steps, and at the end.
inline Trajectory run(const SimState& initial, const SolverParams& params,
                      const RunOptions& opts = {}) {
  params.validate();
  if (params.t_end < initial.t)
    throw ValidationError("t_end precedes the initial time");

  Trajectory traj;
  std::vector<bool> taken(opts.snapshot_times.size(), false);
  auto maybe_snapshot = [&](const SimState& s, double dt) {
    for (std::size_t i = 0; i < opts.snapshot_times.size(); ++i) {
      if (!taken[i] && std::abs(s.t - opts.snapshot_times[i]) <= 0.5 * dt + 1e-12) {
        traj.snapshots.push_back(s);
        taken[i] = true;
      }
    }
  };

  auto push_record = [&](const SimState& s) {
    DiagnosticsRecord r = make_record(s, params);
    if (traj.records.empty()) {
      r.cum_dissipation = opts.cum_dissipation0;
    } else {
      const DiagnosticsRecord& prev = traj.records.back();
      r.cum_dissipation = prev.cum_dissipation +
                          0.5 * (r.t - prev.t) * (r.dissipation + prev.dissipation);
    }
    traj.records.push_back(r);
    if (opts.on_record) opts.on_record(s, r);
  };

  SimState state = initial;
  push_record(state);
  maybe_snapshot(state, params.dt);

  const long nsteps = step_count(initial.t, params.t_end, params.dt);
  SolverParams p = params;
  for (long i = 1; i <= nsteps; ++i) {
    const bool last = (i == nsteps);
    p.dt = last ? params.t_end - state.t : params.dt;
    try {
      SimState next = step(state, p);
      if (last) next.t = params.t_end;
      if (last || i % params.record_every == 0) push_record(next);
      state = std::move(next);
    } catch (const BlowupError& e) {
      throw IntegrationAborted(e.what(), e.time(), state, traj);
    } catch (const CflError& e) {
      throw IntegrationAborted(e.what(), e.time(), state, traj);
    }
    maybe_snapshot(state, params.dt);
    if (opts.on_step) opts.on_step(state, i);
  }
  traj.final_state = std::move(state);
  return traj;
}

} // namespace mhd
