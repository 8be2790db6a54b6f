#pragma once

#include <fftw3.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "mhd/compressible.hpp"
#include "mhd/config.hpp"
#include "mhd/csv.hpp"
#include "mhd/limit.hpp"
#include "mhd/presets.hpp"
#include "mhd/simulation.hpp"
#include "mhd/snapshot.hpp"
#include "mhd/verify.hpp"

namespace mhd {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitBlowup = 2, kExitIo = 3 };

namespace detail {

namespace fs = std::filesystem;

inline void prepare_output(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  if (!fs::is_directory(dir)) throw IoError("output path is not a directory: " + dir);
}

inline std::string out_path(const RunConfig& c, const std::string& name) {
  return (fs::path(c.output_dir) / name).string();
}

inline void write_manifest(const RunConfig& c, const std::string& status, int code,
                           double wall, const std::vector<std::string>& files) {
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(c)));
  json m;
  m["config_hash"] = hash;
  m["mode"] = to_string(c.mode);
  m["version"] = kVersion;
  m["fftw_version"] = std::string(fftw_version);
  m["compiler"] = __VERSION__;
  m["threads"] = fft_thread_count();
  m["reduction_mode"] = "deterministic";
  m["status"] = status;
  m["exit_code"] = code;
  m["wall_time_s"] = wall;
  m["files"] = files;
  write_text(out_path(c, "manifest.json"), m.dump(2) + "\n");
}

inline SimState initial_incompressible(const RunConfig& c, double& cum0) {
  cum0 = 0.0;
  if (!c.restart_from.empty()) {
    const Snapshot snap = read_snapshot(c.restart_from);
    if (snap.n != c.n) throw ValidationError("restart_from: grid size differs from n");
    cum0 = snap.aux;
    return sim_state_from(snap);
  }
  SimState s = make_preset(make_grid(c.n), c.initial);
  if (c.initial_h2) scale_to_h2_sum(s, *c.initial_h2);
  return s;
}

inline ConservedState initial_compressible(const RunConfig& c) {
  if (!c.restart_from.empty()) {
    const Snapshot snap = read_snapshot(c.restart_from);
    if (snap.n != c.n) throw ValidationError("restart_from: grid size differs from n");
    return conserved_from(snap);
  }
  SimState s = make_preset(make_grid(c.n), c.initial);
  if (c.initial_h2) scale_to_h2_sum(s, *c.initial_h2);
  RealVectorField H0 = to_real(s.B);
  for (int j = 0; j < 3; ++j)
    for (double& v : H0.c[j]) v += c.compressible.H_tilde[j];
  return to_conserved(well_prepared_init(to_real(s.u), H0, c.compressible.eps,
                                         c.compressible.rho_tilde, c.C_prep, c.perturbations));
}

inline std::string snapshot_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%04zu.bin", i);
  return buf;
}

inline int run_incompressible_mode(const RunConfig& c, std::ostream& log,
                                   std::vector<std::string>& files) {
  double cum0 = 0.0;
  const SimState s0 = initial_incompressible(c, cum0);
  RunOptions opts;
  opts.snapshot_times = c.snapshot_times;
  opts.cum_dissipation0 = cum0;
  long nrec = 0;
  const std::string ckpt = out_path(c, "checkpoint.bin");
  opts.on_record = [&](const SimState& s, const DiagnosticsRecord& r) {
    if (c.checkpoint_every > 0 && nrec > 0 && nrec % c.checkpoint_every == 0)
      write_snapshot(ckpt, to_snapshot(s, r.cum_dissipation));
    ++nrec;
  };
  SolverParams p = c.solver;
  try {
    const Trajectory tr = run(s0, p, opts);
    write_csv(out_path(c, "diagnostics.csv"), records_csv(tr.records));
    files.push_back("diagnostics.csv");
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
      write_snapshot(out_path(c, snapshot_name(i)), to_snapshot(tr.snapshots[i]));
      files.push_back(snapshot_name(i));
    }
    write_snapshot(out_path(c, "final.bin"),
                   to_snapshot(tr.final_state, tr.records.back().cum_dissipation));
    files.push_back("final.bin");
    if (c.checkpoint_every > 0 && fs::exists(ckpt)) files.push_back("checkpoint.bin");
    log << "completed " << tr.records.size() << " records to t=" << tr.final_state.t << "\n";
    return kExitOk;
  } catch (const IntegrationAborted& e) {
    const Trajectory& tr = e.partial();
    write_csv(out_path(c, "diagnostics.csv"), records_csv(tr.records));
    files.push_back("diagnostics.csv");
    const double cum = tr.records.empty() ? cum0 : tr.records.back().cum_dissipation;
    write_snapshot(out_path(c, "last_good.bin"), to_snapshot(e.last_good(), cum));
    files.push_back("last_good.bin");
    if (c.checkpoint_every > 0 && fs::exists(ckpt)) files.push_back("checkpoint.bin");
    log << "integration aborted: " << e.what() << "\n";
    return kExitBlowup;
  }
}

inline int run_compressible_mode(const RunConfig& c, std::ostream& log,
                                 std::vector<std::string>& files) {
  const ConservedState s0 = initial_compressible(c);
  const CompressibleParams& p = c.compressible;
  const std::string ckpt = out_path(c, "checkpoint.bin");
  std::vector<bool> taken(c.snapshot_times.size(), false);
  std::vector<std::string> snaps;
  auto maybe_snapshot = [&](const ConservedState& s) {
    for (std::size_t i = 0; i < c.snapshot_times.size(); ++i) {
      if (!taken[i] && std::abs(s.t - c.snapshot_times[i]) <= 0.5 * p.dt + 1e-12) {
        const std::string name = snapshot_name(snaps.size());
        write_snapshot(out_path(c, name), to_snapshot(s));
        snaps.push_back(name);
        taken[i] = true;
      }
    }
  };
  maybe_snapshot(s0);
  const long every = static_cast<long>(c.checkpoint_every) * p.record_every;
  try {
    const CompressibleTrajectory tr = run_conserved(s0, p, [&](const ConservedState& s, long i) {
      maybe_snapshot(s);
      if (every > 0 && i % every == 0) write_snapshot(ckpt, to_snapshot(s));
    });
    write_csv(out_path(c, "compressible.csv"), compressible_csv(tr.records));
    files.push_back("compressible.csv");
    files.insert(files.end(), snaps.begin(), snaps.end());
    write_snapshot(out_path(c, "final.bin"), to_snapshot(tr.final_conserved));
    files.push_back("final.bin");
    if (every > 0 && fs::exists(ckpt)) files.push_back("checkpoint.bin");
    log << "completed " << tr.records.size() << " records to t=" << tr.final_conserved.t << "\n";
    return kExitOk;
  } catch (const CompressibleAborted& e) {
    write_csv(out_path(c, "compressible.csv"), compressible_csv(e.partial().records));
    files.push_back("compressible.csv");
    files.insert(files.end(), snaps.begin(), snaps.end());
    write_snapshot(out_path(c, "last_good.bin"), to_snapshot(e.partial().final_conserved));
    files.push_back("last_good.bin");
    if (every > 0 && fs::exists(ckpt)) files.push_back("checkpoint.bin");
    log << "integration aborted: " << e.what() << "\n";
    return kExitBlowup;
  }
}

inline int run_sweep_mode(const RunConfig& c, std::ostream& log,
                          std::vector<std::string>& files) {
  try {
    const SweepResult r = run_sweep(sweep_config(c));
    write_csv(out_path(c, "sweep.csv"), sweep_csv(r));
    files.push_back("sweep.csv");
    for (const auto& row : r.rows)
      log << "eps " << row.eps << ": e_u " << row.e_u << ", e_H " << row.e_H << ", e_rho "
          << row.e_rho << "\n";
    return kExitOk;
  } catch (const SweepAborted& e) {
    write_csv(out_path(c, "sweep.csv"), sweep_csv(e.partial()));
    files.push_back("sweep.csv");
    log << "sweep aborted at eps=" << e.eps() << ": " << e.what() << "\n";
    return kExitBlowup;
  }
}

inline int run_verify_mode(const RunConfig& c, std::ostream& log,
                           std::vector<std::string>& files) {
  const std::vector<CheckResult> checks = run_verify_suite(std::min(c.n, 16));
  std::string text;
  bool all = true;
  for (const auto& ch : checks) {
    text += std::string(ch.passed ? "PASS " : "FAIL ") + ch.name + ": " + ch.detail + "\n";
    all = all && ch.passed;
  }
  log << text;
  write_text(out_path(c, "verify.txt"), text);
  files.push_back("verify.txt");
  return all ? kExitOk : kExitValidation;
}

} // namespace detail

/// Executes the configured mode and writes its artifacts plus config.json and
/// manifest.json into output_dir. Numerical failures return kExitBlowup with
/// the partial CSV and the last good state on disk; validation and I/O
/// problems propagate as ValidationError / IoError.
inline int command_run(const RunConfig& c, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  detail::prepare_output(c.output_dir);
  detail::write_text(detail::out_path(c, "config.json"), dump_config(c).dump(2) + "\n");
  std::vector<std::string> files = {"config.json"};
  int code = kExitOk;
  switch (c.mode) {
  case RunMode::Incompressible: code = detail::run_incompressible_mode(c, log, files); break;
  case RunMode::Compressible: code = detail::run_compressible_mode(c, log, files); break;
  case RunMode::LimitSweep: code = detail::run_sweep_mode(c, log, files); break;
  case RunMode::Verify: code = detail::run_verify_mode(c, log, files); break;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const char* status = code == kExitOk ? "ok" : code == kExitBlowup ? "blowup" : "failed";
  detail::write_manifest(c, status, code, wall, files);
  return code;
}

} // namespace mhd
