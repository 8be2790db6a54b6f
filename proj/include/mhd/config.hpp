#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mhd/compressible.hpp"
#include "mhd/errors.hpp"
#include "mhd/limit.hpp"
#include "mhd/params.hpp"
#include "mhd/presets.hpp"

namespace mhd {

using json = nlohmann::json;

enum class RunMode { Incompressible, Compressible, LimitSweep, Verify };

inline const char* to_string(RunMode m) {
  switch (m) {
  case RunMode::Incompressible: return "incompressible";
  case RunMode::Compressible: return "compressible";
  case RunMode::LimitSweep: return "limit-sweep";
  case RunMode::Verify: return "verify";
  }
  return "verify";
}

struct RunConfig {
  RunMode mode = RunMode::Verify;
  int n = 32;
  std::string output_dir = "out";
  SolverParams solver;
  // H_tilde and dealias always follow solver; mu and lambda_c default to solver.lambda
  CompressibleParams compressible;
  PresetSpec initial;
  // when set, (u, B) is rescaled so that ||u||_{H^2} + ||B||_{H^2} equals it
  std::optional<double> initial_h2;
  double C_prep = 1.0;
  Perturbations perturbations;
  std::vector<double> eps_list = {0.2, 0.1, 0.05};
  double sweep_T = 0.5;
  double max_h3 = 1.0;
  double dt_safety = 0.8;
  std::vector<double> snapshot_times;
  // write checkpoint.bin every this many diagnostic records; 0 = only at the end
  int checkpoint_every = 0;
  // checkpoint or snapshot file to resume from; empty = fresh start
  std::string restart_from;
};

inline SweepConfig sweep_config(const RunConfig& c) {
  SweepConfig s;
  s.eps_list = c.eps_list;
  s.T = c.sweep_T;
  s.n = c.n;
  s.preset = c.initial;
  s.C_prep = c.C_prep;
  s.perturbations = c.perturbations;
  s.max_h3 = c.max_h3;
  s.dt_safety = c.dt_safety;
  s.incompressible = c.solver;
  s.compressible = c.compressible;
  return s;
}

namespace detail {

class ConfigReader {
public:
  ConfigReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ValidationError(where() + "expected an object");
  }

  // Rejects keys outside the allowed set.
  void allow(std::initializer_list<const char*> keys) const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      const bool ok = std::any_of(keys.begin(), keys.end(),
                                  [&](const char* k) { return it.key() == k; });
      if (!ok) throw ValidationError("unknown key '" + key_path(it.key()) + "'");
    }
  }

  bool has(const char* key) const { return obj_.contains(key); }

  ConfigReader child(const char* key) const { return ConfigReader(obj_.at(key), key_path(key)); }

  void read(const char* key, double& out) const {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number()) throw type_error(key, "a number");
    out = v.get<double>();
  }

  void read(const char* key, int& out) const {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) throw type_error(key, "an integer");
    const auto x = v.get<std::int64_t>();
    if (x < -2147483647 || x > 2147483647) throw ValidationError(key_path(key) + " out of range");
    out = static_cast<int>(x);
  }

  void read(const char* key, std::uint64_t& out) const {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number_unsigned()) throw type_error(key, "a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void read(const char* key, bool& out) const {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) throw type_error(key, "a boolean");
    out = v.get<bool>();
  }

  void read(const char* key, std::string& out) const {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_string()) throw type_error(key, "a string");
    out = v.get<std::string>();
  }

  void read(const char* key, std::vector<double>& out) const {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_array()) throw type_error(key, "an array of numbers");
    out.clear();
    for (const json& x : v) {
      if (!x.is_number()) throw type_error(key, "an array of numbers");
      out.push_back(x.get<double>());
    }
  }

  void read(const char* key, Vec3& out) const {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_array() || v.size() != 3) throw type_error(key, "an array of 3 numbers");
    for (int j = 0; j < 3; ++j) {
      if (!v[j].is_number()) throw type_error(key, "an array of 3 numbers");
      out[j] = v[j].get<double>();
    }
  }

  void read(const char* key, Mode& out) const {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_array() || v.size() != 3) throw type_error(key, "an array of 3 integers");
    for (int j = 0; j < 3; ++j) {
      if (!v[j].is_number_integer()) throw type_error(key, "an array of 3 integers");
      out[j] = v[j].get<int>();
    }
  }

  void read(const char* key, std::optional<double>& out) const {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (v.is_null()) {
      out.reset();
      return;
    }
    if (!v.is_number()) throw type_error(key, "a number or null");
    out = v.get<double>();
  }

  void read(const char* key, CflPolicy& out) const {
    if (!has(key)) return;
    std::string s;
    read(key, s);
    try {
      out = cfl_policy_from_string(s);
    } catch (const ValidationError& e) {
      throw ValidationError(key_path(key) + ": " + e.what());
    }
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

private:
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }

  ValidationError type_error(const char* key, const char* expected) const {
    return ValidationError(key_path(key) + " must be " + expected);
  }

  const json& obj_;
  std::string path_;
};

template <class F>
void with_prefix(const std::string& prefix, F&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + "." + e.what());
  }
}

} // namespace detail

/// Strict parse of a JSON run configuration: unknown keys, wrong types and
/// out-of-range values are ValidationErrors naming the key path.
inline RunConfig config_from_json(const json& doc) {
  using detail::ConfigReader;
  const ConfigReader top(doc, "");
  top.allow({"mode", "n", "output_dir", "solver", "compressible", "initial", "well_prepared",
             "sweep", "snapshot_times", "checkpoint_every", "restart_from"});
  RunConfig c;
  if (!top.has("mode")) throw ValidationError("missing required key 'mode'");
  std::string mode;
  top.read("mode", mode);
  if (mode == "incompressible") c.mode = RunMode::Incompressible;
  else if (mode == "compressible") c.mode = RunMode::Compressible;
  else if (mode == "limit-sweep") c.mode = RunMode::LimitSweep;
  else if (mode == "verify") c.mode = RunMode::Verify;
  else throw ValidationError("mode: unknown value '" + mode + "'");

  top.read("n", c.n);
  if (c.n < 4 || c.n % 2 != 0) throw ValidationError("n must be even and >= 4");
  top.read("output_dir", c.output_dir);
  if (c.output_dir.empty()) throw ValidationError("output_dir must not be empty");
  top.read("snapshot_times", c.snapshot_times);
  for (double t : c.snapshot_times)
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("snapshot_times must be >= 0");
  top.read("checkpoint_every", c.checkpoint_every);
  if (c.checkpoint_every < 0) throw ValidationError("checkpoint_every must be >= 0");
  top.read("restart_from", c.restart_from);

  if (top.has("solver")) {
    const ConfigReader r = top.child("solver");
    r.allow({"lambda", "H_tilde", "dt", "t_end", "dealias", "record_every", "cfl", "cfl_policy",
             "reproject_B"});
    r.read("lambda", c.solver.lambda);
    r.read("H_tilde", c.solver.H_tilde);
    r.read("dt", c.solver.dt);
    r.read("t_end", c.solver.t_end);
    r.read("dealias", c.solver.dealias);
    r.read("record_every", c.solver.record_every);
    r.read("cfl", c.solver.cfl);
    r.read("cfl_policy", c.solver.cfl_policy);
    r.read("reproject_B", c.solver.reproject_B);
  }
  detail::with_prefix("solver", [&] { c.solver.validate(); });

  c.compressible.mu = c.solver.lambda;
  c.compressible.lambda_c = c.solver.lambda;
  if (top.has("compressible")) {
    const ConfigReader r = top.child("compressible");
    r.allow({"mu", "lambda_c", "K", "gamma", "eps", "rho_tilde", "dt", "t_end", "record_every",
             "cfl", "cfl_policy"});
    r.read("mu", c.compressible.mu);
    r.read("lambda_c", c.compressible.lambda_c);
    r.read("K", c.compressible.K);
    r.read("gamma", c.compressible.gamma);
    r.read("eps", c.compressible.eps);
    r.read("rho_tilde", c.compressible.rho_tilde);
    r.read("dt", c.compressible.dt);
    r.read("t_end", c.compressible.t_end);
    r.read("record_every", c.compressible.record_every);
    r.read("cfl", c.compressible.cfl);
    r.read("cfl_policy", c.compressible.cfl_policy);
  }
  c.compressible.H_tilde = c.solver.H_tilde;
  c.compressible.dealias = c.solver.dealias;
  detail::with_prefix("compressible", [&] { c.compressible.validate(); });

  if (top.has("initial")) {
    const ConfigReader r = top.child("initial");
    r.allow({"preset", "amplitude", "k", "kmax", "seed", "h2_norm"});
    r.read("preset", c.initial.name);
    r.read("amplitude", c.initial.amplitude);
    r.read("k", c.initial.k);
    r.read("kmax", c.initial.kmax);
    r.read("seed", c.initial.seed);
    r.read("h2_norm", c.initial_h2);
  }
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), c.initial.name) == names.end())
    throw ValidationError("initial.preset: unknown preset '" + c.initial.name + "'");
  if (!std::isfinite(c.initial.amplitude)) throw ValidationError("initial.amplitude must be finite");
  if (c.initial.kmax < 1) throw ValidationError("initial.kmax must be >= 1");
  if (c.initial.name == "alfven-mode") {
    if (c.initial.k == Mode{0, 0, 0}) throw ValidationError("initial.k must be nonzero");
    for (int kj : c.initial.k)
      if (3 * std::abs(kj) > c.n) throw ValidationError("initial.k outside the resolved band");
  }
  if (c.initial_h2 && !(*c.initial_h2 >= 0.0))
    throw ValidationError("initial.h2_norm must be >= 0");

  if (top.has("well_prepared")) {
    const ConfigReader r = top.child("well_prepared");
    r.allow({"C_prep", "kmax", "seed_psi", "seed_chi"});
    r.read("C_prep", c.C_prep);
    r.read("kmax", c.perturbations.kmax);
    r.read("seed_psi", c.perturbations.seed_psi);
    r.read("seed_chi", c.perturbations.seed_chi);
  }
  if (!(c.C_prep >= 0.0) || !std::isfinite(c.C_prep))
    throw ValidationError("well_prepared.C_prep must be >= 0");
  if (c.perturbations.kmax < 1 || 3 * c.perturbations.kmax > c.n)
    throw ValidationError("well_prepared.kmax must be in 1..n/3");

  if (top.has("sweep")) {
    const ConfigReader r = top.child("sweep");
    r.allow({"eps_list", "T", "max_h3", "dt_safety"});
    r.read("eps_list", c.eps_list);
    r.read("T", c.sweep_T);
    r.read("max_h3", c.max_h3);
    r.read("dt_safety", c.dt_safety);
  }
  if (c.mode == RunMode::LimitSweep) {
    try {
      sweep_config(c).validate();
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      // sweep-level fields are reported under "sweep."
      if (msg.rfind("eps_list", 0) == 0 || msg.rfind("T ", 0) == 0 ||
          msg.rfind("max_h3", 0) == 0 || msg.rfind("dt_safety", 0) == 0)
        throw ValidationError("sweep." + msg);
      throw;
    }
  }
  return c;
}

inline RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
  return config_from_json(doc);
}

/// Fully resolved configuration; parse_config(dump_config(c)) reproduces c.
inline json dump_config(const RunConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["n"] = c.n;
  j["output_dir"] = c.output_dir;
  j["snapshot_times"] = c.snapshot_times;
  j["checkpoint_every"] = c.checkpoint_every;
  j["restart_from"] = c.restart_from;
  const SolverParams& s = c.solver;
  j["solver"] = {{"lambda", s.lambda},         {"H_tilde", s.H_tilde},
                 {"dt", s.dt},                 {"t_end", s.t_end},
                 {"dealias", s.dealias},       {"record_every", s.record_every},
                 {"cfl", s.cfl},               {"cfl_policy", to_string(s.cfl_policy)},
                 {"reproject_B", s.reproject_B}};
  const CompressibleParams& p = c.compressible;
  j["compressible"] = {{"mu", p.mu},     {"lambda_c", p.lambda_c},
                       {"K", p.K},       {"gamma", p.gamma},
                       {"eps", p.eps},   {"rho_tilde", p.rho_tilde},
                       {"dt", p.dt},     {"t_end", p.t_end},
                       {"record_every", p.record_every},
                       {"cfl", p.cfl},   {"cfl_policy", to_string(p.cfl_policy)}};
  j["initial"] = {{"preset", c.initial.name}, {"amplitude", c.initial.amplitude},
                  {"k", c.initial.k},         {"kmax", c.initial.kmax},
                  {"seed", c.initial.seed}};
  j["initial"]["h2_norm"] = c.initial_h2 ? json(*c.initial_h2) : json(nullptr);
  j["well_prepared"] = {{"C_prep", c.C_prep},
                        {"kmax", c.perturbations.kmax},
                        {"seed_psi", c.perturbations.seed_psi},
                        {"seed_chi", c.perturbations.seed_chi}};
  j["sweep"] = {{"eps_list", c.eps_list},
                {"T", c.sweep_T},
                {"max_h3", c.max_h3},
                {"dt_safety", c.dt_safety}};
  return j;
}

/// 64-bit FNV-1a of the resolved configuration text.
inline std::uint64_t config_hash(const RunConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : dump_config(c).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace mhd
