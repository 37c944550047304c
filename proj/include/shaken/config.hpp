#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shaken/constants.hpp"
#include "shaken/errors.hpp"
#include "shaken/io.hpp"
#include "shaken/rl.hpp"

namespace shaken::config {

using nlohmann::json;

template <class T>
T get(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

inline double get_positive(const json& obj, const char* key, double fallback, const std::string& where) {
  const double v = get<double>(obj, key, fallback, where);
  if (!(v > 0) || !std::isfinite(v)) throw ConfigError(where + "." + key + " must be > 0");
  return v;
}

struct BlochOptions {
  int bands = 7;
};

enum class DesignMethod { qoc, rl };
enum class DesignProblem { beamsplitter, mirror };

struct DesignOptions {
  DesignMethod method = DesignMethod::qoc;
  DesignProblem problem = DesignProblem::beamsplitter;
  int target_band = 3;
  double horizon_tau = 0.235;  // recoil periods
  double effort_weight = 1e-4;
  double phi_max = std::numbers::pi;
  int max_iters = 1000;
  int starts = 4;
  double init_amplitude = 1.0;
  double fidelity_gate = 0.97;
  rl::RlConfig rl{};
};

// Either a pre-assembled waveform or the three components.
struct SequenceSource {
  std::string waveform;
  std::string plan;  // sequence plan file, see load_sequence_plan
  std::string beamsplitter;
  std::string mirror;
  double hold_us = 100.0;
};

struct ScanOptions {
  double a_min = -0.125;
  double a_max = 0.125;
  std::size_t points = 101;
  double time_origin_us = 0.0;
  double ramp_sign = 1.0;
};

struct EstimateOptions {
  std::string table;
  std::optional<std::array<double, 7>> observed;
  std::optional<std::size_t> observed_row;
  double offset_g = 0.0;
};

struct AutocorrOptions {
  std::string table;
};

struct ExportOptions {
  double resolution_ns = 50.0;
};

struct RunConfig {
  LatticeParams lattice{};
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::optional<unsigned> threads;
  std::filesystem::path base_dir;  // relative input paths resolve against this

  BlochOptions bloch{};
  DesignOptions design{};
  std::optional<SequenceSource> sequence;
  ScanOptions scan{};
  std::optional<EstimateOptions> estimate;
  std::optional<AutocorrOptions> autocorr;
  ExportOptions export_opts{};

  std::string digest;  // of the raw config bytes

  std::string resolve(const std::string& path) const {
    const std::filesystem::path p(path);
    return (p.is_absolute() ? p : base_dir / p).lexically_normal().string();
  }
};

inline PhysicalConstants parse_constants(const json& j) {
  io::check_keys(j, {"hbar", "atomic_mass_kg", "wavelength_m", "standard_gravity"}, "constants");
  PhysicalConstants c;
  c.hbar = get_positive(j, "hbar", c.hbar, "constants");
  c.atomic_mass = get_positive(j, "atomic_mass_kg", c.atomic_mass, "constants");
  c.wavelength = get_positive(j, "wavelength_m", c.wavelength, "constants");
  c.standard_gravity = get_positive(j, "standard_gravity", c.standard_gravity, "constants");
  return c;
}

inline LatticeParams parse_lattice(const json& j, const PhysicalConstants& c) {
  io::check_keys(j, {"depth", "trunc", "dt"}, "lattice");
  LatticeParams p;
  p.depth = get<double>(j, "depth", p.depth, "lattice");
  p.trunc = get<int>(j, "trunc", p.trunc, "lattice");
  p.dt = get<double>(j, "dt", p.dt, "lattice");
  p.constants = c;
  p.validate();
  return p;
}

inline rl::RlConfig parse_rl(const json& j, std::uint64_t seed) {
  io::check_keys(j,
                 {"carrier", "episode_length", "samples_per_half_cycle", "alternate_sign", "gamma", "epsilon_start",
                  "epsilon_end", "epsilon_decay_steps", "replay_capacity", "batch_size", "warmup", "sync_period",
                  "updates_per_step", "learning_rate", "grad_clip", "hidden", "episodes", "eval_every", "parity"},
                 "design.rl");
  rl::RlConfig r;
  const std::string w = "design.rl";
  r.carrier = get<double>(j, "carrier", r.carrier, w);
  r.episode_length = get<int>(j, "episode_length", r.episode_length, w);
  r.samples_per_half_cycle = get<int>(j, "samples_per_half_cycle", r.samples_per_half_cycle, w);
  r.alternate_sign = get<bool>(j, "alternate_sign", r.alternate_sign, w);
  r.gamma = get<double>(j, "gamma", r.gamma, w);
  r.epsilon.start = get<double>(j, "epsilon_start", r.epsilon.start, w);
  r.epsilon.end = get<double>(j, "epsilon_end", r.epsilon.end, w);
  r.epsilon.decay_steps = get<std::size_t>(j, "epsilon_decay_steps", r.epsilon.decay_steps, w);
  r.replay_capacity = get<std::size_t>(j, "replay_capacity", r.replay_capacity, w);
  r.batch_size = get<std::size_t>(j, "batch_size", r.batch_size, w);
  r.warmup = get<std::size_t>(j, "warmup", r.warmup, w);
  r.sync_period = get<std::size_t>(j, "sync_period", r.sync_period, w);
  r.updates_per_step = get<std::size_t>(j, "updates_per_step", r.updates_per_step, w);
  r.learning_rate = get<double>(j, "learning_rate", r.learning_rate, w);
  r.grad_clip = get<double>(j, "grad_clip", r.grad_clip, w);
  r.hidden = get<std::vector<int>>(j, "hidden", r.hidden, w);
  r.episodes = get<std::size_t>(j, "episodes", r.episodes, w);
  r.eval_every = get<std::size_t>(j, "eval_every", r.eval_every, w);
  const std::string parity = get<std::string>(j, "parity", "population", w);
  if (parity == "population") {
    r.parity = rl::ParityMode::population;
  } else if (parity == "amplitude") {
    r.parity = rl::ParityMode::amplitude;
  } else {
    throw ConfigError("design.rl.parity must be 'population' or 'amplitude'");
  }
  r.seed = seed;
  // Zero episodes is a legal (if useless) budget; everything else is checked.
  rl::RlConfig check = r;
  check.episodes = 1;
  check.validate();
  return r;
}

inline DesignOptions parse_design(const json& j, std::uint64_t seed) {
  io::check_keys(j,
                 {"method", "problem", "target_band", "horizon_tau", "effort_weight", "phi_max", "max_iters", "starts",
                  "init_amplitude", "fidelity_gate", "rl"},
                 "design");
  DesignOptions d;
  const std::string method = get<std::string>(j, "method", "qoc", "design");
  if (method == "qoc") {
    d.method = DesignMethod::qoc;
  } else if (method == "rl") {
    d.method = DesignMethod::rl;
  } else {
    throw ConfigError("design.method must be 'qoc' or 'rl'");
  }
  const std::string problem = get<std::string>(j, "problem", "beamsplitter", "design");
  if (problem == "beamsplitter") {
    d.problem = DesignProblem::beamsplitter;
  } else if (problem == "mirror") {
    d.problem = DesignProblem::mirror;
    d.horizon_tau = 0.47;
  } else {
    throw ConfigError("design.problem must be 'beamsplitter' or 'mirror'");
  }
  d.target_band = get<int>(j, "target_band", d.target_band, "design");
  if (d.target_band < 0) throw ConfigError("design.target_band must be >= 0");
  d.horizon_tau = get_positive(j, "horizon_tau", d.horizon_tau, "design");
  d.effort_weight = get_positive(j, "effort_weight", d.effort_weight, "design");
  d.phi_max = get_positive(j, "phi_max", d.phi_max, "design");
  d.max_iters = get<int>(j, "max_iters", d.max_iters, "design");
  d.starts = get<int>(j, "starts", d.starts, "design");
  if (d.max_iters < 0 || d.starts < 1) throw ConfigError("design: max_iters must be >= 0 and starts >= 1");
  d.init_amplitude = get<double>(j, "init_amplitude", d.init_amplitude, "design");
  d.fidelity_gate = get<double>(j, "fidelity_gate", d.method == DesignMethod::rl ? 0.95 : 0.97, "design");
  if (!(d.fidelity_gate >= 0 && d.fidelity_gate <= 1)) throw ConfigError("design.fidelity_gate must be in [0, 1]");
  d.rl = parse_rl(j.value("rl", json::object()), seed);
  return d;
}

inline SequenceSource parse_sequence(const json& j) {
  io::check_keys(j, {"waveform", "plan", "beamsplitter", "mirror", "hold_us"}, "sequence");
  SequenceSource s;
  s.waveform = get<std::string>(j, "waveform", "", "sequence");
  s.plan = get<std::string>(j, "plan", "", "sequence");
  s.beamsplitter = get<std::string>(j, "beamsplitter", "", "sequence");
  s.mirror = get<std::string>(j, "mirror", "", "sequence");
  s.hold_us = get<double>(j, "hold_us", s.hold_us, "sequence");
  if (!(s.hold_us >= 0)) throw ConfigError("sequence.hold_us must be >= 0");
  const bool parts = !s.beamsplitter.empty() || !s.mirror.empty();
  if (!s.waveform.empty() + !s.plan.empty() + parts != 1)
    throw ConfigError("sequence: give exactly one of 'waveform', 'plan' or 'beamsplitter' + 'mirror'");
  if (!parts && j.contains("hold_us")) throw ConfigError("sequence.hold_us only applies with 'beamsplitter' + 'mirror'");
  if (parts && (s.beamsplitter.empty() || s.mirror.empty()))
    throw ConfigError("sequence: 'beamsplitter' and 'mirror' go together");
  return s;
}

inline ScanOptions parse_scan(const json& j) {
  io::check_keys(j, {"a_min_g", "a_max_g", "points", "time_origin_us", "ramp_sign"}, "scan");
  ScanOptions s;
  s.a_min = get<double>(j, "a_min_g", s.a_min, "scan");
  s.a_max = get<double>(j, "a_max_g", s.a_max, "scan");
  s.points = get<std::size_t>(j, "points", s.points, "scan");
  s.time_origin_us = get<double>(j, "time_origin_us", s.time_origin_us, "scan");
  s.ramp_sign = get<double>(j, "ramp_sign", s.ramp_sign, "scan");
  if (s.points < 1 || (s.points > 1 && !(s.a_max > s.a_min))) throw ConfigError("scan: need a_max_g > a_min_g and points >= 1");
  if (s.ramp_sign != 1.0 && s.ramp_sign != -1.0) throw ConfigError("scan.ramp_sign must be +1 or -1");
  return s;
}

inline EstimateOptions parse_estimate(const json& j) {
  io::check_keys(j, {"table", "observed", "observed_row", "offset_g"}, "estimate");
  EstimateOptions e;
  e.table = get<std::string>(j, "table", "", "estimate");
  if (e.table.empty()) throw ConfigError("estimate.table is required");
  if (j.contains("observed")) e.observed = get<std::array<double, 7>>(j, "observed", {}, "estimate");
  if (j.contains("observed_row")) e.observed_row = get<std::size_t>(j, "observed_row", 0, "estimate");
  if (e.observed.has_value() == e.observed_row.has_value())
    throw ConfigError("estimate: give exactly one of 'observed' and 'observed_row'");
  e.offset_g = get<double>(j, "offset_g", 0.0, "estimate");
  return e;
}

inline RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  const json j = io::parse_json(text, "config");
  io::check_keys(j,
                 {"constants", "lattice", "seed", "output_dir", "threads", "bloch", "design", "sequence", "scan",
                  "estimate", "autocorr", "export"},
                 "config");
  RunConfig rc;
  rc.base_dir = base_dir;
  rc.digest = io::digest(text);
  const PhysicalConstants c = parse_constants(j.value("constants", json::object()));
  rc.lattice = parse_lattice(j.value("lattice", json::object()), c);
  rc.seed = get<std::uint64_t>(j, "seed", rc.seed, "config");
  rc.output_dir = get<std::string>(j, "output_dir", rc.output_dir, "config");
  if (j.contains("threads")) {
    const int t = get<int>(j, "threads", 1, "config");
    if (t < 1) throw ConfigError("config.threads must be >= 1");
    rc.threads = static_cast<unsigned>(t);
  }
  if (j.contains("bloch")) {
    io::check_keys(j["bloch"], {"bands"}, "bloch");
    rc.bloch.bands = get<int>(j["bloch"], "bands", rc.bloch.bands, "bloch");
    if (rc.bloch.bands < 1 || rc.bloch.bands > rc.lattice.dimension())
      throw ConfigError("bloch.bands must be in [1, basis dimension]");
  }
  rc.design = parse_design(j.value("design", json::object()), rc.seed);
  if (j.contains("sequence")) rc.sequence = parse_sequence(j["sequence"]);
  rc.scan = parse_scan(j.value("scan", json::object()));
  if (j.contains("estimate")) rc.estimate = parse_estimate(j["estimate"]);
  if (j.contains("autocorr")) {
    io::check_keys(j["autocorr"], {"table"}, "autocorr");
    rc.autocorr = AutocorrOptions{get<std::string>(j["autocorr"], "table", "", "autocorr")};
    if (rc.autocorr->table.empty()) throw ConfigError("autocorr.table is required");
  }
  if (j.contains("export")) {
    io::check_keys(j["export"], {"resolution_ns"}, "export");
    rc.export_opts.resolution_ns = get_positive(j["export"], "resolution_ns", 50.0, "export");
  }
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  const std::string text = io::read_file(path);
  return parse_run_config(text, std::filesystem::path(path).parent_path());
}

}  // namespace shaken::config
