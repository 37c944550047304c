#pragma once

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "shaken/fidelity.hpp"
#include "shaken/io.hpp"
#include "shaken/parallel.hpp"
#include "shaken/propagation.hpp"
#include "shaken/waveform.hpp"

namespace shaken {

// Beamsplitter, hold, mirror, hold, time-reversed beamsplitter.
struct SequencePlan {
  Waveform beamsplitter;
  Waveform mirror;
  double transport_hold = 100e-6;  // seconds, each direction
};

inline Waveform assemble(const SequencePlan& plan, const PhysicalConstants& c) {
  if (plan.beamsplitter.dt != plan.mirror.dt) throw ConfigError("assemble: components have mismatched dt");
  const double hold = c.to_dimensionless_time(plan.transport_hold);
  const Waveform bs = relabeled(plan.beamsplitter, SegmentKind::beamsplitter);
  Waveform mirror = plan.mirror;
  if (mirror.markers.empty() && mirror.size() > 0) mirror = relabeled(mirror, SegmentKind::custom);
  return concatenate({bs, mirror, time_reverse(bs)}, {hold, hold});
}

// Plan file: {"beamsplitter": path, "mirror": path, "hold_us": 100}, paths
// relative to the plan file.
inline SequencePlan load_sequence_plan(const std::string& path, const PhysicalConstants& c) {
  const auto j = io::parse_json(io::read_file(path), path);
  io::check_keys(j, {"beamsplitter", "mirror", "hold_us"}, path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto component = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw ConfigError(path + ": '" + key + "' must be a path");
    return io::load_waveform((base / j[key].get<std::string>()).string(), c);
  };
  SequencePlan plan{component("beamsplitter"), component("mirror")};
  if (j.contains("hold_us")) {
    if (!j["hold_us"].is_number() || !(j["hold_us"].get<double>() >= 0))
      throw ConfigError(path + ": 'hold_us' must be a number >= 0");
    plan.transport_hold = j["hold_us"].get<double>() * 1e-6;
  }
  return plan;
}

struct ResponseOptions {
  RampConvention ramp{};
};

// Band-0 start, acceleration ramp over the whole waveform, 7-bin readout.
class ResponseModel {
 public:
  ResponseModel(const LatticeParams& params, double dt, ResponseOptions opts = {})
      : params_(params), prop_(params, dt), ground_(bloch_state(params, 0).vector), opts_(opts) {}

  MomentumDistribution operator()(const Waveform& w, double a_g) const {
    const double atilde = AccelerationSignal{a_g}.dimensionless(params_.constants);
    return momentum_populations(propagate_final(ground_, effective_phase(w, atilde, opts_.ramp), prop_));
  }

  StateVector final_state(const Waveform& w, double a_g) const {
    const double atilde = AccelerationSignal{a_g}.dimensionless(params_.constants);
    return propagate_final(ground_, effective_phase(w, atilde, opts_.ramp), prop_);
  }

  const StateVector& ground() const { return ground_; }
  const LatticeParams& params() const { return params_; }

 private:
  LatticeParams params_;
  Propagator prop_;
  StateVector ground_;
  ResponseOptions opts_;
};

inline MomentumDistribution response(const Waveform& w, AccelerationSignal a, const LatticeParams& params,
                                     ResponseOptions opts = {}) {
  w.validate();
  return ResponseModel(params, w.dt, opts)(w, a.value);
}

struct ScanTable {
  std::vector<double> grid;  // units of g, strictly increasing
  std::vector<MomentumDistribution> rows;
  std::string sequence_digest;
  std::string params_digest;

  std::size_t size() const { return grid.size(); }
};

class ScanError : public NumericalError {
 public:
  ScanError(std::vector<std::size_t> indices, const std::string& first)
      : NumericalError("scan failed at " + std::to_string(indices.size()) + " grid point(s), first: " + first),
        indices_(std::move(indices)) {}
  const std::vector<std::size_t>& indices() const { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

inline std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points == 0) throw ConfigError("grid needs at least one point");
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return g;
}

inline std::vector<double> default_scan_grid() { return linear_grid(-0.125, 0.125, 101); }

inline std::string sequence_digest(const Waveform& w, const PhysicalConstants& c) {
  return io::digest(io::waveform_to_json(w, c));
}

inline std::string params_digest(const LatticeParams& p) {
  std::ostringstream os;
  os << io::format_number(p.depth) << ',' << p.trunc << ',' << io::format_number(p.dt) << ','
     << io::format_number(p.constants.hbar) << ',' << io::format_number(p.constants.atomic_mass) << ','
     << io::format_number(p.constants.wavelength) << ',' << io::format_number(p.constants.standard_gravity);
  return io::digest(os.str());
}

inline ScanTable scan(const Waveform& w, const std::vector<double>& grid, const LatticeParams& params,
                      unsigned threads = 1, ResponseOptions opts = {}) {
  w.validate();
  if (grid.empty()) throw ConfigError("scan grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ConfigError("scan grid must be strictly increasing");
  }
  const ResponseModel model(params, w.dt, opts);
  ScanTable table{grid, std::vector<MomentumDistribution>(grid.size()), sequence_digest(w, params.constants),
                  params_digest(params)};
  std::vector<std::string> errors(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    try {
      table.rows[i] = model(w, grid[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  std::vector<std::size_t> failed;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) failed.push_back(i);
  }
  if (!failed.empty()) throw ScanError(failed, errors[failed.front()]);
  return table;
}

inline constexpr const char* kScanHeader = "a_g,p_m6,p_m4,p_m2,p_0,p_p2,p_p4,p_p6,tail";

inline std::string scan_to_csv(const ScanTable& t) {
  std::string out = std::string(kScanHeader) + "\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += io::format_number(t.grid[i]);
    for (double p : t.rows[i].probabilities) out += "," + io::format_number(p);
    out += "," + io::format_number(t.rows[i].tail) + "\n";
  }
  return out;
}

inline ScanTable scan_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kScanHeader) throw ConfigError("scan CSV: bad header");
  ScanTable t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(io::parse_number(cell));
    if (cells.size() != 9) throw ConfigError("scan CSV: expected 9 columns");
    MomentumDistribution d;
    for (int j = 0; j < MomentumDistribution::kBins; ++j) d.probabilities[j] = cells[1 + j];
    d.tail = cells[8];
    t.grid.push_back(cells[0]);
    t.rows.push_back(d);
  }
  if (t.grid.empty()) throw ConfigError("scan CSV: no rows");
  for (std::size_t i = 1; i < t.grid.size(); ++i) {
    if (!(t.grid[i] > t.grid[i - 1])) throw ConfigError("scan CSV: grid must be strictly increasing");
  }
  return t;
}

}  // namespace shaken
