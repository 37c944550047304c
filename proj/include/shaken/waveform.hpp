#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "shaken/constants.hpp"
#include "shaken/errors.hpp"

namespace shaken {

enum class SegmentKind { beamsplitter, hold, mirror_first_half, mirror_second_half, recombiner, custom };

inline std::string_view to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::beamsplitter: return "beamsplitter";
    case SegmentKind::hold: return "hold";
    case SegmentKind::mirror_first_half: return "mirror-first-half";
    case SegmentKind::mirror_second_half: return "mirror-second-half";
    case SegmentKind::recombiner: return "recombiner";
    case SegmentKind::custom: return "custom";
  }
  return "custom";
}

inline SegmentKind segment_kind_from_string(std::string_view s) {
  for (auto k : {SegmentKind::beamsplitter, SegmentKind::hold, SegmentKind::mirror_first_half,
                 SegmentKind::mirror_second_half, SegmentKind::recombiner, SegmentKind::custom}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown segment label '" + std::string(s) + "'");
}

// Label a segment takes when the waveform is played backwards.
inline SegmentKind reversed_kind(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::beamsplitter: return SegmentKind::recombiner;
    case SegmentKind::recombiner: return SegmentKind::beamsplitter;
    case SegmentKind::mirror_first_half: return SegmentKind::mirror_second_half;
    case SegmentKind::mirror_second_half: return SegmentKind::mirror_first_half;
    default: return kind;
  }
}

// Half-open sample range [start, end).
struct Marker {
  SegmentKind label = SegmentKind::custom;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Marker&) const = default;
};

// Uniformly sampled shaking phase. Sample k holds over [k dt, (k+1) dt).
struct Waveform {
  double dt = 0.01;
  std::vector<double> samples;
  std::vector<Marker> markers;

  std::size_t size() const { return samples.size(); }
  double duration() const { return dt * static_cast<double>(samples.size()); }

  void validate() const {
    if (!std::isfinite(dt) || !(dt > 0)) throw ConfigError("waveform dt must be finite and > 0");
    for (double s : samples) {
      if (!std::isfinite(s)) throw ConfigError("waveform samples must be finite");
    }
    std::size_t cursor = 0;
    for (const auto& m : markers) {
      if (m.start > m.end || m.end > samples.size() || m.start < cursor) {
        throw ConfigError("waveform markers must be ordered, non-overlapping and in bounds");
      }
      cursor = m.end;
    }
  }

  bool operator==(const Waveform&) const = default;
};

inline Waveform constant_waveform(double dt, std::size_t count, double value,
                                  SegmentKind label = SegmentKind::custom) {
  Waveform w{dt, std::vector<double>(count, value), {}};
  if (count > 0) w.markers.push_back({label, 0, count});
  return w;
}

inline Waveform time_reverse(const Waveform& w) {
  Waveform out{w.dt, {w.samples.rbegin(), w.samples.rend()}, {}};
  const std::size_t k = w.samples.size();
  out.markers.reserve(w.markers.size());
  for (auto it = w.markers.rbegin(); it != w.markers.rend(); ++it) {
    out.markers.push_back({reversed_kind(it->label), k - it->end, k - it->start});
  }
  return out;
}

inline std::size_t hold_sample_count(double hold_duration, double dt) {
  if (!(hold_duration >= 0) || !std::isfinite(hold_duration)) throw ConfigError("hold duration must be >= 0");
  return static_cast<std::size_t>(std::llround(hold_duration / dt));
}

// Abut segments; holds[i] (dimensionless time) goes between parts[i] and
// parts[i+1] and repeats the last phase of parts[i]. An empty `holds` means
// no holds at all.
inline Waveform concatenate(const std::vector<Waveform>& parts, const std::vector<double>& holds = {}) {
  if (parts.empty()) throw ConfigError("concatenate needs at least one segment");
  if (!holds.empty() && holds.size() + 1 != parts.size()) {
    throw ConfigError("concatenate needs one hold per gap between segments");
  }
  const double dt = parts.front().dt;
  Waveform out{dt, {}, {}};
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Waveform& p = parts[i];
    if (p.dt != dt) throw ConfigError("concatenate: segments have mismatched dt");
    const std::size_t offset = out.samples.size();
    out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
    for (const auto& m : p.markers) out.markers.push_back({m.label, m.start + offset, m.end + offset});
    if (i < holds.size()) {
      const std::size_t count = hold_sample_count(holds[i], dt);
      if (count == 0) continue;
      const double phase = out.samples.empty() ? 0.0 : out.samples.back();
      const std::size_t start = out.samples.size();
      out.samples.insert(out.samples.end(), count, phase);
      out.markers.push_back({SegmentKind::hold, start, start + count});
    }
  }
  return out;
}

// A uniform acceleration in units of g.
struct AccelerationSignal {
  double value = 0.0;

  double dimensionless(const PhysicalConstants& c) const {
    if (!std::isfinite(value)) throw ConfigError("acceleration must be finite");
    return c.dimensionless_acceleration(value);
  }
};

// How the acceleration ramp is laid over a waveform. `time_origin` shifts the
// ramp's t = 0 relative to the first sample (dimensionless time); `sign`
// flips the chirp convention.
struct RampConvention {
  double time_origin = 0.0;
  double sign = 1.0;
};

// beta_k = phi_k - atilde * t_k^2 with t_k = k dt (from x_g = -a t^2 / 2).
inline Waveform effective_phase(const Waveform& w, double atilde, RampConvention conv = {}) {
  if (atilde == 0.0) return w;
  Waveform out = w;
  for (std::size_t k = 0; k < out.samples.size(); ++k) {
    const double t = static_cast<double>(k) * w.dt - conv.time_origin;
    out.samples[k] -= conv.sign * atilde * t * t;
  }
  return out;
}

inline Waveform effective_phase(const Waveform& w, AccelerationSignal a, const PhysicalConstants& c,
                                RampConvention conv = {}) {
  return effective_phase(w, a.dimensionless(c), conv);
}

// phi(t) = amplitude * sin(omega t + offset), sampled at interval midpoints.
inline Waveform sine_waveform(double dt, std::size_t count, double amplitude, double omega, double offset,
                              SegmentKind label = SegmentKind::custom) {
  Waveform w{dt, std::vector<double>(count), {}};
  for (std::size_t k = 0; k < count; ++k) {
    w.samples[k] = amplitude * std::sin(omega * (static_cast<double>(k) + 0.5) * dt + offset);
  }
  if (count > 0) w.markers.push_back({label, 0, count});
  return w;
}

inline Waveform relabeled(Waveform w, SegmentKind label) {
  w.markers.clear();
  if (!w.samples.empty()) w.markers.push_back({label, 0, w.samples.size()});
  return w;
}

}  // namespace shaken
