#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "shaken/constants.hpp"
#include "shaken/errors.hpp"
#include "shaken/waveform.hpp"

namespace shaken::io {

// Every number written to disk uses this rendering: 17 significant digits,
// enough to round-trip any double.
inline std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_number(std::string_view s) {
  std::string tmp(s);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tmp, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + tmp + "'");
  }
  if (used != tmp.size()) throw ConfigError("trailing characters in number: '" + tmp + "'");
  return v;
}

// FNV-1a 64-bit, rendered as 16 hex digits.
inline std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

inline nlohmann::json parse_json(std::string_view text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(what + ": malformed JSON: " + e.what());
  }
}

// Reject keys outside `allowed`.
inline void check_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

// Waveform file:
//   {"dt_us": number, "samples_rad": [numbers], "markers": [{"label","start","end"}]}
inline std::string waveform_to_json(const Waveform& w, const PhysicalConstants& c) {
  std::string out = "{\n  \"dt_us\": " + format_number(c.to_seconds(w.dt) * 1e6) + ",\n  \"samples_rad\": [";
  for (std::size_t k = 0; k < w.samples.size(); ++k) {
    out += (k == 0 ? "" : ", ");
    out += format_number(w.samples[k]);
  }
  out += "],\n  \"markers\": [";
  for (std::size_t i = 0; i < w.markers.size(); ++i) {
    const auto& m = w.markers[i];
    out += (i == 0 ? "" : ", ");
    out += "{\"label\": \"" + std::string(to_string(m.label)) + "\", \"start\": " + std::to_string(m.start) +
           ", \"end\": " + std::to_string(m.end) + "}";
  }
  out += "]\n}\n";
  return out;
}

inline Waveform waveform_from_json(const nlohmann::json& j, const PhysicalConstants& c) {
  check_keys(j, {"dt_us", "samples_rad", "markers"}, "waveform");
  if (!j.contains("dt_us") || !j.contains("samples_rad")) throw ConfigError("waveform: dt_us and samples_rad required");
  Waveform w;
  try {
    w.dt = c.to_dimensionless_time(j.at("dt_us").get<double>() * 1e-6);
    w.samples = j.at("samples_rad").get<std::vector<double>>();
    if (j.contains("markers")) {
      for (const auto& m : j.at("markers")) {
        check_keys(m, {"label", "start", "end"}, "waveform marker");
        w.markers.push_back({segment_kind_from_string(m.at("label").get<std::string>()),
                             m.at("start").get<std::size_t>(), m.at("end").get<std::size_t>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("waveform: ") + e.what());
  }
  w.validate();
  return w;
}

inline Waveform load_waveform(const std::string& path, const PhysicalConstants& c) {
  return waveform_from_json(parse_json(read_file(path), path), c);
}

// AWG text: header "time_s,phase_rad", zero-order hold onto a uniform grid
// of `resolution` seconds, LF line endings.
inline std::string export_awg(const Waveform& w, double resolution, const PhysicalConstants& c) {
  w.validate();
  if (!(resolution > 0) || !std::isfinite(resolution)) throw ConfigError("AWG resolution must be > 0");
  const double dt_phys = c.to_seconds(w.dt);
  const double ratio = dt_phys / resolution;
  if (ratio < 1.0 - 1e-12) throw ConfigError("AWG resolution is coarser than the waveform sample interval");
  const auto count = static_cast<std::size_t>(std::floor(static_cast<double>(w.size()) * ratio + 1e-9));
  std::string out = "time_s,phase_rad\n";
  for (std::size_t j = 0; j < count; ++j) {
    auto k = static_cast<std::size_t>(std::floor(static_cast<double>(j) / ratio + 1e-9));
    k = std::min(k, w.size() - 1);
    out += format_number(static_cast<double>(j) * resolution);
    out += ',';
    out += format_number(w.samples[k]);
    out += '\n';
  }
  return out;
}

// Inverse of export_awg on its own grid: one sample per row, dt taken from
// the row spacing (seconds) and converted to internal units.
inline Waveform import_awg(std::string_view text, const PhysicalConstants& c) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "time_s,phase_rad") throw ConfigError("AWG file: bad header");
  std::vector<double> times;
  Waveform w;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("AWG file: expected two columns");
    times.push_back(parse_number(std::string_view(line).substr(0, comma)));
    w.samples.push_back(parse_number(std::string_view(line).substr(comma + 1)));
  }
  if (times.size() < 2) throw ConfigError("AWG file: need at least two rows");
  w.dt = c.to_dimensionless_time(times[1] - times[0]);
  return w;
}

}  // namespace shaken::io
