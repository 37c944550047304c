#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "shaken/errors.hpp"

namespace shaken {

// CODATA 2018 values. The atomic mass is 86.909180527 u for rubidium-87.
struct PhysicalConstants {
  double hbar = 1.054571817e-34;                       // J s
  double atomic_mass = 86.909180527 * 1.66053906660e-27;  // kg
  double wavelength = 852e-9;                          // m
  double standard_gravity = 9.80665;                   // m/s^2

  double wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }
  double recoil_energy() const {
    const double k = wavenumber();
    return hbar * hbar * k * k / (2.0 * atomic_mass);
  }
  double recoil_frequency() const { return recoil_energy() / hbar; }  // rad/s
  double recoil_period() const { return 2.0 * std::numbers::pi / recoil_frequency(); }

  // Conversions between seconds and the internal time unit 1/omega_R.
  double to_dimensionless_time(double seconds) const { return seconds * recoil_frequency(); }
  double to_seconds(double dimensionless) const { return dimensionless / recoil_frequency(); }

  // k a / omega_R^2 for an acceleration given in units of g.
  double dimensionless_acceleration(double a_g) const {
    const double w = recoil_frequency();
    return wavenumber() * a_g * standard_gravity / (w * w);
  }

  void validate() const {
    if (!(hbar > 0) || !(atomic_mass > 0) || !(wavelength > 0) || !(standard_gravity > 0) ||
        !std::isfinite(hbar + atomic_mass + wavelength + standard_gravity)) {
      throw ConfigError("physical constants must be finite and positive");
    }
  }
};

// Lattice configuration in internal units: energies in E_R, time in 1/omega_R.
//
// `depth` is the peak-to-peak lattice depth V0, i.e. the potential is
// (V0/2) cos(2kx + phi) up to a constant, so neighbouring plane waves couple
// with strength V0/4.
struct LatticeParams {
  double depth = 10.0;
  int trunc = 10;
  double dt = 0.01;
  PhysicalConstants constants{};

  int dimension() const { return 2 * trunc + 1; }
  double coupling() const { return depth / 4.0; }

  void validate() const {
    if (!std::isfinite(depth) || depth < 0) throw ConfigError("lattice depth must be finite and >= 0");
    if (trunc < 6) throw ConfigError("basis truncation must be >= 6");
    if (!std::isfinite(dt) || !(dt > 0)) throw ConfigError("dt must be finite and > 0");
    constants.validate();
  }
};

}  // namespace shaken
