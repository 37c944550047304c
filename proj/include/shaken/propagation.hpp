#pragma once

#include <vector>

#include "shaken/lattice.hpp"
#include "shaken/waveform.hpp"

namespace shaken {

// States at every sample boundary: front() is the initial state, back() the
// final one, size() == waveform.size() + 1.
using Trajectory = std::vector<StateVector>;

inline void check_initial(const StateVector& initial, const Propagator& prop) {
  if (initial.trunc() != prop.trunc()) throw ConfigError("state truncation does not match lattice parameters");
  if (std::abs(initial.norm() - 1.0) > 1e-9) throw ConfigError("initial state is not normalized");
}

inline StateVector propagate_final(const StateVector& initial, const Waveform& waveform, const Propagator& prop) {
  check_initial(initial, prop);
  ComplexVector psi = initial.amplitudes();
  for (std::size_t k = 0; k < waveform.size(); ++k) {
    prop.step(psi, waveform.samples[k]);
    prop.check_overflow(psi, k);
  }
  return StateVector(initial.trunc(), std::move(psi));
}

inline StateVector propagate_final(const StateVector& initial, const Waveform& waveform,
                                   const LatticeParams& params) {
  waveform.validate();
  return propagate_final(initial, waveform, Propagator(params, waveform.dt));
}

inline Trajectory propagate(const StateVector& initial, const Waveform& waveform, const Propagator& prop) {
  check_initial(initial, prop);
  Trajectory out;
  out.reserve(waveform.size() + 1);
  out.push_back(initial);
  ComplexVector psi = initial.amplitudes();
  for (std::size_t k = 0; k < waveform.size(); ++k) {
    prop.step(psi, waveform.samples[k]);
    prop.check_overflow(psi, k);
    out.emplace_back(initial.trunc(), psi);
  }
  return out;
}

inline Trajectory propagate(const StateVector& initial, const Waveform& waveform, const LatticeParams& params) {
  waveform.validate();
  return propagate(initial, waveform, Propagator(params, waveform.dt));
}

// Full unitary of a waveform (product of per-sample steps).
inline ComplexMatrix waveform_unitary(const Waveform& waveform, const Propagator& prop) {
  const int d = 2 * prop.trunc() + 1;
  ComplexMatrix u = ComplexMatrix::Identity(d, d);
  for (double phase : waveform.samples) u = prop.step_unitary(phase) * u;
  return u;
}

}  // namespace shaken
