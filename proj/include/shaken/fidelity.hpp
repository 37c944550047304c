#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "shaken/lattice.hpp"
#include "shaken/propagation.hpp"

namespace shaken {

inline double state_fidelity(const StateVector& state, const StateVector& target) {
  return std::norm(target.inner(state));
}

using Matrix2c = Eigen::Matrix2cd;

// Two-dimensional subspace {basis[0], basis[1]} and the target operation on
// it, written in that basis: target|b_j> = sum_i target(i,j) |b_i>.
struct SubspaceChannel {
  std::array<StateVector, 2> basis;
  Matrix2c target = Matrix2c::Identity();

  // U_target |b_j>, expanded back into plane waves.
  StateVector target_image(int j) const {
    ComplexVector v = target(0, j) * basis[0].amplitudes() + target(1, j) * basis[1].amplitudes();
    return StateVector(basis[0].trunc(), std::move(v));
  }
};

// Pedersen et al. average-gate fidelity for a restriction M of dimension d.
inline double channel_fidelity_from_matrix(const Matrix2c& m) {
  constexpr double d = 2.0;
  const double hs = (m * m.adjoint()).trace().real();
  return (hs + std::norm(m.trace())) / (d * (d + 1.0));
}

// M_ij = <b_i| U_target^dag |psi_j(T)> with psi_j(0) = b_j.
inline Matrix2c channel_matrix(const Waveform& w, const SubspaceChannel& chan, const Propagator& prop) {
  Matrix2c m;
  for (int j = 0; j < 2; ++j) {
    const StateVector out = propagate_final(chan.basis[j], w, prop);
    for (int i = 0; i < 2; ++i) m(i, j) = chan.target_image(i).inner(out);
  }
  return m;
}

inline double channel_fidelity(const Waveform& w, const SubspaceChannel& chan, const Propagator& prop) {
  return channel_fidelity_from_matrix(channel_matrix(w, chan, prop));
}

inline double channel_fidelity(const Waveform& w, const SubspaceChannel& chan, const LatticeParams& params) {
  w.validate();
  return channel_fidelity(w, chan, Propagator(params, w.dt));
}

// |+-p0> = (|3> +- |4>)/sqrt(2): nearly pure +-4 hbar k waves.
inline std::array<StateVector, 2> counterpropagating_pair(const LatticeParams& params) {
  const auto bands = bloch_eigensystem(params);
  const ComplexVector& b3 = bands.at(3).vector.amplitudes();
  const ComplexVector& b4 = bands.at(4).vector.amplitudes();
  return {StateVector(params.trunc, (b3 + b4) / std::numbers::sqrt2),
          StateVector(params.trunc, (b3 - b4) / std::numbers::sqrt2)};
}

// Mirror: |p0><-p0| + |-p0><p0| on the counter-propagating pair.
inline SubspaceChannel mirror_channel(const LatticeParams& params) {
  SubspaceChannel chan{counterpropagating_pair(params), Matrix2c::Zero()};
  chan.target(0, 1) = 1.0;
  chan.target(1, 0) = 1.0;
  return chan;
}

}  // namespace shaken
