#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "shaken/constants.hpp"
#include "shaken/errors.hpp"

namespace shaken {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

// Amplitudes on the q = 0 plane-wave ladder |2n hbar k>, n in [-N, N].
// Storage index i corresponds to ladder index n = i - N.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(int trunc) : trunc_(trunc), amplitudes_(ComplexVector::Zero(2 * trunc + 1)) {}
  StateVector(int trunc, ComplexVector amplitudes) : trunc_(trunc), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != 2 * trunc_ + 1) throw ConfigError("state length must be 2N+1");
  }

  // Pure plane wave with momentum 2 n hbar k.
  static StateVector plane_wave(int trunc, int n) {
    StateVector s(trunc);
    s.at(n) = 1.0;
    return s;
  }

  int trunc() const { return trunc_; }
  int dimension() const { return 2 * trunc_ + 1; }
  Complex& at(int n) { return amplitudes_(n + trunc_); }
  const Complex& at(int n) const { return amplitudes_(n + trunc_); }
  double population(int n) const { return std::norm(at(n)); }

  const ComplexVector& amplitudes() const { return amplitudes_; }
  ComplexVector& amplitudes() { return amplitudes_; }

  double norm() const { return amplitudes_.norm(); }
  void normalize() { amplitudes_ /= amplitudes_.norm(); }

  // c_n -> c_{-n}
  StateVector mirrored() const {
    StateVector out(trunc_);
    for (int n = -trunc_; n <= trunc_; ++n) out.at(n) = at(-n);
    return out;
  }

  // <this|other>
  Complex inner(const StateVector& other) const { return amplitudes_.dot(other.amplitudes_); }

 private:
  int trunc_ = 0;
  ComplexVector amplitudes_;
};

struct BlochState {
  int band = 0;
  double quasimomentum = 0.0;
  double energy = 0.0;  // E_R
  StateVector vector;
};

// Populations of p in {-6, -4, ..., +6} hbar k, renormalized over the window.
struct MomentumDistribution {
  static constexpr int kBins = 7;
  std::array<double, kBins> probabilities{};
  double tail = 0.0;  // probability outside the window before renormalization

  MomentumDistribution mirrored() const {
    MomentumDistribution out = *this;
    std::reverse(out.probabilities.begin(), out.probabilities.end());
    return out;
  }
};

// H(phi) = 4 n^2 on the diagonal, (V0/4) e^{+i phi} coupling n -> n+1.
inline ComplexMatrix hamiltonian_matrix(const LatticeParams& params, double phase) {
  params.validate();
  if (!std::isfinite(phase)) throw ConfigError("lattice phase must be finite");
  const int N = params.trunc;
  const int d = params.dimension();
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  const Complex c = params.coupling() * std::polar(1.0, phase);
  for (int i = 0; i < d; ++i) {
    const double n = i - N;
    h(i, i) = 4.0 * n * n;
    if (i + 1 < d) {
      h(i + 1, i) = c;
      h(i, i + 1) = std::conj(c);
    }
  }
  return h;
}

namespace detail {

// Fix the arbitrary sign of a real eigenvector: the largest-magnitude
// component, ties resolved toward larger n, is made positive.
inline void fix_sign(Eigen::VectorXd& v) {
  const double vmax = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = v.size() - 1; i >= 0; --i) {
    if (std::abs(v(i)) >= vmax * (1.0 - 1e-9)) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

inline Eigen::MatrixXd real_hamiltonian(const LatticeParams& params) {
  return hamiltonian_matrix(params, 0.0).real();
}

}  // namespace detail

// All q = 0 bands in ascending energy order.
inline std::vector<BlochState> bloch_eigensystem(const LatticeParams& params) {
  params.validate();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(detail::real_hamiltonian(params));
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  std::vector<BlochState> bands;
  bands.reserve(params.dimension());
  for (int b = 0; b < params.dimension(); ++b) {
    Eigen::VectorXd v = solver.eigenvectors().col(b);
    detail::fix_sign(v);
    bands.push_back({b, 0.0, solver.eigenvalues()(b), StateVector(params.trunc, v.cast<Complex>())});
  }
  return bands;
}

inline BlochState bloch_state(const LatticeParams& params, int band) {
  auto bands = bloch_eigensystem(params);
  if (band < 0 || band >= static_cast<int>(bands.size())) throw ConfigError("band index out of range");
  return bands[band];
}

inline MomentumDistribution momentum_populations(const StateVector& state) {
  MomentumDistribution out;
  double window = 0.0;
  for (int j = 0; j < MomentumDistribution::kBins; ++j) {
    const int n = j - 3;
    const double p = std::abs(n) <= state.trunc() ? state.population(n) : 0.0;
    out.probabilities[j] = p;
    window += p;
  }
  const double total = state.amplitudes().squaredNorm();
  out.tail = std::clamp(1.0 - window / total, 0.0, 1.0);
  if (window > 0) {
    for (double& p : out.probabilities) p /= window;
  }
  return out;
}

// Exact piecewise-constant stepping.
//
// A constant phase is a lattice translation, H(phi) = D(phi) H(0) D(phi)^dag
// with D = diag(e^{i n phi}), so exp(-i H(phi) dt) = D exp(-i H(0) dt) D^dag.
// The static exponential comes from one eigendecomposition; every step is
// then two diagonal phase multiplies and one dense matrix-vector product.
class Propagator {
 public:
  static constexpr double kOverflowThreshold = 1e-6;

  Propagator(const LatticeParams& params, double dt) : trunc_(params.trunc), dt_(dt) {
    params.validate();
    if (!std::isfinite(dt) || !(dt > 0)) throw ConfigError("dt must be finite and > 0");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(detail::real_hamiltonian(params));
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    const Eigen::MatrixXd& v = solver.eigenvectors();
    ComplexVector phases(v.cols());
    for (Eigen::Index i = 0; i < v.cols(); ++i) phases(i) = std::polar(1.0, -solver.eigenvalues()(i) * dt);
    step_ = v.cast<Complex>() * phases.asDiagonal() * v.transpose().cast<Complex>();
    step_adjoint_ = step_.adjoint();
    ladder_ = Eigen::VectorXd::LinSpaced(params.dimension(), -trunc_, trunc_);
  }
  explicit Propagator(const LatticeParams& params) : Propagator(params, params.dt) {}

  int trunc() const { return trunc_; }
  double dt() const { return dt_; }
  const Eigen::VectorXd& ladder() const { return ladder_; }

  ComplexVector translation(double phase) const {
    ComplexVector d(ladder_.size());
    for (Eigen::Index i = 0; i < ladder_.size(); ++i) d(i) = std::polar(1.0, ladder_(i) * phase);
    return d;
  }

  // psi <- exp(-i H(phase) dt) psi
  void step(ComplexVector& psi, double phase) const {
    const ComplexVector d = translation(phase);
    psi = d.cwiseProduct(step_ * d.conjugate().cwiseProduct(psi));
  }

  // chi <- exp(+i H(phase) dt) chi
  void step_back(ComplexVector& chi, double phase) const {
    const ComplexVector d = translation(phase);
    chi = d.cwiseProduct(step_adjoint_ * d.conjugate().cwiseProduct(chi));
  }

  ComplexMatrix step_unitary(double phase) const {
    const ComplexVector d = translation(phase);
    return d.asDiagonal() * step_ * d.conjugate().asDiagonal();
  }

  double edge_population(const ComplexVector& psi) const {
    return std::norm(psi(0)) + std::norm(psi(psi.size() - 1));
  }

  void check_overflow(const ComplexVector& psi, std::size_t step) const {
    const double edge = edge_population(psi);
    if (!(edge <= kOverflowThreshold)) throw BasisOverflowError(step, edge);
  }

 private:
  int trunc_;
  double dt_;
  ComplexMatrix step_;
  ComplexMatrix step_adjoint_;
  Eigen::VectorXd ladder_;
};

// Reference route: exponentiate H(phase) directly by its own Hermitian
// eigendecomposition. Used to cross-check the translation identity.
inline ComplexMatrix direct_step_unitary(const LatticeParams& params, double phase, double dt) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hamiltonian_matrix(params, phase));
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  ComplexVector phases(solver.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(1.0, -solver.eigenvalues()(i) * dt);
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace shaken
