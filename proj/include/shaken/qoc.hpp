#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <optional>
#include <random>
#include <string_view>
#include <variant>
#include <vector>

#include "shaken/fidelity.hpp"
#include "shaken/parallel.hpp"
#include "shaken/propagation.hpp"
#include "shaken/waveform.hpp"

namespace shaken::qoc {

struct StateTarget {
  StateVector state;
};

struct ChannelTarget {
  SubspaceChannel channel;
};

using Target = std::variant<StateTarget, ChannelTarget>;

// minimize J(psi(T)) + sum_k (r/2) phi_k^2 dt
//
// J = 1 - |<target|psi(T)>|^2 for state targets and 1 - F_channel for
// channel targets. With `palindromic` set the free variables are the first
// half h of the waveform and the waveform is h followed by reverse(h).
struct Problem {
  LatticeParams params;
  StateVector initial;  // ignored for channel targets
  Target target;
  double horizon = 0.0;
  double r = 1e-4;
  std::optional<double> phi_max = std::numbers::pi;
  bool pin_endpoints = true;
  bool palindromic = false;

  std::size_t sample_count() const { return static_cast<std::size_t>(std::llround(horizon / params.dt)); }
  std::size_t variable_count() const { return palindromic ? sample_count() / 2 : sample_count(); }

  void validate() const {
    params.validate();
    if (!(horizon > 0) || !std::isfinite(horizon)) throw ConfigError("qoc: horizon must be > 0");
    if (!(r > 0) || !std::isfinite(r)) throw ConfigError("qoc: r must be > 0");
    if (phi_max && !(*phi_max > 0)) throw ConfigError("qoc: phi_max must be > 0");
    if (sample_count() < 2) throw ConfigError("qoc: horizon shorter than two samples");
    if (palindromic && sample_count() % 2 != 0) throw ConfigError("qoc: palindromic horizon needs an even sample count");
    if (const auto* s = std::get_if<StateTarget>(&target)) {
      if (std::abs(s->state.norm() - 1.0) > 1e-9) throw ConfigError("qoc: target state not normalized");
      if (std::abs(initial.norm() - 1.0) > 1e-9) throw ConfigError("qoc: initial state not normalized");
    } else {
      const auto& c = std::get<ChannelTarget>(target).channel;
      if (!(c.target.adjoint() * c.target).isIdentity(1e-9)) throw ConfigError("qoc: channel target not unitary");
    }
  }
};

struct Evaluation {
  double total = 0.0;
  double terminal = 0.0;
  double effort = 0.0;
  double fidelity = 0.0;
  std::vector<double> gradient;  // d total / d phi_k, one entry per waveform sample
};

namespace detail {

// Adds scale * d Re<chi|psi_K> / d phi_k to grad, given the forward
// trajectory and the terminal costate chi. One backward sweep.
inline void accumulate_overlap_gradient(const Waveform& w, const Propagator& prop, const Trajectory& traj,
                                        ComplexVector chi, double scale, std::vector<double>& grad) {
  const auto& n = prop.ladder();
  const std::size_t K = w.size();
  auto weighted = [&](const ComplexVector& c, const StateVector& s) {
    return c.dot(n.cast<Complex>().cwiseProduct(s.amplitudes()));
  };
  Complex upper = weighted(chi, traj[K]);
  for (std::size_t k = K; k-- > 0;) {
    prop.step_back(chi, w.samples[k]);
    const Complex lower = weighted(chi, traj[k]);
    grad[k] += scale * (Complex(0.0, 1.0) * (upper - lower)).real();
    upper = lower;
  }
}

}  // namespace detail

inline void check_shape(const Waveform& w, const Problem& prob) {
  if (w.size() != prob.sample_count() || std::abs(w.dt - prob.params.dt) > 1e-15 * prob.params.dt) {
    throw ConfigError("qoc: waveform does not span the problem horizon");
  }
}

inline Evaluation evaluate(const Waveform& w, const Problem& prob, const Propagator& prop, bool with_gradient) {
  check_shape(w, prob);
  w.validate();
  Evaluation ev;
  const std::size_t K = w.size();
  if (with_gradient) ev.gradient.assign(K, 0.0);

  for (double phi : w.samples) ev.effort += 0.5 * prob.r * phi * phi * w.dt;

  if (const auto* s = std::get_if<StateTarget>(&prob.target)) {
    const Trajectory traj = propagate(prob.initial, w, prop);
    const Complex overlap = s->state.inner(traj.back());
    ev.fidelity = std::norm(overlap);
    ev.terminal = 1.0 - ev.fidelity;
    if (with_gradient) {
      detail::accumulate_overlap_gradient(w, prop, traj, overlap * s->state.amplitudes(), -2.0, ev.gradient);
    }
  } else {
    const auto& chan = std::get<ChannelTarget>(prob.target).channel;
    std::array<Trajectory, 2> trajs{propagate(chan.basis[0], w, prop), propagate(chan.basis[1], w, prop)};
    const std::array<StateVector, 2> images{chan.target_image(0), chan.target_image(1)};
    Matrix2c m;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = images[i].inner(trajs[j].back());
    ev.fidelity = channel_fidelity_from_matrix(m);
    ev.terminal = 1.0 - ev.fidelity;
    if (with_gradient) {
      const Matrix2c g = m + Matrix2c::Identity() * m.trace();
      for (int j = 0; j < 2; ++j) {
        ComplexVector chi = g(0, j) * images[0].amplitudes() + g(1, j) * images[1].amplitudes();
        detail::accumulate_overlap_gradient(w, prop, trajs[j], std::move(chi), -1.0 / 3.0, ev.gradient);
      }
    }
  }
  ev.total = ev.terminal + ev.effort;
  if (with_gradient) {
    for (std::size_t k = 0; k < K; ++k) ev.gradient[k] += prob.r * w.samples[k] * w.dt;
  }
  if (!std::isfinite(ev.total)) throw NumericalError("qoc: non-finite cost");
  return ev;
}

inline Evaluation evaluate(const Waveform& w, const Problem& prob, bool with_gradient) {
  return evaluate(w, prob, Propagator(prob.params, prob.params.dt), with_gradient);
}

inline double total_cost(const Waveform& w, const Problem& prob) { return evaluate(w, prob, false).total; }

inline std::vector<double> cost_gradient(const Waveform& w, const Problem& prob) {
  return evaluate(w, prob, true).gradient;
}

// Variables <-> waveform for the palindromic parametrisation.
inline Waveform waveform_from_variables(const std::vector<double>& x, const Problem& prob) {
  Waveform w{prob.params.dt, x, {}};
  if (prob.palindromic) {
    w.samples.insert(w.samples.end(), x.rbegin(), x.rend());
    w.markers = {{SegmentKind::mirror_first_half, 0, x.size()},
                 {SegmentKind::mirror_second_half, x.size(), 2 * x.size()}};
  } else if (!x.empty()) {
    w.markers = {{SegmentKind::custom, 0, x.size()}};
  }
  return w;
}

inline std::vector<double> variables_from_waveform(const Waveform& w, const Problem& prob) {
  check_shape(w, prob);
  return {w.samples.begin(), w.samples.begin() + static_cast<std::ptrdiff_t>(prob.variable_count())};
}

inline std::vector<double> variable_gradient(const std::vector<double>& g, const Problem& prob) {
  if (!prob.palindromic) return g;
  const std::size_t h = prob.variable_count();
  std::vector<double> out(h);
  for (std::size_t k = 0; k < h; ++k) out[k] = g[k] + g[g.size() - 1 - k];
  return out;
}

enum class ExitReason { converged, max_iters, stalled };

inline std::string_view to_string(ExitReason e) {
  switch (e) {
    case ExitReason::converged: return "converged";
    case ExitReason::max_iters: return "max_iters";
    case ExitReason::stalled: return "stalled";
  }
  return "unknown";
}

struct Options {
  int max_iters = 1000;
  double grad_tol = 1e-9;
  double armijo = 1e-4;
  int max_halvings = 40;
  int memory = 10;  // L-BFGS pairs; 0 gives projected gradient descent
  double first_step = 0.1;  // rad, largest change on the first iteration
  std::uint64_t seed = 1;
  double init_amplitude = 0.3;
  double init_carrier = 12.0;  // units of omega_R
};

struct Result {
  Waveform waveform;
  std::vector<double> cost_history;
  std::vector<double> fidelity_history;
  std::vector<double> gradient_history;  // projected gradient norm per iterate
  double terminal_fidelity = 0.0;
  double total_cost = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  ExitReason exit = ExitReason::max_iters;
  std::uint64_t seed = 0;
};

// Low-amplitude sinusoid at the carrier frequency with a seeded random phase.
inline Waveform default_initial_waveform(const Problem& prob, const Options& opts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const double offset = phase(rng);
  std::vector<double> x(prob.variable_count());
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] = opts.init_amplitude * std::sin(opts.init_carrier * static_cast<double>(k) * prob.params.dt + offset);
  }
  if (prob.pin_endpoints && !x.empty()) {
    x.front() = 0.0;
    if (!prob.palindromic) x.back() = 0.0;
  }
  return waveform_from_variables(x, prob);
}

namespace detail {

struct Bounds {
  std::vector<char> pinned;
  double limit;

  double clamp(double v, std::size_t i) const {
    if (pinned[i]) return 0.0;
    return std::clamp(v, -limit, limit);
  }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

inline Result optimize(const Problem& prob, const Waveform& init, const Options& opts = {}) {
  prob.validate();
  const Propagator prop(prob.params, prob.params.dt);
  const std::size_t nv = prob.variable_count();

  detail::Bounds bounds{std::vector<char>(nv, 0), prob.phi_max.value_or(std::numeric_limits<double>::infinity())};
  if (prob.pin_endpoints && nv > 0) {
    bounds.pinned[0] = 1;
    if (!prob.palindromic) bounds.pinned[nv - 1] = 1;
  }

  std::vector<double> x = variables_from_waveform(init, prob);
  for (std::size_t i = 0; i < nv; ++i) x[i] = bounds.clamp(x[i], i);

  auto eval = [&](const std::vector<double>& v) {
    Evaluation ev = evaluate(waveform_from_variables(v, prob), prob, prop, true);
    ev.gradient = variable_gradient(ev.gradient, prob);
    return ev;
  };

  // Gradient with pinned and bound-active components removed.
  auto projected = [&](const std::vector<double>& v, const std::vector<double>& g) {
    std::vector<double> pg = g;
    for (std::size_t i = 0; i < nv; ++i) {
      if (bounds.pinned[i] || (v[i] >= bounds.limit && g[i] < 0) || (v[i] <= -bounds.limit && g[i] > 0)) pg[i] = 0.0;
    }
    return pg;
  };

  Result res;
  res.seed = opts.seed;
  Evaluation cur = eval(x);
  auto record = [&] {
    const std::vector<double> pg = projected(x, cur.gradient);
    res.cost_history.push_back(cur.total);
    res.fidelity_history.push_back(cur.fidelity);
    res.gradient_history.push_back(std::sqrt(detail::dot(pg, pg)));
  };
  record();

  std::deque<std::pair<std::vector<double>, std::vector<double>>> memory;
  res.exit = ExitReason::max_iters;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const std::vector<double> pg = projected(x, cur.gradient);
    const double gnorm = std::sqrt(detail::dot(pg, pg));
    res.gradient_norm = gnorm;
    if (gnorm <= opts.grad_tol) {
      res.exit = ExitReason::converged;
      break;
    }

    // Two-loop recursion on the projected gradient.
    std::vector<double> d = pg;
    std::vector<double> alpha(memory.size());
    for (std::size_t m = memory.size(); m-- > 0;) {
      const auto& [s, y] = memory[m];
      alpha[m] = detail::dot(s, d) / detail::dot(y, s);
      for (std::size_t i = 0; i < nv; ++i) d[i] -= alpha[m] * y[i];
    }
    if (!memory.empty()) {
      const auto& [s, y] = memory.back();
      const double gamma = detail::dot(s, y) / detail::dot(y, y);
      for (double& v : d) v *= gamma;
    } else {
      double gmax = 0.0;
      for (double v : pg) gmax = std::max(gmax, std::abs(v));
      for (double& v : d) v *= opts.first_step / gmax;
    }
    for (std::size_t m = 0; m < memory.size(); ++m) {
      const auto& [s, y] = memory[m];
      const double beta = detail::dot(y, d) / detail::dot(y, s);
      for (std::size_t i = 0; i < nv; ++i) d[i] += s[i] * (alpha[m] - beta);
    }
    for (std::size_t i = 0; i < nv; ++i) {
      d[i] = -d[i];
      if (pg[i] == 0.0 && cur.gradient[i] != 0.0) d[i] = 0.0;
      if (bounds.pinned[i]) d[i] = 0.0;
    }
    if (detail::dot(d, pg) >= 0.0) {
      memory.clear();
      double gmax = 0.0;
      for (double v : pg) gmax = std::max(gmax, std::abs(v));
      for (std::size_t i = 0; i < nv; ++i) d[i] = -pg[i] * opts.first_step / gmax;
    }

    bool accepted = false;
    double step = 1.0;
    std::vector<double> trial(nv);
    Evaluation next;
    for (int h = 0; h <= opts.max_halvings; ++h, step *= 0.5) {
      for (std::size_t i = 0; i < nv; ++i) trial[i] = bounds.clamp(x[i] + step * d[i], i);
      std::vector<double> delta(nv);
      for (std::size_t i = 0; i < nv; ++i) delta[i] = trial[i] - x[i];
      next = eval(trial);
      if (next.total < cur.total && next.total <= cur.total + opts.armijo * detail::dot(cur.gradient, delta)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.exit = ExitReason::stalled;
      break;
    }

    std::vector<double> s(nv), y(nv);
    for (std::size_t i = 0; i < nv; ++i) {
      s[i] = trial[i] - x[i];
      y[i] = next.gradient[i] - cur.gradient[i];
    }
    if (detail::dot(s, y) > 1e-16 * std::sqrt(detail::dot(s, s) * detail::dot(y, y)) && opts.memory > 0) {
      memory.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(memory.size()) > opts.memory) memory.pop_front();
    }
    x = trial;
    cur = std::move(next);
    res.iterations = iter + 1;
    record();
  }

  res.waveform = waveform_from_variables(x, prob);
  res.total_cost = cur.total;
  res.terminal_fidelity = cur.fidelity;
  if (res.exit != ExitReason::converged) {
    const std::vector<double> pg = projected(x, cur.gradient);
    res.gradient_norm = std::sqrt(detail::dot(pg, pg));
  }
  return res;
}

inline Result optimize(const Problem& prob, const Options& opts = {}) {
  prob.validate();
  return optimize(prob, default_initial_waveform(prob, opts, opts.seed), opts);
}

// Independent restarts with seeds opts.seed, opts.seed + 1, ...; the lowest
// total cost wins, ties going to the earliest seed.
inline Result optimize_multistart(const Problem& prob, const Options& opts, int starts, unsigned threads = 1) {
  if (starts < 1) throw ConfigError("qoc: need at least one start");
  std::vector<Result> results(static_cast<std::size_t>(starts));
  parallel_for(results.size(), threads, [&](std::size_t i) {
    Options o = opts;
    o.seed = opts.seed + i;
    results[i] = optimize(prob, o);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].total_cost < results[best].total_cost) best = i;
  }
  return results[best];
}

// Band-0 -> band `target_band` state transfer over `horizon_tau` recoil periods.
inline Problem beamsplitter_problem(const LatticeParams& params, double horizon_tau, int target_band = 3) {
  return {params,
          bloch_state(params, 0).vector,
          StateTarget{bloch_state(params, target_band).vector}, 2.0 * std::numbers::pi * horizon_tau};
}

// Palindromic mirror: a designed half followed by its time reverse. The
// horizon is snapped to an even number of samples.
inline Problem mirror_problem(const LatticeParams& params, double horizon_tau) {
  const double half = std::round(std::numbers::pi * horizon_tau / params.dt);
  Problem p{params, bloch_state(params, 0).vector, ChannelTarget{mirror_channel(params)}, 2.0 * half * params.dt};
  p.palindromic = true;
  return p;
}

}  // namespace shaken::qoc
