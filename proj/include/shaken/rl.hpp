#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "shaken/fidelity.hpp"
#include "shaken/io.hpp"
#include "shaken/lattice.hpp"
#include "shaken/propagation.hpp"
#include "shaken/waveform.hpp"

namespace shaken::rl {

inline constexpr int kActionCount = 32;

inline double action_amplitude(int action) {
  if (action < 0 || action >= kActionCount) throw ConfigError("action index out of range");
  return std::numbers::pi * action / kActionCount;
}

enum class ParityMode { population, amplitude };

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.02;
  std::size_t decay_steps = 40000;  // environment steps

  double at(std::size_t step) const {
    if (step >= decay_steps) return end;
    const double f = static_cast<double>(step) / static_cast<double>(decay_steps);
    return start + (end - start) * f;
  }
};

struct RlConfig {
  double carrier = 12.0;
  int episode_length = 20;
  int samples_per_half_cycle = 26;
  // Global sin(carrier t): consecutive half-cycles alternate in sign and the
  // phase returns to zero at every join.
  bool alternate_sign = true;
  double gamma = 1.0;
  EpsilonSchedule epsilon{};
  std::size_t replay_capacity = 50000;
  std::size_t batch_size = 32;
  std::size_t warmup = 512;
  std::size_t sync_period = 250;  // gradient updates
  std::size_t updates_per_step = 1;
  double learning_rate = 3e-3;
  double grad_clip = 10.0;
  std::vector<int> hidden{64, 64};
  // Fixed affine map applied to features before the first layer:
  // x -> input_gain * (x - 0.5).
  double input_gain = 1.0;
  std::size_t episodes = 5000;
  std::size_t eval_every = 10;  // greedy rollout cadence, episodes
  ParityMode parity = ParityMode::population;
  std::uint64_t seed = 1;

  double half_period() const { return std::numbers::pi / carrier; }
  double dt() const { return half_period() / samples_per_half_cycle; }

  void validate() const {
    if (!(carrier > 0) || !std::isfinite(carrier)) throw ConfigError("rl: carrier must be > 0");
    if (episode_length <= 0) throw ConfigError("rl: episode length must be > 0");
    if (samples_per_half_cycle <= 0) throw ConfigError("rl: samples per half-cycle must be > 0");
    if (!(gamma > 0 && gamma <= 1)) throw ConfigError("rl: gamma must be in (0, 1]");
    if (!(epsilon.start >= 0 && epsilon.start <= 1 && epsilon.end >= 0 && epsilon.end <= epsilon.start))
      throw ConfigError("rl: epsilon schedule must satisfy 0 <= end <= start <= 1");
    if (epsilon.decay_steps == 0) throw ConfigError("rl: epsilon decay steps must be > 0");
    if (replay_capacity == 0 || batch_size == 0 || sync_period == 0 || updates_per_step == 0 || eval_every == 0)
      throw ConfigError("rl: capacities, batch size and periods must be > 0");
    if (batch_size > replay_capacity) throw ConfigError("rl: batch size exceeds replay capacity");
    if (!(learning_rate >= 0) || !(grad_clip > 0)) throw ConfigError("rl: learning rate must be >= 0, clip > 0");
    if (hidden.empty()) throw ConfigError("rl: need at least one hidden layer");
    if (!(input_gain > 0) || !std::isfinite(input_gain)) throw ConfigError("rl: input gain must be > 0");
    for (int h : hidden) {
      if (h <= 0) throw ConfigError("rl: hidden widths must be > 0");
    }
  }
};

using Features = Eigen::Vector3d;

// (||E||, ||O||, t / L) from the parity split of the momentum distribution.
inline Features features(const StateVector& state, int half_cycle, int episode_length,
                         ParityMode mode = ParityMode::population) {
  const int n = state.trunc();
  double even = 0.0, odd = 0.0;
  for (int m = -n; m <= n; ++m) {
    if (mode == ParityMode::population) {
      const double e = 0.5 * (state.population(m) + state.population(-m));
      const double o = 0.5 * (state.population(m) - state.population(-m));
      even += e * e;
      odd += o * o;
    } else {
      even += std::norm(0.5 * (state.at(m) + state.at(-m)));
      odd += std::norm(0.5 * (state.at(m) - state.at(-m)));
    }
  }
  return {std::sqrt(even), std::sqrt(odd), static_cast<double>(half_cycle) / episode_length};
}

// Multilayer perceptron: tanh hidden layers, linear output.
class Network {
 public:
  Network() = default;
  Network(int inputs, const std::vector<int>& hidden, int outputs, std::mt19937_64& rng, double input_gain = 1.0)
      : input_gain_(input_gain) {
    std::vector<int> sizes{inputs};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(outputs);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      const double limit = std::sqrt(6.0 / (sizes[l] + sizes[l + 1]));
      std::uniform_real_distribution<double> u(-limit, limit);
      Eigen::MatrixXd w(sizes[l + 1], sizes[l]);
      for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
      weights_.push_back(std::move(w));
      biases_.push_back(Eigen::VectorXd::Zero(sizes[l + 1]));
    }
  }

  std::size_t layers() const { return weights_.size(); }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }
  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }

  double input_gain() const { return input_gain_; }
  void set_input_gain(double g) { input_gain_ = g; }

  // Columns of x are samples.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd a = input_gain_ * (x.array() - 0.5).matrix();
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Eigen::MatrixXd z = (weights_[l] * a).colwise() + biases_[l];
      a = l + 1 < weights_.size() ? Eigen::MatrixXd(z.array().tanh()) : z;
    }
    return a;
  }

  Eigen::VectorXd forward(const Features& f) const { return forward(Eigen::MatrixXd(f)).col(0); }

  // One SGD step on the Huber loss of the selected outputs against `targets`.
  // Returns the mean loss before the step.
  double train_step(const Eigen::MatrixXd& x, const std::vector<int>& actions, const Eigen::VectorXd& targets,
                    double learning_rate, double clip) {
    const Eigen::Index batch = x.cols();
    std::vector<Eigen::MatrixXd> acts{input_gain_ * (x.array() - 0.5).matrix()};
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Eigen::MatrixXd z = (weights_[l] * acts.back()).colwise() + biases_[l];
      acts.push_back(l + 1 < weights_.size() ? Eigen::MatrixXd(z.array().tanh()) : z);
    }
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(acts.back().rows(), batch);
    double loss = 0.0;
    for (Eigen::Index b = 0; b < batch; ++b) {
      const double diff = acts.back()(actions[b], b) - targets(b);
      const double ad = std::abs(diff);
      loss += ad <= 1.0 ? 0.5 * diff * diff : ad - 0.5;
      delta(actions[b], b) = std::clamp(diff, -1.0, 1.0) / static_cast<double>(batch);
    }
    loss /= static_cast<double>(batch);

    std::vector<Eigen::MatrixXd> gw(weights_.size());
    std::vector<Eigen::VectorXd> gb(weights_.size());
    for (std::size_t l = weights_.size(); l-- > 0;) {
      gw[l] = delta * acts[l].transpose();
      gb[l] = delta.rowwise().sum();
      if (l > 0) delta = (weights_[l].transpose() * delta).cwiseProduct((1.0 - acts[l].array().square()).matrix());
    }
    double norm2 = 0.0;
    for (std::size_t l = 0; l < gw.size(); ++l) norm2 += gw[l].squaredNorm() + gb[l].squaredNorm();
    const double norm = std::sqrt(norm2);
    const double scale = norm > clip ? clip / norm : 1.0;
    if (learning_rate > 0.0) {
      for (std::size_t l = 0; l < weights_.size(); ++l) {
        weights_[l] -= learning_rate * scale * gw[l];
        biases_[l] -= learning_rate * scale * gb[l];
      }
    }
    return loss;
  }

  bool finite() const {
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
    }
    return true;
  }

  bool operator==(const Network& o) const {
    if (layers() != o.layers() || input_gain_ != o.input_gain_) return false;
    for (std::size_t l = 0; l < layers(); ++l) {
      if (weights_[l] != o.weights_[l] || biases_[l] != o.biases_[l]) return false;
    }
    return true;
  }

 private:
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
  double input_gain_ = 1.0;
};

struct Transition {
  Features state;
  int action = 0;
  double reward = 0.0;
  Features next;
  bool done = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) { data_.reserve(std::min<std::size_t>(capacity, 1 << 16)); }

  void push(const Transition& t) {
    if (data_.size() < capacity_) {
      data_.push_back(t);
    } else {
      data_[head_] = t;
    }
    head_ = (head_ + 1) % capacity_;
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }

  std::vector<const Transition*> sample(std::size_t n, std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
    std::vector<const Transition*> out(n);
    for (auto& p : out) p = &data_[pick(rng)];
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> data_;
};

template <class Vec>
int argmax(const Vec& v) {
  Eigen::Index i = 0;
  v.maxCoeff(&i);
  return static_cast<int>(i);
}

// y = r + gamma * Q_target(s', argmax_a Q_online(s', a)) for non-terminal s'.
inline Eigen::VectorXd double_dqn_targets(const Network& online, const Network& target,
                                          const std::vector<const Transition*>& batch, double gamma) {
  Eigen::MatrixXd next(3, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) next.col(b) = batch[b]->next;
  const Eigen::MatrixXd q_online = online.forward(next);
  const Eigen::MatrixXd q_target = target.forward(next);
  Eigen::VectorXd y(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    y(b) = batch[b]->reward;
    if (!batch[b]->done) y(b) += gamma * q_target(argmax(q_online.col(b)), b);
  }
  return y;
}

// Design problems for the episodic environment.
struct StateProblem {
  StateVector initial;
  StateVector target;
};

// Mirror half: the episode designs the first half, the reward is the channel
// fidelity of half + time_reverse(half).
struct MirrorHalfProblem {
  SubspaceChannel channel;
};

using Problem = std::variant<StateProblem, MirrorHalfProblem>;

inline StateProblem beamsplitter_problem(const LatticeParams& params, int target_band = 3) {
  return {bloch_state(params, 0).vector, bloch_state(params, target_band).vector};
}

inline Waveform assemble_mirror_from_half(const Waveform& half) {
  Waveform first = relabeled(half, SegmentKind::mirror_first_half);
  return concatenate({first, time_reverse(first)}, {});
}

// Waveform for an action sequence: half-cycle j is A_j sin over its own
// half period, sign (-1)^j when alternating.
inline Waveform actions_to_waveform(const std::vector<int>& actions, const RlConfig& cfg,
                                    SegmentKind label = SegmentKind::custom) {
  const double dt = cfg.dt();
  const std::size_t per = static_cast<std::size_t>(cfg.samples_per_half_cycle);
  Waveform w{dt, std::vector<double>(actions.size() * per), {}};
  for (std::size_t j = 0; j < actions.size(); ++j) {
    const double amp = action_amplitude(actions[j]) * (cfg.alternate_sign && j % 2 == 1 ? -1.0 : 1.0);
    for (std::size_t k = 0; k < per; ++k) {
      w.samples[j * per + k] = amp * std::sin(cfg.carrier * (static_cast<double>(k) + 0.5) * dt);
    }
  }
  if (!w.samples.empty()) w.markers.push_back({label, 0, w.samples.size()});
  return w;
}

// Terminal fidelity of a full episode, simulated from scratch sample by sample.
inline double evaluate_actions(const std::vector<int>& actions, const Problem& problem, const RlConfig& cfg,
                               const LatticeParams& params) {
  const Waveform w = actions_to_waveform(actions, cfg);
  const Propagator prop(params, w.dt);
  if (const auto* sp = std::get_if<StateProblem>(&problem)) {
    return state_fidelity(propagate_final(sp->initial, w, prop), sp->target);
  }
  const auto& mp = std::get<MirrorHalfProblem>(problem);
  return channel_fidelity(assemble_mirror_from_half(w), mp.channel, prop);
}

struct EpisodeState {
  StateVector state;
  int half_cycle = 0;
  Features feature;
  ComplexMatrix accumulated;  // product of applied half-cycles, mirror problems only
};

// Half-cycle unitaries are precomputed per action and sign, so a step is one
// dense matrix-vector product.
class Environment {
 public:
  Environment(const RlConfig& cfg, const LatticeParams& params, Problem problem)
      : cfg_(cfg), params_(params), problem_(std::move(problem)), prop_(params, cfg.dt()) {
    cfg_.validate();
    for (int a = 0; a < kActionCount; ++a) {
      Waveform w = actions_to_waveform({a}, cfg_);
      unitaries_[0][a] = waveform_unitary(w, prop_);
      for (double& x : w.samples) x = -x;
      unitaries_[1][a] = waveform_unitary(w, prop_);
    }
  }

  const RlConfig& config() const { return cfg_; }
  const Problem& problem() const { return problem_; }

  const StateVector& initial_state() const {
    if (const auto* sp = std::get_if<StateProblem>(&problem_)) return sp->initial;
    return std::get<MirrorHalfProblem>(problem_).channel.basis[0];
  }

  EpisodeState reset() const {
    EpisodeState s{initial_state(), 0, {}, {}};
    s.feature = features(s.state, 0, cfg_.episode_length, cfg_.parity);
    if (std::holds_alternative<MirrorHalfProblem>(problem_))
      s.accumulated = ComplexMatrix::Identity(params_.dimension(), params_.dimension());
    return s;
  }

  const ComplexMatrix& half_cycle_unitary(int action, int half_cycle) const {
    const int sign = cfg_.alternate_sign && half_cycle % 2 == 1 ? 1 : 0;
    return unitaries_[sign][action];
  }

  // Returns (reward, done).
  std::pair<double, bool> step(EpisodeState& s, int action) const {
    if (action < 0 || action >= kActionCount) throw ConfigError("action index out of range");
    if (s.half_cycle >= cfg_.episode_length) throw ConfigError("episode already finished");
    const ComplexMatrix& u = half_cycle_unitary(action, s.half_cycle);
    ComplexVector psi = u * s.state.amplitudes();
    prop_.check_overflow(psi, static_cast<std::size_t>(s.half_cycle));
    s.state = StateVector(s.state.trunc(), std::move(psi));
    if (std::holds_alternative<MirrorHalfProblem>(problem_)) s.accumulated = u * s.accumulated;
    ++s.half_cycle;
    s.feature = features(s.state, s.half_cycle, cfg_.episode_length, cfg_.parity);
    const bool done = s.half_cycle == cfg_.episode_length;
    return {done ? terminal_reward(s) : 0.0, done};
  }

 private:
  double terminal_reward(const EpisodeState& s) const {
    if (const auto* sp = std::get_if<StateProblem>(&problem_)) return state_fidelity(s.state, sp->target);
    const auto& chan = std::get<MirrorHalfProblem>(problem_).channel;
    // Time reversal acts as Theta U Theta^-1 = U^dag with Theta = parity *
    // conjugation, so the full mirror is Theta U^dag Theta^-1 U.
    const ComplexMatrix& u = s.accumulated;
    const ComplexMatrix ud = u.adjoint();
    const Eigen::Index d = u.rows();
    ComplexMatrix reversed(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) reversed(i, j) = std::conj(ud(d - 1 - i, d - 1 - j));
    const ComplexMatrix full = reversed * u;
    Matrix2c m;
    for (int j = 0; j < 2; ++j) {
      const ComplexVector out = full * chan.basis[j].amplitudes();
      for (int i = 0; i < 2; ++i) m(i, j) = chan.target_image(i).amplitudes().dot(out);
    }
    return channel_fidelity_from_matrix(m);
  }

  RlConfig cfg_;
  LatticeParams params_;
  Problem problem_;
  Propagator prop_;
  std::array<std::array<ComplexMatrix, kActionCount>, 2> unitaries_;
};

struct CurveRow {
  std::size_t episode = 0;
  double epsilon = 0.0;
  double best_fidelity = 0.0;
  double loss = 0.0;  // mean over the episode's updates, 0 before warmup
};

struct TrainResult {
  std::vector<int> best_actions;
  Waveform best_waveform;
  double best_fidelity = 0.0;
  double resimulated_fidelity = 0.0;
  std::vector<CurveRow> curve;
  Network online;
  Network target;
  bool diverged = false;
  std::size_t updates = 0;
};

inline std::vector<int> greedy_rollout(const Network& net, const Environment& env, double* fidelity) {
  EpisodeState s = env.reset();
  std::vector<int> actions;
  double reward = 0.0;
  bool done = false;
  while (!done) {
    const int a = argmax(net.forward(s.feature));
    actions.push_back(a);
    std::tie(reward, done) = env.step(s, a);
  }
  if (fidelity) *fidelity = reward;
  return actions;
}

inline TrainResult train(const RlConfig& cfg, const Problem& problem, const LatticeParams& params) {
  cfg.validate();
  const Environment env(cfg, params, problem);
  std::mt19937_64 rng(cfg.seed);
  TrainResult res;
  res.online = Network(3, cfg.hidden, kActionCount, rng, cfg.input_gain);
  res.target = res.online;
  ReplayBuffer replay(cfg.replay_capacity);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> any_action(0, kActionCount - 1);

  std::size_t steps = 0;
  res.best_fidelity = -1.0;
  auto consider = [&](const std::vector<int>& actions, double fid) {
    if (fid > res.best_fidelity) {
      res.best_fidelity = fid;
      res.best_actions = actions;
    }
  };

  for (std::size_t ep = 0; ep < cfg.episodes && !res.diverged; ++ep) {
    EpisodeState s = env.reset();
    std::vector<int> actions;
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    double reward = 0.0;
    bool done = false;
    const double eps_now = cfg.epsilon.at(steps);
    while (!done) {
      const double eps = cfg.epsilon.at(steps);
      const int a = unit(rng) < eps ? any_action(rng) : argmax(res.online.forward(s.feature));
      const Features before = s.feature;
      std::tie(reward, done) = env.step(s, a);
      actions.push_back(a);
      replay.push({before, a, reward, s.feature, done});
      ++steps;

      if (replay.size() >= std::max(cfg.warmup, cfg.batch_size)) {
        for (std::size_t u = 0; u < cfg.updates_per_step; ++u) {
          const auto batch = replay.sample(cfg.batch_size, rng);
          const Eigen::VectorXd y = double_dqn_targets(res.online, res.target, batch, cfg.gamma);
          Eigen::MatrixXd x(3, static_cast<Eigen::Index>(batch.size()));
          std::vector<int> acts(batch.size());
          for (std::size_t b = 0; b < batch.size(); ++b) {
            x.col(b) = batch[b]->state;
            acts[b] = batch[b]->action;
          }
          const double loss = res.online.train_step(x, acts, y, cfg.learning_rate, cfg.grad_clip);
          loss_sum += loss;
          ++loss_count;
          if (++res.updates % cfg.sync_period == 0) res.target = res.online;
          if (!std::isfinite(loss) || !res.online.finite()) {
            res.diverged = true;
            break;
          }
        }
      }
      if (res.diverged) break;
    }
    if (done) consider(actions, reward);
    if (!res.diverged && (ep + 1) % cfg.eval_every == 0) {
      double fid = 0.0;
      const auto greedy = greedy_rollout(res.online, env, &fid);
      consider(greedy, fid);
    }
    res.curve.push_back({ep, eps_now, std::max(res.best_fidelity, 0.0),
                         loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0});
  }

  if (res.best_actions.empty()) {
    res.best_fidelity = 0.0;
    return res;
  }
  res.best_waveform = actions_to_waveform(res.best_actions, cfg);
  res.resimulated_fidelity = evaluate_actions(res.best_actions, problem, cfg, params);
  return res;
}

inline constexpr const char* kCurveHeader = "episode,epsilon,best_fidelity,loss";

inline std::string curve_to_csv(const std::vector<CurveRow>& curve) {
  std::string out = std::string(kCurveHeader) + "\n";
  for (const auto& r : curve) {
    out += std::to_string(r.episode) + "," + io::format_number(r.epsilon) + "," + io::format_number(r.best_fidelity) +
           "," + io::format_number(r.loss) + "\n";
  }
  return out;
}

// Checkpoint: {"format": "shaken-dqn-checkpoint", "version": 1, "input_gain": g, "layers":
// [{"weights": [[row], ...], "bias": [...]}, ...]} for the online network.
inline nlohmann::json checkpoint_to_json(const Network& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < net.layers(); ++l) {
    nlohmann::json rows = nlohmann::json::array();
    const auto& w = net.weights()[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      std::vector<double> row(w.cols());
      for (Eigen::Index j = 0; j < w.cols(); ++j) row[j] = w(i, j);
      rows.push_back(row);
    }
    const auto& b = net.biases()[l];
    layers.push_back({{"weights", rows}, {"bias", std::vector<double>(b.data(), b.data() + b.size())}});
  }
  return {{"format", "shaken-dqn-checkpoint"}, {"version", 1}, {"input_gain", net.input_gain()}, {"layers", layers}};
}

inline Network checkpoint_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "shaken-dqn-checkpoint" || j.value("version", 0) != 1)
    throw ConfigError("checkpoint: unsupported format or version");
  Network net;
  try {
    net.set_input_gain(j.at("input_gain").get<double>());
    for (const auto& layer : j.at("layers")) {
      const auto& rows = layer.at("weights");
      const auto bias = layer.at("bias").get<std::vector<double>>();
      Eigen::MatrixXd w(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        const auto row = rows[i].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(row.size()) != w.cols()) throw ConfigError("checkpoint: ragged weight matrix");
        for (Eigen::Index k = 0; k < w.cols(); ++k) w(i, k) = row[k];
      }
      if (static_cast<Eigen::Index>(bias.size()) != w.rows()) throw ConfigError("checkpoint: bias size mismatch");
      if (!net.weights().empty() && net.weights().back().rows() != w.cols())
        throw ConfigError("checkpoint: layer shapes do not chain");
      net.weights().push_back(std::move(w));
      net.biases().push_back(Eigen::Map<const Eigen::VectorXd>(bias.data(), static_cast<Eigen::Index>(bias.size())));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
  if (net.layers() == 0) throw ConfigError("checkpoint: no layers");
  return net;
}

}  // namespace shaken::rl
