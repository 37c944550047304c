#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "shaken/constants.hpp"
#include "shaken/errors.hpp"
#include "shaken/interferometer.hpp"
#include "shaken/io.hpp"
#include "shaken/lattice.hpp"

namespace shaken::metrology {

inline constexpr double kNormalizationTolerance = 1e-9;
inline constexpr double kProbabilityFloor = 1e-12;

inline void check_distribution(std::span<const double> p, const char* what) {
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + ": probabilities must be finite and >= 0");
    s += v;
  }
  if (std::abs(s - 1.0) > kNormalizationTolerance) throw ConfigError(std::string(what) + ": distribution not normalized");
}

// Bits. 0 log(0/q) = 0; returns +inf when P(p) > 0 where Q(p) = 0.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ConfigError("kl_divergence: support sizes differ");
  check_distribution(p, "kl_divergence P");
  check_distribution(q, "kl_divergence Q");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return d;
}

namespace detail {

// KL(P || M) against the mixture, skipping the normalization checks.
inline double kl_to_mixture(std::span<const double> p, std::span<const double> q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    d += p[i] * std::log2(2.0 * p[i] / (p[i] + q[i]));
  }
  return d;
}

}  // namespace detail

// Jensen-Shannon divergence in bits, in [0, 1].
inline double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ConfigError("js_divergence: support sizes differ");
  check_distribution(p, "js_divergence P");
  check_distribution(q, "js_divergence Q");
  const double d = 0.5 * (detail::kl_to_mixture(p, q) + detail::kl_to_mixture(q, p));
  return std::clamp(d, 0.0, 1.0);
}

inline double js_divergence(const MomentumDistribution& p, const MomentumDistribution& q) {
  return js_divergence(std::span<const double>(p.probabilities), std::span<const double>(q.probabilities));
}

struct EstimationResult {
  double a_hat = 0.0;       // grid argmin, g
  double a_refined = 0.0;   // 3-point parabolic refinement, g
  std::size_t index = 0;
  double d_js_min = 0.0;
  std::vector<double> profile;
  bool alarm = false;       // near-degenerate secondary minimum
};

// argmin_a D_JS(P_obs || P(.|a)) over the table rows. `offset` shifts the
// reported acceleration (a bias term); the profile itself is unaffected.
inline EstimationResult mle_acceleration(const MomentumDistribution& observed, const ScanTable& table,
                                         double offset = 0.0) {
  if (table.size() == 0) throw ConfigError("mle_acceleration: empty table");
  EstimationResult r;
  r.profile.resize(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) r.profile[i] = js_divergence(observed, table.rows[i]);

  const auto& f = r.profile;
  r.index = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
  r.d_js_min = f[r.index];
  r.a_hat = table.grid[r.index] + offset;
  r.a_refined = r.a_hat;

  const std::size_t i = r.index;
  if (i > 0 && i + 1 < f.size()) {
    const double x0 = table.grid[i - 1], x1 = table.grid[i], x2 = table.grid[i + 1];
    const double f0 = f[i - 1], f1 = f[i], f2 = f[i + 1];
    const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    const double a = (x2 * (f1 - f0) + x1 * (f0 - f2) + x0 * (f2 - f1)) / denom;
    const double b = (x2 * x2 * (f0 - f1) + x1 * x1 * (f2 - f0) + x0 * x0 * (f1 - f2)) / denom;
    if (a > 0) r.a_refined = std::clamp(-b / (2.0 * a), x0, x2) + offset;
  }

  // A separate local minimum (not adjacent to the global one) within 1.1x of
  // it raises the alarm. A flat profile trips this too.
  const double threshold = 1.1 * r.d_js_min;
  for (std::size_t k = 0; k < f.size() && !r.alarm; ++k) {
    if (k + 1 >= i && k <= i + 1) continue;
    const bool left_ok = k == 0 || f[k] <= f[k - 1];
    const bool right_ok = k + 1 == f.size() || f[k] <= f[k + 1];
    r.alarm = left_ok && right_ok && f[k] <= threshold;
  }
  return r;
}

// Fisher information from a distribution triple at a - delta, a, a + delta.
//
// Bins with P(a) below the 1e-12 floor are dropped. If a dropped bin moves by
// more than 100x the floor across the stencil, its contribution cannot be
// bounded and NumericalError is thrown.
inline double fisher_from_stencil(const MomentumDistribution& minus, const MomentumDistribution& center,
                                  const MomentumDistribution& plus, double delta) {
  double info = 0.0;
  for (int j = 0; j < MomentumDistribution::kBins; ++j) {
    const double p = center.probabilities[j];
    const double dp = (plus.probabilities[j] - minus.probabilities[j]) / (2.0 * delta);
    if (p < kProbabilityFloor) {
      if (std::abs(dp) * delta > 100.0 * kProbabilityFloor) {
        throw NumericalError("fisher_information: bin below probability floor has a non-negligible derivative");
      }
      continue;
    }
    info += dp * dp / p;
  }
  return info;
}

// On-demand Fisher information: `model(a)` returns P(.|a).
template <class Model>
double fisher_information(const Model& model, double a, double delta) {
  if (!(delta > 0)) throw ConfigError("fisher_information: delta must be > 0");
  return fisher_from_stencil(model(a - delta), model(a), model(a + delta), delta);
}

// Table-only Fisher information at an interior grid index, differentiating
// across the neighbouring rows.
inline double fisher_information(const ScanTable& table, std::size_t index) {
  if (index == 0 || index + 1 >= table.size()) throw ConfigError("fisher_information: point must be interior to the grid");
  const double h1 = table.grid[index] - table.grid[index - 1];
  const double h2 = table.grid[index + 1] - table.grid[index];
  if (std::abs(h1 - h2) > 1e-9 * std::max(h1, h2)) throw ConfigError("fisher_information: grid must be locally uniform");
  return fisher_from_stencil(table.rows[index - 1], table.rows[index], table.rows[index + 1], 0.5 * (h1 + h2));
}

struct SensitivityPoint {
  double a = 0.0;
  double fisher = 0.0;
  double sensitivity = 0.0;  // g; +inf where fisher == 0
  bool finite = true;
};

inline double sensitivity_from_fisher(double info) {
  if (info < 0) throw ConfigError("sensitivity: Fisher information must be >= 0");
  return info == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / std::sqrt(info);
}

template <class Model>
std::vector<SensitivityPoint> sensitivity_curve(const Model& model, const std::vector<double>& grid, double delta,
                                                unsigned threads = 1) {
  std::vector<SensitivityPoint> out(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    const double info = fisher_information(model, grid[i], delta);
    const double s = sensitivity_from_fisher(info);
    out[i] = {grid[i], info, s, std::isfinite(s)};
  });
  return out;
}

// Ideal two-path device of total duration T: instantaneous split into
// +-4 hbar k, reflection at T/2, recombination at T. The arms differ by
// 8 hbar k for two legs of T/2, so Phi(a) = 8 k a (T/2)^2 = 2 k a T^2 and a
// two-outcome fringe gives I = (dPhi/da)^2. Returns 1/sqrt(I) in units of g.
inline double ideal_bound(double total_time_seconds, const PhysicalConstants& c) {
  if (!(total_time_seconds > 0)) throw ConfigError("ideal_bound: total time must be > 0");
  const double slope = 2.0 * c.wavenumber() * total_time_seconds * total_time_seconds * c.standard_gravity;
  return 1.0 / slope;
}

// D[i][j] = D_JS(row_i || row_j); exact symmetry and zero diagonal by construction.
using DivergenceMatrix = std::vector<std::vector<double>>;

inline DivergenceMatrix autocorrelation(const ScanTable& table, unsigned threads = 1) {
  const std::size_t n = table.size();
  DivergenceMatrix d(n, std::vector<double>(n, 0.0));
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = js_divergence(table.rows[i], table.rows[j]);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) d[i][j] = d[j][i];
  return d;
}

inline std::string divergence_to_csv(const DivergenceMatrix& d, const std::vector<double>& grid) {
  std::string out = "a_g";
  for (double a : grid) out += "," + io::format_number(a);
  out += "\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += io::format_number(grid[i]);
    for (double v : d[i]) out += "," + io::format_number(v);
    out += "\n";
  }
  return out;
}

inline std::string estimation_to_json(const EstimationResult& r, const std::string& config_digest) {
  std::string out = "{\n  \"a_hat_g\": " + io::format_number(r.a_hat) +
                    ",\n  \"a_refined_g\": " + io::format_number(r.a_refined) +
                    ",\n  \"d_js_min\": " + io::format_number(r.d_js_min) +
                    ",\n  \"alarm\": " + (r.alarm ? "true" : "false") + ",\n  \"profile\": [";
  for (std::size_t i = 0; i < r.profile.size(); ++i) out += (i ? ", " : "") + io::format_number(r.profile[i]);
  out += "],\n  \"config_digest\": \"" + config_digest + "\"\n}\n";
  return out;
}

}  // namespace shaken::metrology
