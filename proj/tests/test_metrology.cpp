#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "shaken/metrology.hpp"

using namespace shaken;
using namespace shaken::metrology;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const LatticeParams kParams{};

MomentumDistribution dist(std::initializer_list<double> p) {
  MomentumDistribution d;
  std::copy(p.begin(), p.end(), d.probabilities.begin());
  return d;
}

// Smooth fringe family over the 7 bins, asymmetric in a. The period exceeds the grid span.
MomentumDistribution fringe(double a) {
  MomentumDistribution d;
  double s = 0.0;
  for (int j = 0; j < 7; ++j) {
    d.probabilities[j] = 1.0 + 0.8 * std::cos(20.0 * a + 0.9 * j + 0.2 * j * j);
    s += d.probabilities[j];
  }
  for (double& p : d.probabilities) p /= s;
  return d;
}

ScanTable table_of(MomentumDistribution (*f)(double), const std::vector<double>& grid) {
  ScanTable t{grid, {}, "", ""};
  for (double a : grid) t.rows.push_back(f(a));
  return t;
}

std::array<double, 7> random_distribution(std::mt19937_64& rng) {
  std::gamma_distribution<double> g(0.5, 1.0);
  std::array<double, 7> p{};
  double s = 0.0;
  for (double& x : p) s += (x = g(rng));
  if (rng() % 4 == 0) {
    const int k = static_cast<int>(rng() % 7);
    s -= p[k];
    p[k] = 0.0;
  }
  for (double& x : p) x /= s;
  return p;
}

// Ideal two-arm device simulated directly in the plane-wave basis: a kick
// changing n by dn at time t multiplies the amplitude by exp(i dn phi(t)) with
// phi(t) = -atilde t^2 the lattice phase ramp, free evolution is exp(-i 4 n^2 dt).
// Returns (P(n = 0), 1 - P(n = 0)) after split, reflection and recombination.
MomentumDistribution two_path(double a_g, double total_dimensionless) {
  const double at = AccelerationSignal{a_g}.dimensionless(kParams.constants);
  const double T = total_dimensionless;
  auto phi = [&](double t) { return -at * t * t; };
  std::complex<double> sum = 0.0;
  for (int arm : {+1, -1}) {
    std::complex<double> amp = 1.0 / std::sqrt(2.0);
    int n = 0;
    const std::array<std::pair<double, int>, 3> kicks{{{0.0, 2 * arm}, {T / 2, -4 * arm}, {T, 2 * arm}}};
    double last = 0.0;
    for (const auto& [t, dn] : kicks) {
      amp *= std::polar(1.0, -4.0 * n * n * (t - last));
      amp *= std::polar(1.0, dn * phi(t));
      n += dn;
      last = t;
    }
    REQUIRE(n == 0);
    sum += amp / std::sqrt(2.0);
  }
  return dist({std::norm(sum), 1.0 - std::norm(sum), 0, 0, 0, 0, 0});
}

}  // namespace

TEST_CASE("KL divergence") {
  const auto p = dist({1, 0, 0, 0, 0, 0, 0});
  const auto q = dist({0.5, 0.5, 0, 0, 0, 0, 0});
  CHECK(kl_divergence(p.probabilities, p.probabilities) == 0.0);
  CHECK_THAT(kl_divergence(p.probabilities, q.probabilities), WithinAbs(1.0, 1e-15));
  CHECK(std::isinf(kl_divergence(p.probabilities, dist({0, 1, 0, 0, 0, 0, 0}).probabilities)));
  CHECK_THROWS_AS(kl_divergence(dist({0.5, 0.4, 0, 0, 0, 0, 0}).probabilities, q.probabilities), ConfigError);
}

TEST_CASE("JS divergence examples") {
  const auto p = dist({1, 0, 0, 0, 0, 0, 0});
  const auto q = dist({0.5, 0.5, 0, 0, 0, 0, 0});
  CHECK(js_divergence(p, p) == 0.0);
  CHECK_THAT(js_divergence(p, dist({0, 0, 0, 1, 0, 0, 0})), WithinAbs(1.0, 1e-15));
  // 1/2 (log2(4/3) + 1/2 log2(2/3) + 1/2), evaluated by hand.
  const double oracle = 0.5 * (std::log2(4.0 / 3.0) + 0.5 * std::log2(2.0 / 3.0) + 0.5);
  CHECK_THAT(js_divergence(p, q), WithinAbs(oracle, 1e-15));
  CHECK_THAT(js_divergence(p, q), WithinAbs(0.311278, 1e-6));
}

TEST_CASE("JS divergence properties on random triples") {
  std::mt19937_64 rng(42);
  int failures = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto p = random_distribution(rng), q = random_distribution(rng), r = random_distribution(rng);
    const double pq = js_divergence(p, q), pr = js_divergence(p, r), qr = js_divergence(q, r);
    if (!(pq >= 0.0 && pq <= 1.0)) ++failures;
    if (pq != js_divergence(q, p)) ++failures;
    if (js_divergence(p, p) > 1e-12) ++failures;
    if (std::sqrt(pr) > std::sqrt(pq) + std::sqrt(qr) + 1e-12) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("maximum-likelihood estimation") {
  const auto grid = linear_grid(-0.125, 0.125, 101);
  const ScanTable table = table_of(fringe, grid);
  SECTION("identity on noiseless rows") {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto r = mle_acceleration(table.rows[i], table);
      CHECK(r.index == i);
      CHECK(r.a_hat == grid[i]);
      CHECK(r.d_js_min <= 1e-15);
      CHECK(r.profile.size() == grid.size());
      for (double v : r.profile) CHECK(v >= r.d_js_min);
    }
  }
  SECTION("offset shifts the report only") {
    const auto r0 = mle_acceleration(table.rows[40], table);
    const auto r1 = mle_acceleration(table.rows[40], table, 0.01);
    CHECK(r1.profile == r0.profile);
    CHECK_THAT(r1.a_hat, WithinAbs(r0.a_hat + 0.01, 1e-15));
  }
  SECTION("sub-grid refinement") {
    const auto r = mle_acceleration(fringe(grid[30] + 0.3 * (grid[31] - grid[30])), table);
    CHECK(r.index == 30);
    CHECK(r.a_refined > grid[30]);
    CHECK(r.a_refined < grid[31]);
  }
  SECTION("flat profile") {
    ScanTable flat{linear_grid(0, 1, 5), std::vector<MomentumDistribution>(5, fringe(0.0)), "", ""};
    const auto r = mle_acceleration(fringe(0.1), flat);
    CHECK(r.index == 0);
    CHECK(r.alarm);
  }
  SECTION("mirrored observation of a symmetric family") {
    auto symmetric = [](double a) {
      MomentumDistribution d;
      for (int j = 0; j < 7; ++j) d.probabilities[j] = 1.0 + 0.6 * std::sin(30 * a * (j - 3) + 0.3 * (j - 3) * (j - 3));
      double s = 0;
      for (double p : d.probabilities) s += p;
      for (double& p : d.probabilities) p /= s;
      return d;
    };
    ScanTable t{grid, {}, "", ""};
    for (double a : grid) t.rows.push_back(symmetric(a));
    const auto r = mle_acceleration(t.rows[80].mirrored(), t);
    CHECK_THAT(r.a_hat, WithinAbs(-grid[80], 1e-12));
  }
  SECTION("multinomial noise") {
    // Quarter period of the 20 rad/g fringe.
    const double quarter = 2 * std::numbers::pi / 20.0 / 4.0;
    std::mt19937_64 rng(5);
    const std::size_t i0 = 63;
    int inside = 0;
    for (int t = 0; t < 500; ++t) {
      std::discrete_distribution<int> pick(table.rows[i0].probabilities.begin(), table.rows[i0].probabilities.end());
      MomentumDistribution obs;
      for (int k = 0; k < 20000; ++k) obs.probabilities[pick(rng)] += 1.0 / 20000;
      double s = 0;
      for (double p : obs.probabilities) s += p;
      for (double& p : obs.probabilities) p /= s;
      if (std::abs(mle_acceleration(obs, table).a_hat - grid[i0]) < quarter) ++inside;
    }
    CHECK(inside >= 475);
  }
  SECTION("JSON report") {
    const auto j = nlohmann::json::parse(estimation_to_json(mle_acceleration(table.rows[7], table), "abc"));
    CHECK(j.at("a_hat_g").get<double>() == grid[7]);
    CHECK(j.at("profile").size() == grid.size());
    CHECK(j.at("alarm").is_boolean());
    CHECK(j.at("config_digest") == "abc");
  }
}

TEST_CASE("Fisher information") {
  SECTION("two-outcome fringe gives kappa squared") {
    const double kappa = 3.0;
    auto model = [&](double a) {
      return dist({std::pow(std::cos(kappa * a / 2), 2), std::pow(std::sin(kappa * a / 2), 2), 0, 0, 0, 0, 0});
    };
    for (double a : {0.2, 0.4, 0.9}) CHECK_THAT(fisher_information(model, a, 1e-5), WithinRel(kappa * kappa, 1e-6));
  }
  SECTION("constant table") {
    ScanTable t{linear_grid(0, 1, 5), std::vector<MomentumDistribution>(5, fringe(0.2)), "", ""};
    CHECK(fisher_information(t, 2) == 0.0);
    CHECK(std::isinf(sensitivity_from_fisher(0.0)));
    CHECK_THROWS_AS(fisher_information(t, 0), ConfigError);
  }
  SECTION("bin permutation invariance") {
    auto permuted = [](double a) {
      auto d = fringe(a);
      std::rotate(d.probabilities.begin(), d.probabilities.begin() + 2, d.probabilities.end());
      return d;
    };
    CHECK_THAT(fisher_information(permuted, 0.03, 1e-5), WithinRel(fisher_information(fringe, 0.03, 1e-5), 1e-12));
  }
  SECTION("floor rule") {
    auto kink = [](double a) {
      const double p = std::clamp(0.5 * a, 0.0, 1.0);
      return dist({p, 1.0 - p, 0, 0, 0, 0, 0});
    };
    CHECK_THROWS_AS(fisher_information(kink, 0.0, 1e-4), NumericalError);
    CHECK_NOTHROW(fisher_information(kink, 0.5, 1e-4));
  }
  SECTION("step halving on the shipped sequence") {
    const Waveform w = assemble(load_sequence_plan(std::string(SHAKEN_DATA_DIR) + "/sequence.json", kParams.constants),
                                kParams.constants);
    const ResponseModel model(kParams, w.dt);
    auto m = [&](double a) { return model(w, a); };
    for (double a : {-0.06, 0.01, 0.09}) {
      const double i1 = fisher_information(m, a, 1e-4), i2 = fisher_information(m, a, 5e-5);
      CHECK(std::abs(i1 - i2) / i2 <= 1e-3);
    }
  }
  CHECK(sensitivity_from_fisher(4.0) == 0.5);
}

TEST_CASE("ideal bound") {
  const PhysicalConstants& c = kParams.constants;
  const double T = 500e-6;
  CHECK_THAT(ideal_bound(T, c) / ideal_bound(2 * T, c), WithinRel(4.0, 1e-14));
  CHECK_THAT(ideal_bound(T, c) / ideal_bound(4 * T, c), WithinRel(16.0, 1e-14));
  CHECK_THAT(ideal_bound(T, c) / ideal_bound(1e3 * T, c), WithinRel(1e6, 1e-12));
  CHECK_THROWS_AS(ideal_bound(0.0, c), ConfigError);

  SECTION("agrees with a direct two-path simulation") {
    for (double total_s : {498.2e-6, 250e-6}) {
      const double Td = c.to_dimensionless_time(total_s);
      auto m = [&](double a) { return two_path(a, Td); };
      // Any interior a works for a pure two-outcome fringe; avoid its nodes.
      const double info = fisher_information(m, 0.0123, 1e-6);
      CHECK_THAT(sensitivity_from_fisher(info), WithinRel(ideal_bound(total_s, c), 1e-2));
    }
  }
}

TEST_CASE("autocorrelation") {
  const auto grid = linear_grid(-0.1, 0.1, 21);
  const auto t = table_of(fringe, grid);
  const auto d = autocorrelation(t, 3);
  const auto d1 = autocorrelation(t, 1);
  CHECK(d == d1);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d[i][i] == 0.0);
    for (std::size_t j = 0; j < d.size(); ++j) {
      CHECK(d[i][j] == d[j][i]);
      CHECK(d[i][j] >= 0.0);
      CHECK(d[i][j] <= 1.0);
    }
  }
  ScanTable same{{0.0, 1.0}, {fringe(0.1), fringe(0.1)}, "", ""};
  for (const auto& row : autocorrelation(same))
    for (double v : row) CHECK(v == 0.0);

  const std::string csv = divergence_to_csv(d, grid);
  CHECK(csv.starts_with("a_g,-0.10000000000000001,"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);
}
