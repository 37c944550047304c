#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>

#include "shaken/interferometer.hpp"

using namespace shaken;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const LatticeParams kParams{};
const std::string kData = SHAKEN_DATA_DIR;

Waveform random_waveform(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Waveform w{kParams.dt, std::vector<double>(n), {}};
  for (double& s : w.samples) s = u(rng);
  return w;
}

SequencePlan shipped_plan() { return load_sequence_plan(kData + "/sequence.json", kParams.constants); }

double max_diff(const MomentumDistribution& a, const MomentumDistribution& b) {
  double m = 0.0;
  for (int j = 0; j < MomentumDistribution::kBins; ++j) m = std::max(m, std::abs(a.probabilities[j] - b.probabilities[j]));
  return m;
}

// Largest spectral peak over all bins, in cycles per g.
double dominant_frequency(const ScanTable& t) {
  const std::size_t n = t.size();
  const double step = t.grid[1] - t.grid[0];
  double best = -1.0, freq = 0.0;
  for (int j = 0; j < MomentumDistribution::kBins; ++j) {
    double mean = 0.0;
    for (const auto& r : t.rows) mean += r.probabilities[j] / static_cast<double>(n);
    for (std::size_t f = 1; f < n / 2; ++f) {
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        acc += (t.rows[i].probabilities[j] - mean) *
               std::polar(1.0, -2 * std::numbers::pi * static_cast<double>(f * i) / static_cast<double>(n));
      if (std::norm(acc) > best) {
        best = std::norm(acc);
        freq = static_cast<double>(f) / (static_cast<double>(n) * step);
      }
    }
  }
  return freq;
}

}  // namespace

TEST_CASE("assembly") {
  const PhysicalConstants& c = kParams.constants;
  SECTION("zero components") {
    const SequencePlan plan{constant_waveform(kParams.dt, 30, 0.0), constant_waveform(kParams.dt, 50, 0.0)};
    const Waveform w = assemble(plan, c);
    const std::size_t hold = hold_sample_count(c.to_dimensionless_time(100e-6), kParams.dt);
    CHECK(hold == 199);
    REQUIRE(w.size() == 2 * 30 + 2 * hold + 50);
    for (double x : w.samples) CHECK(x == 0.0);
    REQUIRE(w.markers.size() == 5);
    const std::vector<SegmentKind> kinds{SegmentKind::beamsplitter, SegmentKind::hold, SegmentKind::custom,
                                         SegmentKind::hold, SegmentKind::recombiner};
    for (std::size_t i = 0; i < 5; ++i) CHECK(w.markers[i].label == kinds[i]);
    CHECK(w.markers.back().end == w.size());
  }
  SECTION("dt mismatch") {
    const SequencePlan plan{constant_waveform(0.01, 3, 0.0), constant_waveform(0.02, 3, 0.0)};
    CHECK_THROWS_AS(assemble(plan, c), ConfigError);
  }
  SECTION("shipped plan") {
    const Waveform w = assemble(shipped_plan(), c);
    CHECK(c.to_seconds(w.duration()) <= 500e-6);
    for (std::size_t k = 0; k < w.size(); ++k) CHECK(w.samples[k] == w.samples[w.size() - 1 - k]);
    CHECK(w.markers.size() == 6);  // the mirror carries its two half markers
  }
  SECTION("plan file errors") {
    const auto dir = std::filesystem::temp_directory_path() / "shaken-plan-test";
    std::filesystem::create_directories(dir);
    io::write_file((dir / "bad.json").string(), R"({"beamsplitter": "x.json", "mirror": "y.json", "hold": 3})");
    CHECK_THROWS_AS(load_sequence_plan((dir / "bad.json").string(), c), ConfigError);
    io::write_file((dir / "missing.json").string(), R"({"beamsplitter": "x.json", "mirror": "y.json"})");
    CHECK_THROWS_AS(load_sequence_plan((dir / "missing.json").string(), c), ConfigError);
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("response") {
  SECTION("parity pair") {
    const Waveform w = random_waveform(150, 1);
    Waveform neg = w;
    for (double& x : neg.samples) x = -x;
    for (double a : {0.0, 0.03, -0.1}) {
      CHECK(max_diff(response(neg, AccelerationSignal{a}, kParams).mirrored(),
                     response(w, AccelerationSignal{-a}, kParams)) < 1e-12);
    }
  }
  SECTION("shipped sequence") {
    const Waveform w = assemble(shipped_plan(), kParams.constants);
    const ResponseModel model(kParams, w.dt);
    CHECK(state_fidelity(model.final_state(w, 0.0), model.ground()) >= 0.99);
    const auto loaded = momentum_populations(model.ground());
    const auto back = model(w, 0.0);
    double overlap = 0.0;
    for (int j = 0; j < MomentumDistribution::kBins; ++j)
      overlap += std::sqrt(loaded.probabilities[j] * back.probabilities[j]);
    CHECK(overlap >= 0.9);
    CHECK(max_diff(model(w, 0.05), model(w, -0.05)) > 0.01);
  }
}

TEST_CASE("scan") {
  const Waveform w = random_waveform(200, 2);
  SECTION("single point") {
    const auto t = scan(w, {0.0}, kParams);
    REQUIRE(t.size() == 1);
    CHECK(max_diff(t.rows[0], response(w, AccelerationSignal{0.0}, kParams)) == 0.0);
  }
  SECTION("default grid") {
    const auto g = default_scan_grid();
    REQUIRE(g.size() == 101);
    CHECK(g.front() == -0.125);
    CHECK(g.back() == 0.125);
    CHECK_THAT(g[1] - g[0], WithinRel(0.0025, 1e-12));
  }
  SECTION("rows are pure functions of the grid point") {
    const auto grid = linear_grid(-0.1, 0.1, 21);
    const auto serial = scan(w, grid, kParams, 1);
    const auto threaded = scan(w, grid, kParams, 4);
    const auto sub = scan(w, {grid[3], grid[17]}, kParams);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(max_diff(serial.rows[i], threaded.rows[i]) == 0.0);
    CHECK(max_diff(sub.rows[0], serial.rows[3]) == 0.0);
    CHECK(max_diff(sub.rows[1], serial.rows[17]) == 0.0);
    for (const auto& r : serial.rows) {
      double s = 0.0;
      for (double p : r.probabilities) s += p;
      CHECK_THAT(s, WithinAbs(1.0, 1e-12));
    }
  }
  SECTION("grid validation") {
    CHECK_THROWS_AS(scan(w, {}, kParams), ConfigError);
    CHECK_THROWS_AS(scan(w, {0.1, 0.0}, kParams), ConfigError);
    CHECK_THROWS_AS(scan(w, {0.0, 0.0}, kParams), ConfigError);
  }
  SECTION("per-point failures carry grid indices") {
    LatticeParams small = kParams;
    small.trunc = 6;
    try {
      scan(constant_waveform(kParams.dt, 2000, 0.0), {0.0, 2000.0}, small);
      FAIL("expected ScanError");
    } catch (const ScanError& e) {
      CHECK(e.indices() == std::vector<std::size_t>{1});
    }
  }
  SECTION("CSV round trip") {
    const auto t = scan(w, linear_grid(-0.05, 0.05, 5), kParams);
    const std::string csv = scan_to_csv(t);
    CHECK(csv.starts_with("a_g,p_m6,p_m4,p_m2,p_0,p_p2,p_p4,p_p6,tail\n"));
    const auto back = scan_from_csv(csv);
    CHECK(back.grid == t.grid);
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(back.rows[i].probabilities == t.rows[i].probabilities);
      CHECK(back.rows[i].tail == t.rows[i].tail);
    }
    CHECK_THROWS_AS(scan_from_csv("a,b\n1,2\n"), ConfigError);
  }
}

TEST_CASE("fringes tighten with longer transport") {
  const PhysicalConstants& c = kParams.constants;
  SequencePlan plan = shipped_plan();
  const auto grid = default_scan_grid();
  const auto base = scan(assemble(plan, c), grid, kParams, default_thread_count());
  plan.transport_hold = 200e-6;
  const auto longer = scan(assemble(plan, c), grid, kParams, default_thread_count());
  CHECK(dominant_frequency(longer) > dominant_frequency(base));

  // Neighbouring rows on the 101-point grid stay close.
  for (std::size_t i = 1; i < base.size(); ++i) {
    double tv = 0.0;
    for (int j = 0; j < MomentumDistribution::kBins; ++j)
      tv += 0.5 * std::abs(base.rows[i].probabilities[j] - base.rows[i - 1].probabilities[j]);
    CHECK(tv < 0.2);
  }
}

TEST_CASE("fidelities") {
  const auto pair = counterpropagating_pair(kParams);
  const auto b3 = bloch_state(kParams, 3).vector;
  CHECK_THAT(state_fidelity(pair[0], b3), WithinAbs(0.5, 1e-12));
  CHECK_THAT(state_fidelity(b3, b3), WithinAbs(1.0, 1e-12));
  CHECK_THAT(state_fidelity(bloch_state(kParams, 0).vector, bloch_state(kParams, 1).vector), WithinAbs(0.0, 1e-12));

  const auto swap = mirror_channel(kParams);
  const Waveform empty{kParams.dt, {}, {}};
  CHECK_THAT(channel_fidelity(empty, swap, kParams), WithinAbs(1.0 / 3.0, 1e-12));

  SubspaceChannel identity = swap;
  identity.target = Matrix2c::Identity();
  CHECK_THAT(channel_fidelity(empty, identity, kParams), WithinAbs(1.0, 1e-12));
  identity.target *= std::polar(1.0, 0.7);
  CHECK_THAT(channel_fidelity(empty, identity, kParams), WithinAbs(1.0, 1e-12));

  // The exact realization is never beaten.
  const Waveform w = random_waveform(120, 3);
  CHECK(channel_fidelity(w, identity, kParams) <= 1.0 + 1e-12);
  const Matrix2c m = channel_matrix(w, swap, Propagator(kParams, kParams.dt));
  CHECK(m.operatorNorm() <= 1.0 + 1e-12);
}
