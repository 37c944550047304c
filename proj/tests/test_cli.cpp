#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "shaken/io.hpp"

namespace fs = std::filesystem;
using shaken::io::read_file;
using shaken::io::write_file;

namespace {

const std::string kData = SHAKEN_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

class Sandbox {
 public:
  explicit Sandbox(const std::string& name) : dir_(fs::temp_directory_path() / ("latticectl-test-" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Sandbox() { fs::remove_all(dir_); }

  fs::path path(const std::string& rel) const { return dir_ / rel; }

  std::string config(const std::string& name, const std::string& body) const {
    write_file(path(name).string(), body);
    return path(name).string();
  }

  Run run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt";
    const std::string cmd = std::string(LATTICECTL_PATH) + " " + args + " > " + out.string() + " 2> " +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(out.string()), read_file((dir_ / "stderr.txt").string())};
  }

 private:
  fs::path dir_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream s(line);
  for (std::string c; std::getline(s, c, ',');) out.push_back(c);
  return out;
}

double printed(const std::string& out, const std::string& key) {
  const auto pos = out.find(key + " ");
  REQUIRE(pos != std::string::npos);
  return std::stod(out.substr(pos + key.size() + 1));
}

}  // namespace

TEST_CASE("bloch report") {
  Sandbox sb("bloch");
  SECTION("depth 10") {
    const auto cfg = sb.config("c.json", R"({"output_dir": "out"})");
    REQUIRE(sb.run("--config " + cfg + " bloch").code == 0);
    const auto rows = lines(read_file(sb.path("out/bloch.csv").string()));
    REQUIRE(rows.size() == 8);
    CHECK(rows[0] == "band,energy,p_m6,p_m4,p_m2,p_0,p_p2,p_p4,p_p6,tail");
    const auto band3 = cells(rows[4]);
    CHECK(band3[0] == "3");
    for (int col : {3, 7}) {
      const double w = std::stod(band3[col]);
      CHECK(w >= 0.45);
      CHECK(w <= 0.49);
    }
    const auto manifest = nlohmann::json::parse(read_file(sb.path("out/manifest.json").string()));
    CHECK(manifest.at("command") == "bloch");
    CHECK(manifest.at("config_digest").get<std::string>().size() == 16);
    CHECK(manifest.at("outputs") == nlohmann::json::array({"bloch.csv"}));
  }
  SECTION("depth 0 gives the free ladder") {
    const auto cfg = sb.config("c.json", R"({"output_dir": "out", "lattice": {"depth": 0}})");
    REQUIRE(sb.run("--config " + cfg + " bloch").code == 0);
    const auto rows = lines(read_file(sb.path("out/bloch.csv").string()));
    const std::vector<double> ladder{0, 4, 4, 16, 16, 36, 36};
    for (std::size_t b = 0; b < ladder.size(); ++b)
      CHECK_THAT(std::stod(cells(rows[b + 1])[1]), Catch::Matchers::WithinAbs(ladder[b], 1e-9));
  }
}

TEST_CASE("config errors exit 2 without writing") {
  Sandbox sb("config");
  const auto bad = sb.config("bad.json", R"({"output_dir": "out", )");
  CHECK(sb.run("--config " + bad + " bloch").code == 2);
  CHECK_FALSE(fs::exists(sb.path("out")));
  const auto unknown = sb.config("unknown.json", R"({"output_dir": "out", "lattice": {"depht": 10}})");
  CHECK(sb.run("--config " + unknown + " bloch").code == 2);
  CHECK_FALSE(fs::exists(sb.path("out")));
  CHECK(sb.run("bloch").code == 2);
  CHECK(sb.run("--config " + unknown).code == 2);
  CHECK(sb.run("--config " + sb.path("missing.json").string() + " bloch").code == 2);
  CHECK(sb.run("--config " + bad + " --threads 0 bloch").code == 2);
}

TEST_CASE("design") {
  Sandbox sb("design");
  SECTION("qoc beamsplitter default, deterministic") {
    const auto cfg = sb.config("c.json", R"({"seed": 3, "design": {"method": "qoc", "problem": "beamsplitter"}})");
    const Run a = sb.run("--config " + cfg + " --out " + sb.path("a").string() + " design");
    REQUIRE(a.code == 0);
    CHECK(printed(a.out, "fidelity") >= 0.97);
    const Run b = sb.run("--config " + cfg + " --out " + sb.path("b").string() + " --threads 1 design");
    REQUIRE(b.code == 0);
    CHECK(read_file(sb.path("a/waveform.json").string()) == read_file(sb.path("b/waveform.json").string()));
    CHECK(read_file(sb.path("a/history.csv").string()) == read_file(sb.path("b/history.csv").string()));
    CHECK(lines(read_file(sb.path("a/history.csv").string()))[0] == "iteration,cost,fidelity,grad_norm");
  }
  SECTION("quality gate") {
    const auto cfg = sb.config(
        "c.json", R"({"output_dir": "out", "design": {"method": "qoc", "problem": "beamsplitter", "max_iters": 1, "starts": 1}})");
    CHECK(sb.run("--config " + cfg + " design").code == 4);
    CHECK(fs::exists(sb.path("out/waveform.json")));
    CHECK(fs::exists(sb.path("out/history.csv")));
  }
  SECTION("rl with no episodes") {
    const auto cfg = sb.config(
        "c.json", R"({"output_dir": "out", "design": {"method": "rl", "problem": "beamsplitter", "rl": {"episodes": 0}}})");
    CHECK(sb.run("--config " + cfg + " design").code == 4);
    CHECK(read_file(sb.path("out/history.csv").string()) == "episode,epsilon,best_fidelity,loss\n");
  }
  SECTION("rl short run is seeded") {
    const auto cfg = sb.config(
        "c.json", R"({"design": {"method": "rl", "problem": "beamsplitter", "rl": {"episodes": 20, "warmup": 64}}})");
    const Run a = sb.run("--config " + cfg + " --out " + sb.path("a").string() + " --seed 5 design");
    const Run b = sb.run("--config " + cfg + " --out " + sb.path("b").string() + " --seed 5 design");
    CHECK(a.code == 4);
    CHECK(a.out == b.out);
    for (const char* f : {"waveform.json", "history.csv", "checkpoint.json"})
      CHECK(read_file(sb.path(std::string("a/") + f).string()) == read_file(sb.path(std::string("b/") + f).string()));
  }
}

TEST_CASE("scan, estimate, autocorr, export") {
  Sandbox sb("pipeline");
  const std::string plan = kData + "/sequence.json";
  const auto scan_cfg = sb.config("scan.json", R"({"output_dir": "scan", "sequence": {"plan": ")" + plan + R"("}})");
  REQUIRE(sb.run("--config " + scan_cfg + " scan").code == 0);
  const auto rows = lines(read_file(sb.path("scan/scan.csv").string()));
  REQUIRE(rows.size() == 102);
  CHECK(rows[0] == "a_g,p_m6,p_m4,p_m2,p_0,p_p2,p_p4,p_p6,tail");
  CHECK(cells(rows[1])[0] == "-0.125");
  CHECK(cells(rows[101])[0] == "0.125");

  const auto est_cfg =
      sb.config("est.json", R"({"output_dir": "est", "estimate": {"table": "scan/scan.csv", "observed_row": 70}})");
  const Run est = sb.run("--config " + est_cfg + " estimate");
  REQUIRE(est.code == 0);
  const double row70 = std::stod(cells(rows[71])[0]);
  CHECK(printed(est.out, "a_hat") == row70);
  const auto report = nlohmann::json::parse(read_file(sb.path("est/estimate.json").string()));
  CHECK(report.at("a_hat_g").get<double>() == row70);
  CHECK(report.at("d_js_min").get<double>() == 0.0);
  CHECK(report.at("profile").size() == 101);

  std::string observed = "[";
  const auto r = cells(rows[12]);
  for (int j = 1; j <= 7; ++j) observed += (j > 1 ? "," : "") + r[j];
  observed += "]";
  const auto obs_cfg =
      sb.config("obs.json", R"({"output_dir": "obs", "estimate": {"table": "scan/scan.csv", "observed": )" + observed +
                                R"(, "offset_g": 0.5}})");
  const Run obs = sb.run("--config " + obs_cfg + " estimate");
  INFO(obs.err);
  REQUIRE(obs.code == 0);
  CHECK_THAT(printed(obs.out, "a_hat"), Catch::Matchers::WithinAbs(std::stod(r[0]) + 0.5, 1e-15));

  const auto ac_cfg = sb.config("ac.json", R"({"output_dir": "ac", "autocorr": {"table": "scan/scan.csv"}})");
  REQUIRE(sb.run("--config " + ac_cfg + " autocorr").code == 0);
  const auto ac = lines(read_file(sb.path("ac/autocorr.csv").string()));
  REQUIRE(ac.size() == 102);
  CHECK(cells(ac[0]).size() == 102);
  CHECK(cells(ac[5])[5] == "0");

  const auto ex_cfg = sb.config("ex.json", R"({"output_dir": "ex", "sequence": {"plan": ")" + plan + R"("}})");
  REQUIRE(sb.run("--config " + ex_cfg + " export").code == 0);
  const auto awg = lines(read_file(sb.path("ex/awg.csv").string()));
  CHECK(awg[0] == "time_s,phase_rad");
  CHECK(cells(awg[1]).size() == 2);
  CHECK(awg.size() > 9000);  // ~498 us at 50 ns

  SECTION("rerun is byte-identical") {
    const std::string first = read_file(sb.path("scan/scan.csv").string());
    REQUIRE(sb.run("--config " + scan_cfg + " --threads 3 scan").code == 0);
    CHECK(read_file(sb.path("scan/scan.csv").string()) == first);
  }
}

TEST_CASE("numerical failures exit 3") {
  Sandbox sb("numerical");
  const auto cfg = sb.config("c.json", R"({"output_dir": "out", "lattice": {"trunc": 6},
    "sequence": {"plan": ")" + kData + R"(/sequence.json"},
    "scan": {"a_min_g": 0, "a_max_g": 2000, "points": 2}})");
  CHECK(sb.run("--config " + cfg + " scan").code == 3);
  CHECK_FALSE(fs::exists(sb.path("out/scan.csv")));
}
