// latticectl: batch front end for band-structure reports, waveform design,
// acceleration scans, estimation, autocorrelation and AWG export.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shaken/config.hpp"
#include "shaken/interferometer.hpp"
#include "shaken/metrology.hpp"
#include "shaken/qoc.hpp"
#include "shaken/rl.hpp"

namespace fs = std::filesystem;
using namespace shaken;

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kGate = 4 };

struct Context {
  config::RunConfig cfg;
  fs::path out;
  unsigned threads = 1;
  bool verbose = false;
  std::string command;
  std::vector<std::string> written;

  void write(const std::string& name, const std::string& content) {
    io::write_file((out / name).string(), content);
    written.push_back(name);
  }

  void log(const std::string& msg) const {
    if (verbose) std::cerr << "latticectl: " << msg << "\n";
  }

  void write_manifest() {
    std::string m = "{\n  \"command\": \"" + command + "\",\n  \"config_digest\": \"" + cfg.digest +
                    "\",\n  \"seed\": " + std::to_string(cfg.seed) + ",\n  \"outputs\": [";
    for (std::size_t i = 0; i < written.size(); ++i) m += (i ? ", \"" : "\"") + written[i] + "\"";
    m += "]\n}\n";
    io::write_file((out / "manifest.json").string(), m);
  }
};

std::string distribution_cells(const MomentumDistribution& d) {
  std::string s;
  for (double p : d.probabilities) s += "," + io::format_number(p);
  return s + "," + io::format_number(d.tail);
}

int cmd_bloch(Context& ctx) {
  const auto bands = bloch_eigensystem(ctx.cfg.lattice);
  std::string csv = "band,energy,p_m6,p_m4,p_m2,p_0,p_p2,p_p4,p_p6,tail\n";
  for (int b = 0; b < ctx.cfg.bloch.bands; ++b) {
    csv += std::to_string(b) + "," + io::format_number(bands[b].energy) +
           distribution_cells(momentum_populations(bands[b].vector)) + "\n";
  }
  ctx.write("bloch.csv", csv);
  return kOk;
}

std::string qoc_history(const qoc::Result& r) {
  std::string csv = "iteration,cost,fidelity,grad_norm\n";
  for (std::size_t i = 0; i < r.cost_history.size(); ++i) {
    csv += std::to_string(i) + "," + io::format_number(r.cost_history[i]) + "," +
           io::format_number(r.fidelity_history[i]) + "," + io::format_number(r.gradient_history[i]) + "\n";
  }
  return csv;
}

int cmd_design(Context& ctx) {
  const auto& d = ctx.cfg.design;
  const auto& params = ctx.cfg.lattice;
  const PhysicalConstants& c = params.constants;
  double fidelity = 0.0;
  Waveform w;

  if (d.method == config::DesignMethod::qoc) {
    qoc::Problem prob = d.problem == config::DesignProblem::beamsplitter
                            ? qoc::beamsplitter_problem(params, d.horizon_tau, d.target_band)
                            : qoc::mirror_problem(params, d.horizon_tau);
    prob.r = d.effort_weight;
    prob.phi_max = d.phi_max;
    qoc::Options opts;
    opts.max_iters = d.max_iters;
    opts.seed = ctx.cfg.seed;
    opts.init_amplitude = d.init_amplitude;
    ctx.log("qoc: " + std::to_string(prob.sample_count()) + " samples, " + std::to_string(d.starts) + " start(s)");
    const qoc::Result res = qoc::optimize_multistart(prob, opts, d.starts, ctx.threads);
    w = d.problem == config::DesignProblem::beamsplitter ? relabeled(res.waveform, SegmentKind::beamsplitter)
                                                         : res.waveform;
    fidelity = res.terminal_fidelity;
    ctx.write("waveform.json", io::waveform_to_json(w, c));
    ctx.write("history.csv", qoc_history(res));
    ctx.log("qoc exit: " + std::string(qoc::to_string(res.exit)));
  } else {
    const rl::Problem prob = d.problem == config::DesignProblem::beamsplitter
                                 ? rl::Problem(rl::beamsplitter_problem(params, d.target_band))
                                 : rl::Problem(rl::MirrorHalfProblem{mirror_channel(params)});
    const rl::TrainResult res = rl::train(d.rl, prob, params);
    ctx.write("history.csv", rl::curve_to_csv(res.curve));
    if (!res.best_actions.empty()) {
      w = d.problem == config::DesignProblem::beamsplitter
              ? relabeled(res.best_waveform, SegmentKind::beamsplitter)
              : rl::assemble_mirror_from_half(res.best_waveform);
      fidelity = res.resimulated_fidelity;
      ctx.write("waveform.json", io::waveform_to_json(w, c));
    }
    ctx.write("checkpoint.json", rl::checkpoint_to_json(res.online).dump(1) + "\n");
    if (res.diverged) {
      std::cerr << "latticectl: training diverged (non-finite loss); partial results written\n";
      return kNumerical;
    }
  }

  std::printf("fidelity %s\n", io::format_number(fidelity).c_str());
  if (fidelity < d.fidelity_gate) {
    std::cerr << "latticectl: fidelity " << fidelity << " below gate " << d.fidelity_gate << "\n";
    return kGate;
  }
  return kOk;
}

Waveform load_sequence(const Context& ctx) {
  if (!ctx.cfg.sequence) throw ConfigError("this command needs a 'sequence' block");
  const auto& s = *ctx.cfg.sequence;
  const PhysicalConstants& c = ctx.cfg.lattice.constants;
  if (!s.waveform.empty()) return io::load_waveform(ctx.cfg.resolve(s.waveform), c);
  if (!s.plan.empty()) return assemble(load_sequence_plan(ctx.cfg.resolve(s.plan), c), c);
  SequencePlan plan{io::load_waveform(ctx.cfg.resolve(s.beamsplitter), c),
                    io::load_waveform(ctx.cfg.resolve(s.mirror), c), s.hold_us * 1e-6};
  return assemble(plan, c);
}

int cmd_scan(Context& ctx) {
  const Waveform w = load_sequence(ctx);
  const auto& so = ctx.cfg.scan;
  ResponseOptions ro;
  ro.ramp.time_origin = ctx.cfg.lattice.constants.to_dimensionless_time(so.time_origin_us * 1e-6);
  ro.ramp.sign = so.ramp_sign;
  const auto grid = linear_grid(so.a_min, so.a_max, so.points);
  ctx.log("scan: " + std::to_string(grid.size()) + " points, " + std::to_string(w.size()) + " samples");
  try {
    const ScanTable table = scan(w, grid, ctx.cfg.lattice, ctx.threads, ro);
    ctx.write("scan.csv", scan_to_csv(table));
  } catch (const ScanError& e) {
    std::cerr << "latticectl: " << e.what() << "\n";
    for (std::size_t i : e.indices()) std::cerr << "latticectl: failed grid index " << i << " (a = " << grid[i] << " g)\n";
    return kNumerical;
  }
  return kOk;
}

ScanTable load_table(const Context& ctx, const std::string& path) {
  return scan_from_csv(io::read_file(ctx.cfg.resolve(path)));
}

int cmd_estimate(Context& ctx) {
  if (!ctx.cfg.estimate) throw ConfigError("estimate needs an 'estimate' block");
  const auto& e = *ctx.cfg.estimate;
  const ScanTable table = load_table(ctx, e.table);
  MomentumDistribution obs;
  if (e.observed_row) {
    if (*e.observed_row >= table.size()) throw ConfigError("estimate.observed_row out of range");
    obs = table.rows[*e.observed_row];
  } else {
    obs.probabilities = *e.observed;
  }
  const auto r = metrology::mle_acceleration(obs, table, e.offset_g);
  ctx.write("estimate.json", metrology::estimation_to_json(r, ctx.cfg.digest));
  std::printf("a_hat %s\n", io::format_number(r.a_hat).c_str());
  if (r.alarm) std::cerr << "latticectl: warning: near-degenerate secondary minimum (aliasing)\n";
  return kOk;
}

int cmd_autocorr(Context& ctx) {
  if (!ctx.cfg.autocorr) throw ConfigError("autocorr needs an 'autocorr' block");
  const ScanTable table = load_table(ctx, ctx.cfg.autocorr->table);
  ctx.write("autocorr.csv", metrology::divergence_to_csv(metrology::autocorrelation(table, ctx.threads), table.grid));
  return kOk;
}

int cmd_export(Context& ctx) {
  const Waveform w = load_sequence(ctx);
  ctx.write("awg.csv", io::export_awg(w, ctx.cfg.export_opts.resolution_ns * 1e-9, ctx.cfg.lattice.constants));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shaken optical lattice design and simulation"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_option("--seed", seed, "random seed (overrides seed)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--verbose", verbose, "progress on stderr");
  app.fallthrough();

  const std::vector<std::pair<std::string, int (*)(Context&)>> commands{
      {"bloch", cmd_bloch}, {"design", cmd_design}, {"scan", cmd_scan},
      {"estimate", cmd_estimate}, {"autocorr", cmd_autocorr}, {"export", cmd_export}};
  const std::vector<std::string> help{"band energies and momentum populations", "design a waveform (qoc or rl)",
                                      "momentum fringes over an acceleration grid",
                                      "acceleration estimate from an observed distribution",
                                      "JS divergence matrix of a scan table", "AWG text export at fixed resolution"};
  for (std::size_t i = 0; i < commands.size(); ++i) app.add_subcommand(commands[i].first, help[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  Context ctx;
  ctx.verbose = verbose;
  for (const auto& [name, fn] : commands) {
    if (!app.got_subcommand(name)) continue;
    ctx.command = name;
    try {
      ctx.cfg = config::load_run_config(config_path);
      if (seed) {
        ctx.cfg.seed = *seed;
        ctx.cfg.design.rl.seed = *seed;
      }
      ctx.threads = threads ? *threads
                    : std::getenv("LATTICECTL_THREADS") ? default_thread_count()
                    : ctx.cfg.threads ? *ctx.cfg.threads
                                      : default_thread_count();
      ctx.out = out_dir.empty() ? fs::path(ctx.cfg.resolve(ctx.cfg.output_dir)) : fs::path(out_dir);
      std::error_code ec;
      fs::create_directories(ctx.out, ec);
      if (ec) throw ConfigError("cannot create output directory '" + ctx.out.string() + "': " + ec.message());
      const int code = fn(ctx);
      ctx.write_manifest();
      return code;
    } catch (const ConfigError& e) {
      std::cerr << "latticectl: config error: " << e.what() << "\n";
      return kConfig;
    } catch (const NumericalError& e) {
      std::cerr << "latticectl: numerical error: " << e.what() << "\n";
      return kNumerical;
    } catch (const std::exception& e) {
      std::cerr << "latticectl: error: " << e.what() << "\n";
      return kNumerical;
    }
  }
  return kConfig;
}
