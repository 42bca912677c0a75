#include "CLI11.hpp"

#include "wavegame/harness.hpp"
#include "wavegame/model.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace wg;

std::string kind_of(const ConstraintSet& c) {
  if (std::holds_alternative<ConstraintEC>(c)) return "ec";
  if (std::holds_alternative<ConstraintCMSC>(c)) return "cmsc";
  return "scsc";
}

void write_table(const harness::ResultTable& t, const harness::ExperimentConfig& cfg,
                 const std::string& base) {
  std::filesystem::create_directories(cfg.output.dir);
  for (const auto& f : cfg.output.formats) {
    const std::string path = cfg.output.dir + "/" + base + "." + f;
    harness::emit(t, f, path);
    std::cout << "wrote " << path << "\n";
  }
}

harness::ResultTable code_table(const Waveform& w) {
  harness::ResultTable t;
  t.columns = {"index", "re", "im", "magnitude", "phase_rad"};
  for (int i = 0; i < w.s.size(); ++i)
    t.rows.push_back({double(i), w.s(i).real(), w.s(i).imag(), std::abs(w.s(i)),
                      std::arg(w.s(i))});
  return t;
}

harness::ResultTable trace_table(const DesignResult& res) {
  harness::ResultTable t;
  t.columns = {"iter", "objective", "gap"};
  for (const auto& rec : res.trace)
    t.rows.push_back({double(rec.iter), rec.objective, rec.has_gap ? rec.gap : 0.0});
  return t;
}

void print_summary(const DesignResult& res, double pfa) {
  const double db = 10.0 * std::log10(std::max(res.sinr_worst, 1e-300));
  std::cout << "sinr_worst: " << res.sinr_worst << " (" << db << " dB)\n";
  std::cout << "p_d at pfa " << pfa << ": "
            << model::detection_probability(std::max(0.0, res.sinr_worst), pfa) << "\n";
  std::cout << "iterations: " << res.trace.size() << ", converged: "
            << (res.converged ? "yes" : "no") << "\n";
  if (res.relaxed_value > 0) std::cout << "relaxed_value: " << res.relaxed_value << "\n";
  if (!res.note.empty()) std::cout << "note: " << res.note << "\n";
}

// The built-in battery runs every pipeline on a small scenario and writes
// seed-deterministic CSV artifacts, so two runs with the same seed must
// produce byte-identical files.
harness::ExperimentConfig selftest_config(std::uint64_t seed) {
  harness::ExperimentConfig cfg;
  Scenario& scn = cfg.scenario;
  scn.n_tx = 2;
  scn.n_rx = 2;
  scn.code_len = 4;
  scn.tir_len = 3;
  cfg.theta_deg = 20.0;
  scn.theta_t = cfg.theta_deg * M_PI / 180.0;
  scn.tx_spacing = 1.0;
  scn.rx_spacing = 0.5;
  cfg.rho = 0.5;
  scn.noise_cov = model::noise_covariance(cfg.rho, scn.rx_dim());
  scn.t0.resize(3);
  scn.t0 << cplx(0.4, 0.1), cplx(0.7, -0.2), cplx(0.1, 0.3);
  scn.radius = 0.25;
  for (int i = 0; i < scn.t0.size(); ++i)
    cfg.t0_polar.push_back({std::abs(scn.t0(i)), std::arg(scn.t0(i))});
  cfg.pfa = 1e-4;
  cfg.seed = seed;
  cfg.algo2.seed = seed;
  cfg.output.formats = {"csv"};
  return cfg;
}

void fill_s0_polar(harness::ExperimentConfig& cfg, const Waveform& s0) {
  cfg.s0_polar.clear();
  for (int i = 0; i < s0.s.size(); ++i)
    cfg.s0_polar.push_back({std::abs(s0.s(i)), std::arg(s0.s(i))});
}

int run_selftest(const std::string& out_dir, std::uint64_t seed) {
  harness::ExperimentConfig ec = selftest_config(seed);
  ec.constraint = ConstraintEC{1.0};
  ec.output.dir = out_dir;

  {
    auto sweep_cfg = ec;
    sweep_cfg.sweep = {"e_t", {0.5, 1.0, 2.0}, "r", {0.0, 0.25}};
    write_table(harness::run_detection_sweep(sweep_cfg), sweep_cfg, "selftest_sweep");
  }

  harness::ExperimentConfig cm = selftest_config(seed);
  cm.output.dir = out_dir;
  {
    ConstraintCMSC c;
    c.e_t = 1.0;
    c.delta = 1.0;
    c.s0 = model::lfm_reference(2, 4, c.e_t);
    fill_s0_polar(cm, c.s0);
    cm.constraint = c;
    cm.algo2.max_iter = 6;
    cm.algo2.m_trials = 8;
    write_table(harness::run_convergence(cm), cm, "selftest_convergence");
    write_table(harness::run_pulse_compression(cm, true), cm, "selftest_pulse");
  }

  harness::ExperimentConfig sc = selftest_config(seed);
  sc.output.dir = out_dir;
  {
    ConstraintSCSC c;
    c.e_t = 1.0;
    c.delta = 1.2;
    c.s0 = model::lfm_reference(2, 4, c.e_t);
    c.bands = {{0.3, 0.45, 1.0}};
    c.e_i = 4.0 * games::feasible_init(sc.scenario, c).stopband_energy;
    fill_s0_polar(sc, c.s0);
    sc.constraint = c;
    sc.algo3.max_iter = 10;
    write_table(harness::run_psd(sc), sc, "selftest_psd");
  }

  write_table(harness::run_robustness(ec, 25), ec, "selftest_robust");
  std::cout << "selftest ok\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint transmit code and receive filter design against worst-case "
               "target impulse responses"};
  app.require_subcommand(1);
  app.fallthrough(); // global flags may follow the subcommand name

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> formats;
  std::uint64_t seed = 1;
  app.add_option("--config", config_path, "Experiment configuration (JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "Override the configured seed");
  app.add_option("--out", out_dir, "Override the configured output directory");
  app.add_option("--format", formats,
                 "Override the configured artifact formats (csv, svg)");

  auto* cmd_ec = app.add_subcommand("design-ec", "Energy-constrained design");
  auto* cmd_cm = app.add_subcommand("design-cmsc",
                                    "Constant-modulus similarity-constrained design");
  auto* cmd_sc = app.add_subcommand("design-scsc",
                                    "Spectral-compatibility similarity-constrained design");
  auto* cmd_sweep = app.add_subcommand("sweep", "Detection probability over an energy grid");
  auto* cmd_conv = app.add_subcommand("convergence", "Per-iteration design trace");
  auto* cmd_psd = app.add_subcommand("psd", "Transmit PSD of the designed code");
  auto* cmd_pulse = app.add_subcommand("pulse", "Pulse-compression profile of the design");
  bool cross = false;
  cmd_pulse->add_flag("--cross", cross, "Also emit transmitter-pair cross-correlations");
  auto* cmd_robust = app.add_subcommand("robust", "Sampled SINR over the uncertainty set");
  int samples = 100;
  cmd_robust->add_option("--samples", samples, "Number of draws from the uncertainty set");
  auto* cmd_self = app.add_subcommand(
      "selftest", "Deterministic built-in battery; writes CSV artifacts only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e); // prints help or the parse error
    return code == 0 ? 0 : 1;    // command line problems are validation failures
  }

  try {
    if (app.got_subcommand(cmd_self))
      return run_selftest(out_dir.empty() ? "out" : out_dir,
                          seed_opt->count() ? seed : 1);

    if (config_path.empty())
      throw ValidationError("--config is required for this command");
    harness::ExperimentConfig cfg = harness::load_config(config_path);
    if (seed_opt->count()) {
      cfg.seed = seed;
      cfg.algo2.seed = seed;
    }
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    if (!formats.empty()) {
      for (const auto& f : formats)
        if (f != "csv" && f != "svg")
          throw ValidationError("--format: unknown format \"" + f + "\"");
      cfg.output.formats = formats;
    }

    for (auto [cmd, kind] : {std::pair{cmd_ec, "ec"}, {cmd_cm, "cmsc"}, {cmd_sc, "scsc"}})
      if (app.got_subcommand(cmd)) {
        if (kind_of(cfg.constraint) != kind)
          throw ValidationError("constraint.kind: config declares \"" +
                                kind_of(cfg.constraint) + "\" but the command is design-" +
                                kind);
        DesignResult res = harness::run_design(cfg);
        print_summary(res, cfg.pfa);
        const std::string base = std::string("design_") + kind;
        harness::ResultTable code = code_table(res.s_opt);
        std::filesystem::create_directories(cfg.output.dir);
        harness::emit(code, "csv", cfg.output.dir + "/" + base + "_code.csv");
        std::cout << "wrote " << cfg.output.dir + "/" + base + "_code.csv" << "\n";
        write_table(trace_table(res), cfg, base + "_trace");
        return 0;
      }

    if (app.got_subcommand(cmd_sweep)) {
      auto t = harness::run_detection_sweep(cfg);
      write_table(t, cfg, "detection_sweep");
      if (t.metadata.at("warnings") != "0")
        std::cerr << "warning: " << t.metadata.at("warnings")
                  << " grid points failed and were dropped\n";
      return 0;
    }
    if (app.got_subcommand(cmd_conv)) {
      write_table(harness::run_convergence(cfg), cfg, "convergence");
      return 0;
    }
    if (app.got_subcommand(cmd_psd)) {
      write_table(harness::run_psd(cfg), cfg, "psd");
      return 0;
    }
    if (app.got_subcommand(cmd_pulse)) {
      auto t = harness::run_pulse_compression(cfg, cross);
      write_table(t, cfg, "pulse");
      return 0;
    }
    if (app.got_subcommand(cmd_robust)) {
      write_table(harness::run_robustness(cfg, samples), cfg, "robustness");
      return 0;
    }
    throw ValidationError("unknown command");
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
