#pragma once

#include "wavegame/games.hpp"
#include "wavegame/types.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace wg::harness {

// Sweep of one config variable, optionally crossed with a series variable whose
// values label separate curves in the same table.
struct SweepSpec {
  std::string variable; // "" (no sweep) or "e_t"
  std::vector<double> values;
  std::string series; // "" or "r" or "delta"
  std::vector<double> series_values;
};

struct OutputSpec {
  std::string dir = "out";
  std::vector<std::string> formats = {"csv"}; // subset of {"csv", "svg"}
};

// One experiment, loaded from JSON. Angles enter in degrees and t0/s0 as
// [magnitude, phase_radians] pairs; the polar arrays stay the source of truth
// for serialization so save/parse round-trips are bit exact.
struct ExperimentConfig {
  Scenario scenario; // noise_cov built from rho at parse time
  double rho = 0.8;
  double pfa = 1e-6;
  ConstraintSet constraint = ConstraintEC{1.0};
  games::Algo2Params algo2;
  games::Algo3Params algo3;
  SweepSpec sweep;
  OutputSpec output;
  std::uint64_t seed = 1;

  double theta_deg = 0; // serialization source for scenario.theta_t
  std::vector<std::array<double, 2>> t0_polar;
  std::vector<std::array<double, 2>> s0_polar; // empty for the ec constraint
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical form: sorted keys, every field explicit, shortest round-trip
// number representation. parse_config(save_config(c)) reproduces c.
std::string save_config(const ExperimentConfig& cfg);

// FNV-1a 64 over the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& cfg);

// Rectangular numeric table. Metadata carries provenance (config hash, seed,
// wall time) but never enters the CSV bytes, so artifacts stay reproducible.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::string> metadata;
};

// Dispatches on the constraint kind. The e_t sweep rescales s0 and e_i with
// the energy so the constraint geometry is preserved.
DesignResult run_design(const ExperimentConfig& cfg);

// Detection probability over the e_t grid, one block per series value.
// Columns e_t, series_value, sinr_worst, p_d. Grid points whose design fails
// are dropped and counted in metadata["warnings"].
ResultTable run_detection_sweep(const ExperimentConfig& cfg);

// Per-iteration objective and gap from the design trace; cmsc and scsc only.
// With an e_t sweep the traces stack into blocks behind a leading e_t column.
ResultTable run_convergence(const ExperimentConfig& cfg);

// Transmit PSD on a 1024-point frequency grid: periodogram summed over
// transmitters with a 1/code_len scale, plus dB relative to the peak.
ResultTable run_psd(const ExperimentConfig& cfg);
ResultTable run_psd(const Waveform& w, int n_tx, int code_len);

// Aperiodic per-transmitter autocorrelation in dB relative to lag zero; with
// cross = true also every transmitter pair, normalized by the geometric mean
// of the zero lags. Peak sidelobe levels and the correlation definition land
// in metadata.
ResultTable run_pulse_compression(const ExperimentConfig& cfg, bool cross = false);
ResultTable run_pulse_compression(const Waveform& w, int n_tx, int code_len, bool cross = false);

// SINR of the designed pair against n_samples draws from the uncertainty set,
// with the certified floor and the sample min/mean repeated on every row.
ResultTable run_robustness(const ExperimentConfig& cfg, int n_samples);

// format is "csv" or "svg". CSV: header row, 12 significant digits, LF line
// endings, RFC 4180 quoting; non-finite values are refused. SVG: one
// self-contained line chart, first column on x.
void emit(const ResultTable& table, const std::string& format, const std::string& path);
std::string to_csv(const ResultTable& table);
std::string to_svg(const ResultTable& table);
ResultTable parse_csv(const std::string& text);

} // namespace wg::harness
