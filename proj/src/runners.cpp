#include "wavegame/harness.hpp"

#include "wavegame/model.hpp"
#include "wavegame/trs.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

namespace wg::harness {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string hash_hex(const ExperimentConfig& cfg) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  return buf;
}

void stamp(ResultTable& t, const ExperimentConfig& cfg, Clock::time_point t0) {
  t.metadata["config_hash"] = hash_hex(cfg);
  t.metadata["seed"] = std::to_string(cfg.seed);
  t.metadata["wall_ms"] = fmt(ms_since(t0));
}

// Moving along the energy grid rescales s0 (and the interference budget) so
// the similarity and stopband geometry stay the same shape at every point.
ExperimentConfig with_e_t(ExperimentConfig cfg, double v) {
  if (auto* p = std::get_if<ConstraintEC>(&cfg.constraint)) {
    p->e_t = v;
  } else if (auto* p = std::get_if<ConstraintCMSC>(&cfg.constraint)) {
    const double a = std::sqrt(v / p->e_t);
    p->s0 = make_waveform(Vec(p->s0.s * a));
    p->e_t = v;
  } else {
    auto& sc = std::get<ConstraintSCSC>(cfg.constraint);
    const double ratio = v / sc.e_t;
    sc.s0 = make_waveform(Vec(sc.s0.s * std::sqrt(ratio)));
    sc.e_i *= ratio;
    sc.e_t = v;
  }
  return cfg;
}

ExperimentConfig with_series(ExperimentConfig cfg, const std::string& name, double v) {
  if (name == "r") {
    cfg.scenario.radius = v;
    return cfg;
  }
  if (auto* p = std::get_if<ConstraintCMSC>(&cfg.constraint))
    p->delta = v;
  else if (auto* p = std::get_if<ConstraintSCSC>(&cfg.constraint))
    p->delta = v;
  else
    throw ValidationError("sweep.series: delta series needs a cm or spectral constraint");
  return cfg;
}

void check_waveform_shape(const Waveform& w, int n_tx, int code_len, const char* who) {
  if (n_tx < 1 || code_len < 1 || w.s.size() != n_tx * code_len)
    throw ValidationError(std::string(who) +
                          ": waveform size does not match n_tx*code_len");
}

} // namespace

DesignResult run_design(const ExperimentConfig& cfg) {
  if (const auto* c = std::get_if<ConstraintEC>(&cfg.constraint))
    return games::design_ec(cfg.scenario, c->e_t);
  if (const auto* c = std::get_if<ConstraintCMSC>(&cfg.constraint))
    return games::design_cmsc(cfg.scenario, *c, cfg.algo2);
  return games::design_scsc(cfg.scenario, std::get<ConstraintSCSC>(cfg.constraint),
                            cfg.algo3);
}

ResultTable run_detection_sweep(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  if (cfg.sweep.variable != "e_t")
    throw ValidationError("sweep.variable: detection sweep needs variable \"e_t\"");
  if (cfg.sweep.values.empty()) throw ValidationError("sweep.values: must not be empty");
  if (cfg.sweep.series == "delta" && std::holds_alternative<ConstraintEC>(cfg.constraint))
    throw ValidationError("sweep.series: delta series needs a cm or spectral constraint");

  std::vector<double> series = cfg.sweep.series_values;
  if (cfg.sweep.series.empty()) series = {cfg.scenario.radius};

  ResultTable t;
  t.columns = {"e_t", "series_value", "sinr_worst", "p_d"};
  int warnings = 0;
  for (double sv : series) {
    ExperimentConfig curve =
        cfg.sweep.series.empty() ? cfg : with_series(cfg, cfg.sweep.series, sv);
    for (double v : cfg.sweep.values) {
      try {
        DesignResult res = run_design(with_e_t(curve, v));
        // a worst case this side of roundoff is zero signal power
        const double z = std::max(0.0, res.sinr_worst);
        t.rows.push_back({v, sv, z, model::detection_probability(z, cfg.pfa)});
      } catch (const std::exception&) {
        ++warnings; // grid point dropped, run continues
      }
    }
  }
  stamp(t, cfg, t0);
  t.metadata["warnings"] = std::to_string(warnings);
  return t;
}

ResultTable run_convergence(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  if (std::holds_alternative<ConstraintEC>(cfg.constraint))
    throw ValidationError(
        "constraint.kind: convergence runs need an iterative design (cmsc or scsc)");

  ResultTable t;
  bool all_converged = true;
  auto push = [&](const DesignResult& res, const double* e_t) {
    all_converged = all_converged && res.converged;
    for (const auto& rec : res.trace) {
      std::vector<double> row;
      if (e_t) row.push_back(*e_t);
      row.push_back(double(rec.iter));
      row.push_back(rec.objective);
      row.push_back(rec.has_gap ? rec.gap : 0.0);
      t.rows.push_back(std::move(row));
    }
  };

  if (cfg.sweep.variable.empty()) {
    t.columns = {"iter", "objective", "gap"};
    push(run_design(cfg), nullptr);
  } else {
    if (!cfg.sweep.series.empty())
      throw ValidationError("sweep.series: not supported for convergence runs");
    if (cfg.sweep.values.empty()) throw ValidationError("sweep.values: must not be empty");
    t.columns = {"e_t", "iter", "objective", "gap"};
    for (double v : cfg.sweep.values) push(run_design(with_e_t(cfg, v)), &v);
  }
  stamp(t, cfg, t0);
  t.metadata["converged"] = all_converged ? "1" : "0";
  return t;
}

ResultTable run_psd(const Waveform& w, int n_tx, int code_len) {
  check_waveform_shape(w, n_tx, code_len, "psd");
  const int grid = 1024;

  ResultTable t;
  t.columns = {"f", "psd", "psd_db"};
  std::vector<double> lin(grid);
  double peak = 0;
  for (int g = 0; g < grid; ++g) {
    const double f = double(g) / grid;
    double acc = 0;
    for (int n = 0; n < n_tx; ++n) {
      cplx dtft = 0;
      for (int l = 0; l < code_len; ++l)
        dtft += w.s(n + l * n_tx) * std::polar(1.0, -2.0 * M_PI * f * l);
      acc += std::norm(dtft);
    }
    lin[g] = acc / code_len; // periodogram scale: grid mean equals energy/code_len
    peak = std::max(peak, lin[g]);
  }
  if (peak <= 0) throw ValidationError("psd: waveform is identically zero");
  for (int g = 0; g < grid; ++g) {
    const double rel = lin[g] / peak;
    t.rows.push_back({double(g) / grid, lin[g],
                      rel > 1e-30 ? 10.0 * std::log10(rel) : -300.0});
  }
  t.metadata["grid_points"] = std::to_string(grid);
  t.metadata["scale"] = "periodogram, transmitters summed, 1/code_len";
  return t;
}

ResultTable run_psd(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  DesignResult res = run_design(cfg);
  ResultTable t = run_psd(res.s_opt, cfg.scenario.n_tx, cfg.scenario.code_len);
  stamp(t, cfg, t0);
  return t;
}

ResultTable run_pulse_compression(const Waveform& w, int n_tx, int code_len, bool cross) {
  check_waveform_shape(w, n_tx, code_len, "pulse");
  const int L = code_len;
  auto entry = [&](int n, int l) { return w.s(n + l * n_tx); };
  auto corr = [&](int a, int b, int k) {
    cplx acc = 0;
    for (int l = std::max(0, k); l < std::min(L, L + k); ++l)
      acc += entry(a, l) * std::conj(entry(b, l - k));
    return acc;
  };
  auto db_rel = [](double mag, double ref) {
    const double rel = mag / ref;
    return rel > 1e-15 ? 20.0 * std::log10(rel) : -300.0;
  };

  std::vector<double> zero(n_tx);
  for (int n = 0; n < n_tx; ++n) {
    zero[n] = corr(n, n, 0).real();
    if (zero[n] <= 0)
      throw ValidationError("pulse: transmitter " + std::to_string(n + 1) +
                            " has zero energy");
  }

  ResultTable t;
  t.columns = {"lag"};
  for (int n = 0; n < n_tx; ++n)
    t.columns.push_back("autocorr_db_tx" + std::to_string(n + 1));
  std::vector<std::pair<int, int>> pairs;
  if (cross)
    for (int a = 0; a < n_tx; ++a)
      for (int b = a + 1; b < n_tx; ++b) {
        pairs.emplace_back(a, b);
        t.columns.push_back("xcorr_db_tx" + std::to_string(a + 1) + "_tx" +
                            std::to_string(b + 1));
      }

  std::vector<double> psl(n_tx, -300.0);
  for (int k = -(L - 1); k <= L - 1; ++k) {
    std::vector<double> row{double(k)};
    for (int n = 0; n < n_tx; ++n) {
      const double db = db_rel(std::abs(corr(n, n, k)), zero[n]);
      row.push_back(db);
      if (k != 0) psl[n] = std::max(psl[n], db);
    }
    for (auto [a, b] : pairs)
      row.push_back(db_rel(std::abs(corr(a, b, k)), std::sqrt(zero[a] * zero[b])));
    t.rows.push_back(std::move(row));
  }

  for (int n = 0; n < n_tx; ++n)
    t.metadata["psl_db_tx" + std::to_string(n + 1)] = fmt(psl[n]);
  t.metadata["correlation"] =
      "aperiodic; autocorrelation in dB re its zero lag, cross pairs in dB re the "
      "geometric mean of the zero lags";
  return t;
}

ResultTable run_pulse_compression(const ExperimentConfig& cfg, bool cross) {
  const auto t0 = Clock::now();
  DesignResult res = run_design(cfg);
  ResultTable t = run_pulse_compression(res.s_opt, cfg.scenario.n_tx,
                                        cfg.scenario.code_len, cross);
  stamp(t, cfg, t0);
  return t;
}

ResultTable run_robustness(const ExperimentConfig& cfg, int n_samples) {
  const auto t0 = Clock::now();
  if (n_samples < 1) throw ValidationError("robust: n_samples must be positive");

  DesignResult res = run_design(cfg);
  auto samples =
      solvers::sample_ball(cfg.scenario.t0, cfg.scenario.radius, n_samples, cfg.seed);

  std::vector<double> vals(samples.size());
  double mn = 0, mean = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    vals[i] = model::sinr(cfg.scenario, res.s_opt.s, res.w_opt, samples[i]);
    mn = i == 0 ? vals[i] : std::min(mn, vals[i]);
    mean += vals[i];
  }
  mean /= double(samples.size());

  ResultTable t;
  t.columns = {"sample", "sinr", "sinr_min", "sinr_mean", "sinr_worst"};
  for (size_t i = 0; i < vals.size(); ++i)
    t.rows.push_back({double(i), vals[i], mn, mean, res.sinr_worst});
  stamp(t, cfg, t0);
  t.metadata["n_samples"] = std::to_string(n_samples);
  return t;
}

} // namespace wg::harness
