#include "wavegame/harness.hpp"

#include "wavegame/model.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace wg::harness {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

// Unknown keys are treated as typos so a misspelled option cannot silently
// fall back to its default.
void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) fail(path + "." + it.key(), "unknown field");
  }
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_num(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

double opt_num(const json& j, const std::string& path, const char* key, double dflt) {
  const json* p = find(j, key);
  return p ? as_num(*p, path + "." + key) : dflt;
}

double req_num(const json& j, const std::string& path, const char* key) {
  const json* p = find(j, key);
  if (!p) fail(path + "." + key, "required");
  return as_num(*p, path + "." + key);
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

int opt_int(const json& j, const std::string& path, const char* key, int dflt) {
  const json* p = find(j, key);
  return p ? as_int(*p, path + "." + key) : dflt;
}

int req_int(const json& j, const std::string& path, const char* key) {
  const json* p = find(j, key);
  if (!p) fail(path + "." + key, "required");
  return as_int(*p, path + "." + key);
}

std::uint64_t opt_u64(const json& j, const std::string& path, const char* key,
                      std::uint64_t dflt) {
  const json* p = find(j, key);
  if (!p) return dflt;
  if (!p->is_number_integer() || (p->is_number_integer() && !p->is_number_unsigned() &&
                                  p->get<std::int64_t>() < 0))
    fail(path + "." + key, "expected a nonnegative integer");
  return p->get<std::uint64_t>();
}

std::string opt_str(const json& j, const std::string& path, const char* key,
                    const std::string& dflt) {
  const json* p = find(j, key);
  if (!p) return dflt;
  if (!p->is_string()) fail(path + "." + key, "expected a string");
  return p->get<std::string>();
}

std::vector<std::array<double, 2>> polar_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    fail(path, "expected a nonempty array of [magnitude, phase_radians] pairs");
  std::vector<std::array<double, 2>> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string at = path + "[" + std::to_string(i) + "]";
    const json& e = j[i];
    if (!e.is_array() || e.size() != 2) fail(at, "expected [magnitude, phase_radians]");
    double mag = as_num(e[0], at);
    double ph = as_num(e[1], at);
    if (mag < 0) fail(at, "magnitude must be nonnegative");
    out.push_back({mag, ph});
  }
  return out;
}

Vec from_polar(const std::vector<std::array<double, 2>>& p) {
  Vec v(static_cast<int>(p.size()));
  for (size_t i = 0; i < p.size(); ++i) v(static_cast<int>(i)) = std::polar(p[i][0], p[i][1]);
  return v;
}

std::vector<std::array<double, 2>> to_polar(const Vec& v) {
  std::vector<std::array<double, 2>> out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = {std::abs(v(i)), std::arg(v(i))};
  return out;
}

void parse_scenario(const json& j, ExperimentConfig& cfg) {
  const std::string path = "scenario";
  check_keys(j, path,
             {"n_tx", "n_rx", "code_len", "tir_len", "theta_t_deg", "tx_spacing",
              "rx_spacing", "rho", "pfa", "t0", "radius"});
  Scenario& scn = cfg.scenario;
  scn.n_tx = req_int(j, path, "n_tx");
  scn.n_rx = req_int(j, path, "n_rx");
  scn.code_len = req_int(j, path, "code_len");
  scn.tir_len = req_int(j, path, "tir_len");
  if (scn.n_tx < 1) fail("scenario.n_tx", "must be at least 1");
  if (scn.n_rx < 1) fail("scenario.n_rx", "must be at least 1");
  if (scn.code_len < 1) fail("scenario.code_len", "must be at least 1");
  if (scn.tir_len < 1) fail("scenario.tir_len", "must be at least 1");

  cfg.theta_deg = req_num(j, path, "theta_t_deg");
  scn.theta_t = cfg.theta_deg * M_PI / 180.0;
  scn.tx_spacing = opt_num(j, path, "tx_spacing", 1.0);
  scn.rx_spacing = opt_num(j, path, "rx_spacing", 0.5);

  cfg.rho = opt_num(j, path, "rho", 0.8);
  if (cfg.rho < 0 || cfg.rho >= 1) fail("scenario.rho", "must lie in [0, 1)");
  cfg.pfa = opt_num(j, path, "pfa", 1e-6);
  if (cfg.pfa <= 0 || cfg.pfa >= 1) fail("scenario.pfa", "must lie in (0, 1)");

  scn.radius = opt_num(j, path, "radius", 0.0);
  if (scn.radius < 0) fail("scenario.radius", "must be nonnegative");

  const json* t0 = find(j, "t0");
  if (!t0) fail("scenario.t0", "required");
  cfg.t0_polar = polar_list(*t0, "scenario.t0");
  if (static_cast<int>(cfg.t0_polar.size()) != scn.tir_len)
    fail("scenario.t0", "expected tir_len entries");
  scn.t0 = from_polar(cfg.t0_polar);

  scn.noise_cov = model::noise_covariance(cfg.rho, scn.rx_dim());
  try {
    scn.validate();
  } catch (const ValidationError& e) {
    fail("scenario", e.what());
  }
}

std::vector<Band> parse_bands(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    fail(path, "expected a nonempty array of [f1, f2, weight] triples");
  std::vector<Band> out;
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string at = path + "[" + std::to_string(i) + "]";
    const json& e = j[i];
    if (!e.is_array() || e.size() != 3) fail(at, "expected [f1, f2, weight]");
    Band b{as_num(e[0], at), as_num(e[1], at), as_num(e[2], at)};
    if (!(0 <= b.f1 && b.f1 < b.f2 && b.f2 <= 1))
      fail(at, "band edges need 0 <= f1 < f2 <= 1");
    if (b.weight < 0) fail(at, "weight must be nonnegative");
    out.push_back(b);
  }
  return out;
}

// The reference code defaults to the orthogonal chirp at the constraint energy.
// s0 is rebuilt from its polar form either way, so the stored pairs are the
// exact serialization of what the algorithms see.
void parse_similarity(const json& j, ExperimentConfig& cfg, double e_t, double& delta,
                      Waveform& s0) {
  const json* d = find(j, "delta");
  if (!d) fail("constraint.delta", "required");
  delta = as_num(*d, "constraint.delta");
  if (!(delta > 0 && delta <= 2)) fail("constraint.delta", "must lie in (0, 2]");

  const int n = cfg.scenario.n_tx * cfg.scenario.code_len;
  if (const json* p = find(j, "s0")) {
    cfg.s0_polar = polar_list(*p, "constraint.s0");
    if (static_cast<int>(cfg.s0_polar.size()) != n)
      fail("constraint.s0", "expected n_tx*code_len entries");
  } else {
    cfg.s0_polar = to_polar(model::lfm_reference(cfg.scenario.n_tx,
                                                 cfg.scenario.code_len, e_t).s);
  }
  s0 = make_waveform(from_polar(cfg.s0_polar));
}

void parse_constraint(const json& j, ExperimentConfig& cfg) {
  const std::string kind = opt_str(j, "constraint", "kind", "");
  if (kind == "ec") {
    check_keys(j, "constraint", {"kind", "e_t"});
  } else if (kind == "cmsc") {
    check_keys(j, "constraint", {"kind", "e_t", "delta", "s0"});
  } else if (kind == "scsc") {
    check_keys(j, "constraint", {"kind", "e_t", "delta", "s0", "bands", "e_i"});
  } else {
    fail("constraint.kind", "expected \"ec\", \"cmsc\" or \"scsc\"");
  }

  const double e_t = req_num(j, "constraint", "e_t");
  if (e_t <= 0) fail("constraint.e_t", "must be positive");

  if (kind == "ec") {
    cfg.constraint = ConstraintEC{e_t};
    return;
  }
  if (kind == "cmsc") {
    ConstraintCMSC c;
    c.e_t = e_t;
    parse_similarity(j, cfg, e_t, c.delta, c.s0);
    const double mag = std::sqrt(e_t / (cfg.scenario.n_tx * cfg.scenario.code_len));
    for (int i = 0; i < c.s0.s.size(); ++i)
      if (std::abs(std::abs(c.s0.s(i)) - mag) > 1e-6 * mag)
        fail("constraint.s0", "entry " + std::to_string(i) +
                                  " must have magnitude sqrt(e_t/(n_tx*code_len))");
    cfg.constraint = std::move(c);
    return;
  }
  ConstraintSCSC c;
  c.e_t = e_t;
  parse_similarity(j, cfg, e_t, c.delta, c.s0);
  const json* bands = find(j, "bands");
  if (!bands) fail("constraint.bands", "required");
  c.bands = parse_bands(*bands, "constraint.bands");
  c.e_i = req_num(j, "constraint", "e_i");
  if (c.e_i <= 0) fail("constraint.e_i", "must be positive");
  cfg.constraint = std::move(c);
}

void parse_algo(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "algo", {"beta", "eta", "eps_c", "eps_s", "max_iter_c", "max_iter_s",
                         "m_trials", "seed"});
  cfg.algo2.beta = opt_num(j, "algo", "beta", cfg.algo2.beta);
  if (cfg.algo2.beta < 0) fail("algo.beta", "must be nonnegative");
  cfg.algo2.eta = opt_num(j, "algo", "eta", cfg.algo2.eta);
  if (cfg.algo2.eta <= 0) fail("algo.eta", "must be positive");
  cfg.algo2.eps = opt_num(j, "algo", "eps_c", cfg.algo2.eps);
  if (cfg.algo2.eps <= 0) fail("algo.eps_c", "must be positive");
  cfg.algo3.eps = opt_num(j, "algo", "eps_s", cfg.algo3.eps);
  if (cfg.algo3.eps <= 0) fail("algo.eps_s", "must be positive");
  cfg.algo2.max_iter = opt_int(j, "algo", "max_iter_c", cfg.algo2.max_iter);
  if (cfg.algo2.max_iter < 1) fail("algo.max_iter_c", "must be at least 1");
  cfg.algo3.max_iter = opt_int(j, "algo", "max_iter_s", cfg.algo3.max_iter);
  if (cfg.algo3.max_iter < 1) fail("algo.max_iter_s", "must be at least 1");
  cfg.algo2.m_trials = opt_int(j, "algo", "m_trials", cfg.algo2.m_trials);
  if (cfg.algo2.m_trials < 1) fail("algo.m_trials", "must be at least 1");
  cfg.algo2.seed = opt_u64(j, "algo", "seed", cfg.algo2.seed);
}

void parse_sweep(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "sweep", {"variable", "values", "series", "series_values"});
  SweepSpec& sw = cfg.sweep;
  sw.variable = opt_str(j, "sweep", "variable", "");
  if (!sw.variable.empty() && sw.variable != "e_t")
    fail("sweep.variable", "unknown variable \"" + sw.variable + "\"");

  if (const json* p = find(j, "values")) {
    if (!p->is_array()) fail("sweep.values", "expected an array of numbers");
    for (size_t i = 0; i < p->size(); ++i) {
      double v = as_num((*p)[i], "sweep.values[" + std::to_string(i) + "]");
      if (v <= 0) fail("sweep.values[" + std::to_string(i) + "]", "e_t must be positive");
      sw.values.push_back(v);
    }
  }
  if (sw.variable.empty() && !sw.values.empty())
    fail("sweep.values", "set sweep.variable first");
  if (!sw.variable.empty() && sw.values.empty()) fail("sweep.values", "required");

  sw.series = opt_str(j, "sweep", "series", "");
  if (!sw.series.empty() && sw.series != "r" && sw.series != "delta")
    fail("sweep.series", "expected \"r\" or \"delta\"");
  if (!sw.series.empty() && sw.variable.empty())
    fail("sweep.series", "set sweep.variable first");
  if (sw.series == "delta" && std::holds_alternative<ConstraintEC>(cfg.constraint))
    fail("sweep.series", "delta series needs a cm or spectral constraint");

  if (const json* p = find(j, "series_values")) {
    if (!p->is_array()) fail("sweep.series_values", "expected an array of numbers");
    for (size_t i = 0; i < p->size(); ++i) {
      const std::string at = "sweep.series_values[" + std::to_string(i) + "]";
      double v = as_num((*p)[i], at);
      if (sw.series == "r" && v < 0) fail(at, "radius must be nonnegative");
      if (sw.series == "delta" && !(v > 0 && v <= 2)) fail(at, "must lie in (0, 2]");
      sw.series_values.push_back(v);
    }
  }
  if (sw.series.empty() && !sw.series_values.empty())
    fail("sweep.series_values", "set sweep.series first");
  if (!sw.series.empty() && sw.series_values.empty())
    fail("sweep.series_values", "required");
}

void parse_output(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "output", {"dir", "formats"});
  cfg.output.dir = opt_str(j, "output", "dir", "out");
  if (cfg.output.dir.empty()) fail("output.dir", "must not be empty");
  if (const json* p = find(j, "formats")) {
    if (!p->is_array() || p->empty())
      fail("output.formats", "expected a nonempty array drawn from [\"csv\", \"svg\"]");
    cfg.output.formats.clear();
    for (const auto& e : *p) {
      if (!e.is_string()) fail("output.formats", "expected strings");
      std::string f = e.get<std::string>();
      if (f != "csv" && f != "svg") fail("output.formats", "unknown format \"" + f + "\"");
      for (const auto& seen : cfg.output.formats)
        if (seen == f) fail("output.formats", "duplicate entry \"" + f + "\"");
      cfg.output.formats.push_back(f);
    }
  }
}

json polar_json(const std::vector<std::array<double, 2>>& p) {
  json out = json::array();
  for (const auto& e : p) out.push_back(json::array({e[0], e[1]}));
  return out;
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) fail("config", "expected a JSON object");
  check_keys(j, "config", {"scenario", "constraint", "algo", "sweep", "output", "seed"});

  ExperimentConfig cfg;
  cfg.seed = opt_u64(j, "config", "seed", 1);
  cfg.algo2.seed = cfg.seed;

  const json* scn = find(j, "scenario");
  if (!scn) fail("scenario", "required");
  if (!scn->is_object()) fail("scenario", "expected an object");
  parse_scenario(*scn, cfg);

  const json* con = find(j, "constraint");
  if (!con) fail("constraint", "required");
  if (!con->is_object()) fail("constraint", "expected an object");
  parse_constraint(*con, cfg);

  if (const json* p = find(j, "algo")) {
    if (!p->is_object()) fail("algo", "expected an object");
    parse_algo(*p, cfg);
  }
  if (const json* p = find(j, "sweep")) {
    if (!p->is_object()) fail("sweep", "expected an object");
    parse_sweep(*p, cfg);
  }
  if (const json* p = find(j, "output")) {
    if (!p->is_object()) fail("output", "expected an object");
    parse_output(*p, cfg);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("config: cannot open \"" + path + "\"");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string save_config(const ExperimentConfig& cfg) {
  json j;
  json& js = j["scenario"];
  js["n_tx"] = cfg.scenario.n_tx;
  js["n_rx"] = cfg.scenario.n_rx;
  js["code_len"] = cfg.scenario.code_len;
  js["tir_len"] = cfg.scenario.tir_len;
  js["theta_t_deg"] = cfg.theta_deg;
  js["tx_spacing"] = cfg.scenario.tx_spacing;
  js["rx_spacing"] = cfg.scenario.rx_spacing;
  js["rho"] = cfg.rho;
  js["pfa"] = cfg.pfa;
  js["radius"] = cfg.scenario.radius;
  js["t0"] = polar_json(cfg.t0_polar);

  json& jc = j["constraint"];
  if (const auto* c = std::get_if<ConstraintEC>(&cfg.constraint)) {
    jc["kind"] = "ec";
    jc["e_t"] = c->e_t;
  } else if (const auto* c = std::get_if<ConstraintCMSC>(&cfg.constraint)) {
    jc["kind"] = "cmsc";
    jc["e_t"] = c->e_t;
    jc["delta"] = c->delta;
    jc["s0"] = polar_json(cfg.s0_polar);
  } else {
    const auto& sc = std::get<ConstraintSCSC>(cfg.constraint);
    jc["kind"] = "scsc";
    jc["e_t"] = sc.e_t;
    jc["delta"] = sc.delta;
    jc["s0"] = polar_json(cfg.s0_polar);
    json bands = json::array();
    for (const auto& b : sc.bands) bands.push_back(json::array({b.f1, b.f2, b.weight}));
    jc["bands"] = bands;
    jc["e_i"] = sc.e_i;
  }

  json& ja = j["algo"];
  ja["beta"] = cfg.algo2.beta;
  ja["eta"] = cfg.algo2.eta;
  ja["eps_c"] = cfg.algo2.eps;
  ja["eps_s"] = cfg.algo3.eps;
  ja["max_iter_c"] = cfg.algo2.max_iter;
  ja["max_iter_s"] = cfg.algo3.max_iter;
  ja["m_trials"] = cfg.algo2.m_trials;
  ja["seed"] = cfg.algo2.seed;

  json& jw = j["sweep"];
  jw["variable"] = cfg.sweep.variable;
  jw["values"] = cfg.sweep.values;
  jw["series"] = cfg.sweep.series;
  jw["series_values"] = cfg.sweep.series_values;

  json& jo = j["output"];
  jo["dir"] = cfg.output.dir;
  jo["formats"] = cfg.output.formats;

  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string s = save_config(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

} // namespace wg::harness
