#include "doctest.h"

#include "wavegame/harness.hpp"
#include "wavegame/model.hpp"

#include "test_util.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace wg;
using namespace wg::harness;

namespace {

std::string tiny_config_text(const std::string& constraint_block,
                             const std::string& extra = "") {
  // Matches tiny_scenario() except for rho, which stays at its default here.
  std::ostringstream os;
  os << "{\n"
     << "  \"scenario\": {\n"
     << "    \"n_tx\": 2, \"n_rx\": 2, \"code_len\": 4, \"tir_len\": 3,\n"
     << "    \"theta_t_deg\": 20.0, \"rho\": 0.5, \"radius\": 0.3,\n"
     << "    \"t0\": [[0.41231056256176607, 0.24497866312686414],\n"
     << "             [0.7280109889280518, -0.27829965900511133],\n"
     << "             [0.31622776601683794, 1.2490457723982544]]\n"
     << "  },\n"
     << "  \"constraint\": " << constraint_block;
  if (!extra.empty()) os << ",\n" << extra;
  os << "\n}\n";
  return os.str();
}

template <class F>
std::string validation_message(F&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

bool mentions(const std::string& msg, const std::string& needle) {
  return msg.find(needle) != std::string::npos;
}

ExperimentConfig tiny_ec_config(double radius = 0.3, double e_t = 1.0) {
  ExperimentConfig cfg;
  cfg.scenario = tiny_scenario(radius);
  cfg.rho = 0.5;
  cfg.theta_deg = 20.0;
  cfg.constraint = ConstraintEC{e_t};
  for (int i = 0; i < cfg.scenario.t0.size(); ++i)
    cfg.t0_polar.push_back({std::abs(cfg.scenario.t0(i)), std::arg(cfg.scenario.t0(i))});
  return cfg;
}

ExperimentConfig tiny_cmsc_config(double radius = 0.3) {
  ExperimentConfig cfg = tiny_ec_config(radius);
  ConstraintCMSC c;
  c.e_t = 1.0;
  c.delta = 1.0;
  c.s0 = model::lfm_reference(2, 4, c.e_t);
  cfg.constraint = c;
  cfg.algo2.max_iter = 8;
  cfg.algo2.m_trials = 10;
  return cfg;
}

ExperimentConfig tiny_scsc_config() {
  ExperimentConfig cfg = tiny_ec_config(0.3);
  ConstraintSCSC c;
  c.e_t = 1.0;
  c.delta = 1.2;
  c.s0 = model::lfm_reference(2, 4, c.e_t);
  c.bands = {{0.3, 0.45, 1.0}};
  c.e_i = 4.0 * games::feasible_init(cfg.scenario, c).stopband_energy;
  cfg.constraint = c;
  cfg.algo3.max_iter = 12;
  return cfg;
}

} // namespace

TEST_CASE("config parsing applies documented defaults") {
  auto cfg = parse_config(tiny_config_text("{\"kind\": \"ec\", \"e_t\": 1.0}"));

  CHECK(cfg.algo2.beta == 0.05);
  CHECK(cfg.algo2.eta == 0.002);
  CHECK(cfg.algo2.eps == 0.001);
  CHECK(cfg.algo2.max_iter == 100);
  CHECK(cfg.algo2.m_trials == 100);
  CHECK(cfg.algo3.eps == 0.001);
  CHECK(cfg.algo3.max_iter == 50);
  CHECK(cfg.seed == 1);
  CHECK(cfg.algo2.seed == 1);
  CHECK(cfg.pfa == 1e-6);
  CHECK(cfg.output.dir == "out");
  REQUIRE(cfg.output.formats.size() == 1);
  CHECK(cfg.output.formats[0] == "csv");
  CHECK(cfg.sweep.variable.empty());

  CHECK(cfg.scenario.theta_t == doctest::Approx(20.0 * M_PI / 180.0));
  CHECK(cfg.scenario.radius == 0.3);
  REQUIRE(cfg.scenario.t0.size() == 3);
  CHECK(std::abs(cfg.scenario.t0(0) - cplx(0.4, 0.1)) < 1e-12);
  CHECK(std::abs(cfg.scenario.t0(2) - cplx(0.1, 0.3)) < 1e-12);

  // noise covariance is built from rho at parse time
  Mat want = model::noise_covariance(0.5, cfg.scenario.rx_dim());
  CHECK((cfg.scenario.noise_cov - want).norm() == 0.0);

  REQUIRE(std::holds_alternative<ConstraintEC>(cfg.constraint));
  CHECK(std::get<ConstraintEC>(cfg.constraint).e_t == 1.0);
}

TEST_CASE("config parsing fills the cm reference with the orthogonal chirp") {
  auto cfg = parse_config(
      tiny_config_text("{\"kind\": \"cmsc\", \"e_t\": 2.0, \"delta\": 0.5}"));
  REQUIRE(std::holds_alternative<ConstraintCMSC>(cfg.constraint));
  const auto& c = std::get<ConstraintCMSC>(cfg.constraint);
  REQUIRE(c.s0.s.size() == 8);
  CHECK(cfg.s0_polar.size() == 8);
  const double mag = std::sqrt(2.0 / 8.0);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(c.s0.s(i)) == doctest::Approx(mag).epsilon(1e-12));
  CHECK(c.s0.energy == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("config validation reports the offending field") {
  auto bad_delta = tiny_config_text("{\"kind\": \"cmsc\", \"e_t\": 1.0, \"delta\": 3.0}");
  CHECK(mentions(validation_message([&] { (void)parse_config(bad_delta); }),
                 "constraint.delta"));

  auto bad_e_t = tiny_config_text("{\"kind\": \"ec\", \"e_t\": -1.0}");
  CHECK(mentions(validation_message([&] { (void)parse_config(bad_e_t); }), "constraint.e_t"));

  auto bad_kind = tiny_config_text("{\"kind\": \"mystery\", \"e_t\": 1.0}");
  CHECK(mentions(validation_message([&] { (void)parse_config(bad_kind); }), "constraint.kind"));

  auto bad_sweep = tiny_config_text(
      "{\"kind\": \"ec\", \"e_t\": 1.0}",
      "  \"sweep\": {\"variable\": \"q_len\", \"values\": [1.0]}");
  CHECK(mentions(validation_message([&] { (void)parse_config(bad_sweep); }), "sweep.variable"));

  auto bad_series = tiny_config_text(
      "{\"kind\": \"ec\", \"e_t\": 1.0}",
      "  \"sweep\": {\"variable\": \"e_t\", \"values\": [1.0], \"series\": \"delta\", "
      "\"series_values\": [0.5]}");
  CHECK(mentions(validation_message([&] { (void)parse_config(bad_series); }), "sweep.series"));

  auto bad_format = tiny_config_text(
      "{\"kind\": \"ec\", \"e_t\": 1.0}", "  \"output\": {\"formats\": [\"png\"]}");
  CHECK(mentions(validation_message([&] { (void)parse_config(bad_format); }),
                 "output.formats"));

  auto bad_rho = tiny_config_text("{\"kind\": \"ec\", \"e_t\": 1.0}");
  bad_rho.replace(bad_rho.find("\"rho\": 0.5"), 10, "\"rho\": 1.5");
  CHECK(mentions(validation_message([&] { (void)parse_config(bad_rho); }), "scenario.rho"));

  // unknown keys are typos, not extensions
  auto unknown = tiny_config_text("{\"kind\": \"ec\", \"e_t\": 1.0, \"bogus\": 1}");
  CHECK(mentions(validation_message([&] { (void)parse_config(unknown); }), "constraint.bogus"));

  std::string no_t0 = "{\"scenario\": {\"n_tx\": 2, \"n_rx\": 2, \"code_len\": 4, "
                      "\"tir_len\": 3, \"theta_t_deg\": 20.0},"
                      "\"constraint\": {\"kind\": \"ec\", \"e_t\": 1.0}}";
  CHECK(mentions(validation_message([&] { (void)parse_config(no_t0); }), "scenario.t0"));

  CHECK_THROWS_AS((void)parse_config("{ not json"), ValidationError);
  CHECK_THROWS_AS((void)parse_config("[1, 2]"), ValidationError);
}

TEST_CASE("config round trip is canonical") {
  auto text = tiny_config_text(
      "{\"kind\": \"cmsc\", \"e_t\": 1.0, \"delta\": 0.7}",
      "  \"algo\": {\"beta\": 0.1, \"m_trials\": 25},\n"
      "  \"sweep\": {\"variable\": \"e_t\", \"values\": [0.5, 1.0, 2.0],\n"
      "            \"series\": \"delta\", \"series_values\": [0.25, 1.0]},\n"
      "  \"output\": {\"dir\": \"artifacts\", \"formats\": [\"csv\", \"svg\"]},\n"
      "  \"seed\": 11");
  auto c1 = parse_config(text);
  CHECK(c1.algo2.beta == 0.1);
  CHECK(c1.algo2.m_trials == 25);
  CHECK(c1.algo2.eta == 0.002); // untouched default survives next to overrides
  CHECK(c1.seed == 11);
  CHECK(c1.algo2.seed == 11); // global seed flows into the algo block

  const std::string s1 = save_config(c1);
  auto c2 = parse_config(s1);
  CHECK(save_config(c2) == s1);
  CHECK(config_hash(c1) == config_hash(c2));

  CHECK(c2.seed == c1.seed);
  CHECK(c2.scenario.theta_t == c1.scenario.theta_t);
  CHECK((c2.scenario.t0 - c1.scenario.t0).norm() == 0.0);
  const auto& k1 = std::get<ConstraintCMSC>(c1.constraint);
  const auto& k2 = std::get<ConstraintCMSC>(c2.constraint);
  CHECK(k2.e_t == k1.e_t);
  CHECK(k2.delta == k1.delta);
  CHECK((k2.s0.s - k1.s0.s).norm() == 0.0);
  CHECK(c2.sweep.values == c1.sweep.values);
  CHECK(c2.sweep.series_values == c1.sweep.series_values);

  auto c3 = c1;
  c3.seed = 12;
  CHECK(config_hash(c3) != config_hash(c1));
}

TEST_CASE("config loads from disk and the algo block may pin its own seed") {
  const char* path = "harness_tmp_cfg.json";
  {
    std::ofstream f(path);
    f << tiny_config_text("{\"kind\": \"ec\", \"e_t\": 1.0}", "  \"seed\": 7");
  }
  auto cfg = load_config(path);
  CHECK(cfg.seed == 7);
  CHECK(cfg.algo2.seed == 7);
  std::remove(path);

  {
    std::ofstream f(path);
    f << tiny_config_text("{\"kind\": \"ec\", \"e_t\": 1.0}",
                          "  \"algo\": {\"seed\": 9},\n  \"seed\": 7");
  }
  cfg = load_config(path);
  CHECK(cfg.seed == 7);
  CHECK(cfg.algo2.seed == 9);
  std::remove(path);

  CHECK_THROWS_AS((void)load_config("does_not_exist.json"), ValidationError);
}

TEST_CASE("csv emission follows the documented format") {
  ResultTable t;
  t.columns = {"a", "b,c"};
  t.rows = {{1.0, 0.123456789012345}};
  CHECK(to_csv(t) == "a,\"b,c\"\n1,0.123456789012\n");

  t.rows.clear();
  CHECK(to_csv(t) == "a,\"b,c\"\n"); // empty table keeps the header

  ResultTable quoted;
  quoted.columns = {"he\"llo", "x"};
  quoted.rows = {{2.0, 3.0}};
  CHECK(to_csv(quoted) == "\"he\"\"llo\",x\n2,3\n");
  CHECK(to_csv(quoted).find('\r') == std::string::npos);

  ResultTable bad;
  bad.columns = {"a"};
  bad.rows = {{1.0}, {std::nan("")}};
  CHECK(mentions(validation_message([&] { (void)to_csv(bad); }), "row 1"));

  ResultTable ragged;
  ragged.columns = {"a", "b"};
  ragged.rows = {{1.0}};
  CHECK_THROWS_AS((void)to_csv(ragged), ValidationError);

  ResultTable empty;
  CHECK_THROWS_AS((void)to_csv(empty), ValidationError);

  ResultTable ok;
  ok.columns = {"v"};
  ok.rows = {{0.5}};
  CHECK_THROWS_AS(emit(ok, "txt", "harness_tmp.txt"), ValidationError);
  emit(ok, "csv", "harness_tmp.csv");
  std::ifstream f("harness_tmp.csv", std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == to_csv(ok));
  std::remove("harness_tmp.csv");
}

TEST_CASE("csv round trip preserves names and values") {
  ResultTable t;
  t.columns = {"plain", "with,comma", "with\"quote"};
  t.rows = {{M_PI, 1e-30, -2.5e17}, {0.1, 7.0, 123456.654321}};
  auto back = parse_csv(to_csv(t));
  REQUIRE(back.columns == t.columns);
  REQUIRE(back.rows.size() == t.rows.size());
  for (size_t i = 0; i < t.rows.size(); ++i)
    for (size_t j = 0; j < t.columns.size(); ++j) {
      double want = t.rows[i][j];
      CHECK(std::abs(back.rows[i][j] - want) <= 1e-10 * (1.0 + std::abs(want)));
    }

  CHECK_THROWS_AS((void)parse_csv("a,b\n1,zebra\n"), ValidationError);
}

TEST_CASE("svg chart is self contained") {
  ResultTable t;
  t.columns = {"x", "low", "high"};
  for (int i = 0; i < 10; ++i)
    t.rows.push_back({0.1 * i, std::sin(0.3 * i), 1.0 + 0.2 * i});
  auto svg = to_svg(t);
  CHECK(mentions(svg, "<svg"));
  CHECK(mentions(svg, "</svg>"));
  CHECK(mentions(svg, "polyline"));
  CHECK(mentions(svg, "low"));
  CHECK(mentions(svg, "high"));
  CHECK(mentions(svg, ">x<")); // axis label
  // the only URL is the xmlns; nothing is fetched from elsewhere
  size_t hits = 0;
  for (size_t p = svg.find("http"); p != std::string::npos; p = svg.find("http", p + 1))
    ++hits;
  CHECK(hits == 1);
  CHECK_FALSE(mentions(svg, "href"));
  CHECK(to_svg(t) == svg);

  ResultTable narrow;
  narrow.columns = {"only"};
  narrow.rows = {{1.0}};
  CHECK_THROWS_AS((void)to_svg(narrow), ValidationError);
}

TEST_CASE("detection sweep produces monotone blocks per series") {
  auto cfg = tiny_ec_config();
  cfg.sweep.variable = "e_t";
  cfg.sweep.values = {0.5, 1.0, 2.0, 4.0};
  cfg.sweep.series = "r";
  cfg.sweep.series_values = {0.0, 0.25};
  cfg.pfa = 1e-4;

  auto t = run_detection_sweep(cfg);
  REQUIRE(t.columns == std::vector<std::string>{"e_t", "series_value", "sinr_worst", "p_d"});
  REQUIRE(t.rows.size() == 8);
  CHECK(t.metadata.at("warnings") == "0");
  CHECK(t.metadata.count("config_hash") == 1);
  CHECK(t.metadata.at("seed") == "1");

  for (size_t b = 0; b < 2; ++b) {
    for (size_t i = 0; i < 4; ++i) {
      const auto& row = t.rows[4 * b + i];
      CHECK(row[0] == cfg.sweep.values[i]);
      CHECK(row[1] == cfg.sweep.series_values[b]);
      CHECK(row[2] >= 0.0);
      CHECK(row[3] >= cfg.pfa - 1e-9);
      CHECK(row[3] <= 1.0);
      if (i > 0) CHECK(row[3] >= t.rows[4 * b + i - 1][3] - 1e-9);
    }
  }
  // a tighter uncertainty set never hurts the detector
  for (size_t i = 0; i < 4; ++i) CHECK(t.rows[i][3] >= t.rows[4 + i][3] - 1e-9);

  CHECK(to_csv(run_detection_sweep(cfg)) == to_csv(t));
}

TEST_CASE("detection sweep rescales the cm reference along the energy grid") {
  auto cfg = tiny_cmsc_config();
  cfg.algo2.max_iter = 4;
  cfg.algo2.m_trials = 6;
  cfg.sweep.variable = "e_t";
  cfg.sweep.values = {0.5, 2.0};
  cfg.sweep.series = "delta";
  cfg.sweep.series_values = {1.0};
  cfg.pfa = 1e-3;

  auto t = run_detection_sweep(cfg);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.metadata.at("warnings") == "0");
  CHECK(t.rows[1][2] > t.rows[0][2]); // four times the energy
  CHECK(t.rows[1][3] >= t.rows[0][3] - 1e-9);
}

TEST_CASE("detection sweep validates its grid") {
  auto cfg = tiny_ec_config();
  CHECK(mentions(validation_message([&] { (void)run_detection_sweep(cfg); }),
                 "sweep.variable"));

  cfg.sweep.variable = "e_t";
  cfg.sweep.values = {};
  CHECK(mentions(validation_message([&] { (void)run_detection_sweep(cfg); }),
                 "sweep.values"));

  cfg.sweep.values = {1.0};
  cfg.sweep.series = "delta";
  cfg.sweep.series_values = {0.5};
  CHECK(mentions(validation_message([&] { (void)run_detection_sweep(cfg); }),
                 "sweep.series"));
}

TEST_CASE("convergence table mirrors the design trace") {
  auto cfg = tiny_cmsc_config();
  auto t = run_convergence(cfg);
  REQUIRE(t.columns == std::vector<std::string>{"iter", "objective", "gap"});
  REQUIRE(t.rows.size() >= 2);
  CHECK(t.rows[0][0] == 0.0);
  CHECK(t.rows[0][2] == 0.0); // no gap before the first step
  for (size_t i = 0; i < t.rows.size(); ++i) CHECK(t.rows[i][0] == double(i));

  auto direct = games::design_cmsc(cfg.scenario, std::get<ConstraintCMSC>(cfg.constraint),
                                   cfg.algo2);
  REQUIRE(direct.trace.size() == t.rows.size());
  for (size_t i = 0; i < t.rows.size(); ++i)
    CHECK(t.rows[i][1] == direct.trace[i].objective);

  CHECK(to_csv(run_convergence(cfg)) == to_csv(t));

  auto ec = tiny_ec_config();
  CHECK_THROWS_AS((void)run_convergence(ec), ValidationError);
}

TEST_CASE("convergence surrogate trace is nondecreasing for the spectral design") {
  auto cfg = tiny_scsc_config();
  auto t = run_convergence(cfg);
  REQUIRE(t.rows.size() >= 2);
  for (size_t i = 1; i < t.rows.size(); ++i)
    CHECK(t.rows[i][1] >= t.rows[i - 1][1] - 1e-8);
}

TEST_CASE("convergence stacks energy sweep blocks") {
  auto cfg = tiny_cmsc_config();
  cfg.algo2.max_iter = 3;
  cfg.sweep.variable = "e_t";
  cfg.sweep.values = {0.5, 1.0};
  auto t = run_convergence(cfg);
  REQUIRE(t.columns ==
          std::vector<std::string>{"e_t", "iter", "objective", "gap"});
  CHECK(t.rows.front()[0] == 0.5);
  CHECK(t.rows.back()[0] == 1.0);
}

TEST_CASE("psd locates a single tone and satisfies parseval") {
  const int n_tx = 2, L = 8;
  const double f0 = 32.0 / 1024.0;
  Vec s(n_tx * L);
  for (int l = 0; l < L; ++l)
    for (int n = 0; n < n_tx; ++n)
      s(n + l * n_tx) = std::polar(1.0, 2.0 * M_PI * f0 * l);
  auto w = make_waveform(s);

  auto t = run_psd(w, n_tx, L);
  REQUIRE(t.columns == std::vector<std::string>{"f", "psd", "psd_db"});
  REQUIRE(t.rows.size() == 1024);

  size_t peak = 0;
  double mean = 0;
  for (size_t g = 0; g < t.rows.size(); ++g) {
    CHECK(t.rows[g][0] == double(g) / 1024.0);
    if (t.rows[g][1] > t.rows[peak][1]) peak = g;
    mean += t.rows[g][1];
    CHECK(t.rows[g][2] <= 1e-12); // dB is normalized to the peak
  }
  mean /= double(t.rows.size());
  CHECK(t.rows[peak][0] == f0);
  CHECK(t.rows[peak][2] == 0.0);
  const double want = w.energy / L;
  CHECK(std::abs(mean - want) <= 0.01 * want);
}

TEST_CASE("psd of the reference code satisfies parseval") {
  auto w = model::lfm_reference(2, 16, 1.0);
  auto t = run_psd(w, 2, 16);
  double mean = 0;
  for (const auto& row : t.rows) mean += row[1];
  mean /= double(t.rows.size());
  CHECK(std::abs(mean - 1.0 / 16.0) <= 0.01 / 16.0);

  CHECK_THROWS_AS((void)run_psd(w, 3, 16), ValidationError);
}

TEST_CASE("pulse compression normalizes the zero lag") {
  Vec s(8);
  // rows [1 1 1 1] and [1 -1 1 -1], interleaved layout
  for (int l = 0; l < 4; ++l) {
    s(0 + 2 * l) = 1.0;
    s(1 + 2 * l) = (l % 2 == 0) ? 1.0 : -1.0;
  }
  auto w = make_waveform(s);

  auto t = run_pulse_compression(w, 2, 4);
  REQUIRE(t.columns ==
          std::vector<std::string>{"lag", "autocorr_db_tx1", "autocorr_db_tx2"});
  REQUIRE(t.rows.size() == 7);
  for (size_t i = 0; i < 7; ++i) CHECK(t.rows[i][0] == double(i) - 3.0);

  const auto& zero = t.rows[3];
  CHECK(zero[1] == 0.0);
  CHECK(zero[2] == 0.0);
  // row one of S: r(1) = 3 against r(0) = 4
  CHECK(t.rows[4][1] == doctest::Approx(20.0 * std::log10(3.0 / 4.0)).epsilon(1e-12));
  for (int k = 1; k <= 3; ++k) {
    CHECK(t.rows[3 + k][1] == doctest::Approx(t.rows[3 - k][1]).epsilon(1e-12));
    CHECK(t.rows[3 + k][2] == doctest::Approx(t.rows[3 - k][2]).epsilon(1e-12));
  }

  REQUIRE(t.metadata.count("psl_db_tx1") == 1);
  CHECK(std::stod(t.metadata.at("psl_db_tx1")) ==
        doctest::Approx(20.0 * std::log10(3.0 / 4.0)).epsilon(1e-9));
  CHECK(t.metadata.count("correlation") == 1);

  auto tc = run_pulse_compression(w, 2, 4, true);
  REQUIRE(tc.columns.size() == 4);
  CHECK(tc.columns[3] == "xcorr_db_tx1_tx2");
  CHECK(tc.rows[3][3] <= -250.0); // orthogonal rows at lag zero hit the floor
}

TEST_CASE("robustness samples never undercut the certified floor") {
  auto cfg = tiny_ec_config(0.3);
  auto t = run_robustness(cfg, 16);
  REQUIRE(t.columns == std::vector<std::string>{"sample", "sinr", "sinr_min",
                                                "sinr_mean", "sinr_worst"});
  REQUIRE(t.rows.size() == 16);

  auto direct = games::design_ec(cfg.scenario, 1.0);
  double mn = t.rows[0][1], mean = 0;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(t.rows[i][0] == double(i));
    CHECK(t.rows[i][1] >= direct.sinr_worst - 1e-6);
    CHECK(t.rows[i][4] == direct.sinr_worst);
    mn = std::min(mn, t.rows[i][1]);
    mean += t.rows[i][1];
  }
  mean /= double(t.rows.size());
  CHECK(t.rows[0][2] == mn);
  CHECK(t.rows[0][3] == doctest::Approx(mean).epsilon(1e-12));

  CHECK(to_csv(run_robustness(cfg, 16)) == to_csv(t));
  CHECK_THROWS_AS((void)run_robustness(cfg, 0), ValidationError);
}

TEST_CASE("robustness with no uncertainty repeats one sample") {
  auto cfg = tiny_ec_config(0.0);
  auto t = run_robustness(cfg, 6);
  for (const auto& row : t.rows)
    CHECK(row[1] == doctest::Approx(t.rows[0][1]).epsilon(1e-12));
  CHECK(t.rows[0][2] == doctest::Approx(t.rows[0][4]).epsilon(1e-9));
}

TEST_CASE("run_design dispatches on the constraint kind") {
  auto ec = tiny_ec_config();
  CHECK(run_design(ec).sinr_worst == games::design_ec(ec.scenario, 1.0).sinr_worst);

  auto cm = tiny_cmsc_config();
  auto got = run_design(cm);
  auto want = games::design_cmsc(cm.scenario, std::get<ConstraintCMSC>(cm.constraint),
                                 cm.algo2);
  CHECK(got.sinr_worst == want.sinr_worst);

  auto sc = tiny_scsc_config();
  auto got_sc = run_design(sc);
  auto want_sc = games::design_scsc(sc.scenario, std::get<ConstraintSCSC>(sc.constraint),
                                    sc.algo3);
  CHECK(got_sc.sinr_worst == want_sc.sinr_worst);
}

TEST_CASE("psd runner reports provenance for a designed waveform") {
  auto cfg = tiny_ec_config();
  auto t = run_psd(cfg);
  REQUIRE(t.rows.size() == 1024);
  CHECK(t.metadata.count("config_hash") == 1);
  CHECK(t.metadata.count("seed") == 1);
  double peak_db = -1e9;
  for (const auto& row : t.rows) peak_db = std::max(peak_db, row[2]);
  CHECK(peak_db == 0.0);
}
