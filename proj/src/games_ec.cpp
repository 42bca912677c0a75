#include "wavegame/conic.hpp"
#include "wavegame/eig.hpp"
#include "wavegame/games.hpp"
#include "wavegame/model.hpp"
#include "wavegame/rng.hpp"

#include "games_detail.hpp"

#include <chrono>
#include <cmath>

namespace wg::games {

solvers::TrsResult worst_case_tir(const Scenario& scn, const Vec& s) {
  scn.validate();
  if (s.size() != scn.code_dim())
    throw ValidationError("worst_case_tir: code length mismatch");
  Mat h = model::op_H(scn, s);
  Mat u = h.adjoint() * Eigen::LLT<Mat>(scn.noise_cov).solve(h);
  u = 0.5 * (u + u.adjoint());
  return solvers::min_quad_ball(u, scn.t0, scn.radius);
}

DesignResult design_ec(const Scenario& scn, double e_t) {
  scn.validate();
  if (!(e_t > 0)) throw ValidationError("design_ec: e_t must be positive");
  const auto t_begin = std::chrono::steady_clock::now();
  detail::Precomp pre(scn, false);

  Vec t_play = scn.t0;
  double rel_gap = 0;
  if (scn.radius > 0) {
    // The transmit energy only scales the objective, so the worst response is
    // solved once at unit cost and the code is scaled afterwards.
    solvers::ConicProblem prob;
    const int tb = prob.add_complex_vars(scn.tir_len);
    const int mu = prob.add_var(1.0);
    const int nd = scn.code_dim();
    const int rd = scn.rx_dim();
    const int dim = nd + rd;
    const cplx j(0, 1);

    Mat f0 = Mat::Zero(dim, dim);
    f0.bottomRightCorner(rd, rd) = scn.noise_cov;
    std::vector<std::pair<int, Mat>> terms;
    Mat fmu = Mat::Zero(dim, dim);
    fmu.topLeftCorner(nd, nd).setIdentity();
    terms.push_back({mu, fmu});
    for (int i = 0; i < scn.tir_len; ++i) {
      Mat fr = Mat::Zero(dim, dim);
      fr.bottomLeftCorner(rd, nd) = pre.a_op[i];
      fr.topRightCorner(nd, rd) = pre.a_op[i].adjoint();
      terms.push_back({tb + 2 * i, fr});
      Mat fi = Mat::Zero(dim, dim);
      fi.bottomLeftCorner(rd, nd) = j * pre.a_op[i];
      fi.topRightCorner(nd, rd) = (j * pre.a_op[i]).adjoint();
      terms.push_back({tb + 2 * i + 1, fi});
    }
    prob.add_lmi(dim, f0, terms);

    std::vector<solvers::LinExpr> ball;
    ball.push_back({{}, scn.radius});
    for (int i = 0; i < scn.tir_len; ++i) {
      ball.push_back({{{tb + 2 * i, 1.0}}, -scn.t0(i).real()});
      ball.push_back({{{tb + 2 * i + 1, 1.0}}, -scn.t0(i).imag()});
    }
    prob.add_soc(ball);

    auto sol = solvers::solve_conic(prob);
    if (sol.status != solvers::ConicStatus::optimal)
      throw SolverError("design_ec: interior-point solver did not converge");
    for (int i = 0; i < scn.tir_len; ++i) t_play(i) = sol.complex_value(tb + 2 * i);
    rel_gap = sol.rel_gap;
  }

  Vec unit = solvers::principal_eigvec(pre.m_of_t(t_play));
  auto worst = worst_case_tir(scn, unit);

  DesignResult res;
  res.s_opt = make_waveform(Vec(std::sqrt(e_t) * unit));
  res.t_worst = worst.t_star;
  res.sinr_worst = e_t * worst.value;
  res.w_opt = model::optimal_filter(scn, res.s_opt.s, res.t_worst);
  IterRecord rec;
  rec.iter = 0;
  rec.objective = res.sinr_worst;
  rec.gap = rel_gap;
  rec.has_gap = scn.radius > 0;
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          t_begin)
                    .count();
  res.trace.push_back(rec);
  return res;
}

NashReport verify_nash_ec(const Scenario& scn, double e_t, const DesignResult& result,
                          int n_trials, std::uint64_t seed) {
  scn.validate();
  if (!(e_t > 0)) throw ValidationError("verify_nash_ec: e_t must be positive");
  if (n_trials < 1) throw ValidationError("verify_nash_ec: need at least one trial");

  NashReport rep;
  rep.n_trials = n_trials;
  const double recheck = worst_case_tir(scn, result.s_opt.s).value;
  rep.target_rel_err =
      std::abs(recheck - result.sinr_worst) / std::max(1e-12, std::abs(result.sinr_worst));

  Rng rng(seed);
  for (int m = 0; m < n_trials; ++m) {
    Vec g(scn.code_dim());
    for (int i = 0; i < g.size(); ++i) g(i) = rng.cnormal();
    Vec s = std::sqrt(e_t) / g.norm() * g;
    const double excess = worst_case_tir(scn, s).value - result.sinr_worst;
    if (excess > rep.max_violation) rep.max_violation = excess;
    if (excess > 1e-6) ++rep.violations;
  }
  return rep;
}

} // namespace wg::games
