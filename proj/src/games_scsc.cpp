#include "wavegame/conic.hpp"
#include "wavegame/eig.hpp"
#include "wavegame/games.hpp"
#include "wavegame/model.hpp"
#include "wavegame/trs.hpp"

#include "games_detail.hpp"

#include <chrono>
#include <cmath>
#include <utility>

namespace wg::games {

void Algo3Params::validate() const {
  if (!(eps > 0)) throw ValidationError("algo3: eps must be positive");
  if (max_iter < 1) throw ValidationError("algo3: max_iter must be at least 1");
}

namespace {

// e_i is checked only where the budget is actually enforced; feasible_init
// exists precisely to discover its floor.
void check_scsc(const Scenario& scn, const ConstraintSCSC& c, bool with_budget) {
  if (!(c.e_t > 0)) throw ValidationError("scsc: e_t must be positive");
  if (!(c.delta > 0)) throw ValidationError("scsc: delta must be positive");
  if (c.s0.s.size() != scn.code_dim())
    throw ValidationError("scsc: reference code length mismatch");
  if (c.bands.empty()) throw ValidationError("scsc: need at least one stop band");
  if (with_budget && !(c.e_i > 0)) throw ValidationError("scsc: e_i must be positive");
}

// rows whose squared norms sum to s^H R_I s, from the thin eigenfactor of R_I
std::vector<solvers::LinExpr> stopband_rows(const Mat& r_i, int sb) {
  const int n = static_cast<int>(r_i.rows());
  auto [vals, vecs] = solvers::herm_eig(r_i);
  const double lam_max = std::max(0.0, vals.maxCoeff());
  std::vector<solvers::LinExpr> rows;
  for (int e = 0; e < n; ++e) {
    if (vals(e) <= 1e-12 * std::max(1.0, lam_max)) continue;
    const Vec col = std::sqrt(vals(e)) * vecs.col(e);
    solvers::LinExpr re, im;
    for (int k = 0; k < n; ++k) {
      const double a = col(k).real();
      const double b = -col(k).imag(); // conj(col) multiplies s
      if (a != 0 || b != 0) {
        re.terms.push_back({sb + 2 * k, a});
        re.terms.push_back({sb + 2 * k + 1, -b});
        im.terms.push_back({sb + 2 * k, b});
        im.terms.push_back({sb + 2 * k + 1, a});
      }
    }
    rows.push_back(std::move(re));
    rows.push_back(std::move(im));
  }
  return rows;
}

void add_code_constraints(solvers::ConicProblem& p, int sb, const Scenario& scn,
                          const ConstraintSCSC& c, const Mat& r_i, bool with_stopband) {
  const int n = scn.code_dim();
  std::vector<solvers::LinExpr> energy;
  energy.reserve(2 * n);
  for (int i = 0; i < 2 * n; ++i) energy.push_back({{{sb + i, 1.0}}, 0.0});
  p.add_quad_le(energy, {{}, c.e_t});

  const double bound = c.delta * std::sqrt(c.e_t / n);
  for (int i = 0; i < n; ++i) {
    std::vector<solvers::LinExpr> soc;
    soc.push_back({{}, bound});
    soc.push_back({{{sb + 2 * i, 1.0}}, -c.s0.s(i).real()});
    soc.push_back({{{sb + 2 * i + 1, 1.0}}, -c.s0.s(i).imag()});
    p.add_soc(soc);
  }

  // The admissible stopband energy can sit many orders below the code energy;
  // scaling the rows by 1/sqrt(e_i) presents the same constraint to the
  // interior-point method at unit size.
  if (with_stopband) p.add_quad_le(stopband_rows(Mat(r_i / c.e_i), sb), {{}, 1.0});
}

double stopband_energy_of(const Mat& r_i, const Vec& s) {
  return std::real((s.adjoint() * r_i * s)(0));
}

} // namespace

double minorizer_value(const Scenario& scn, const Vec& s, const Vec& s_l) {
  scn.validate();
  if (s.size() != scn.code_dim() || s_l.size() != scn.code_dim())
    throw ValidationError("minorizer_value: code length mismatch");
  Eigen::LLT<Mat> llt(scn.noise_cov);
  if (llt.info() != Eigen::Success)
    throw ValidationError("minorizer_value: noise covariance is not positive definite");
  Mat h_l = model::op_H(scn, s_l);
  Mat g_l = llt.solve(h_l);
  Mat cross = g_l.adjoint() * model::op_H(scn, s);
  Mat u = cross + cross.adjoint() - g_l.adjoint() * h_l;
  u = 0.5 * (u + u.adjoint());
  return solvers::trs_dual(u, scn.t0, scn.radius).second.value;
}

Waveform mm_step(const Scenario& scn, const ConstraintSCSC& c, const Vec& s_l) {
  scn.validate();
  check_scsc(scn, c, true);
  if (s_l.size() != scn.code_dim()) throw ValidationError("mm_step: code length mismatch");

  // The step is exactly equivariant in the energy budget: s = sqrt(e_t) s_hat
  // maps the unit-budget problem onto the requested one and scales the
  // surrogate by e_t. Solving at unit scale keeps the interior-point data
  // well conditioned for large budgets.
  const double scale = std::sqrt(c.e_t);
  ConstraintSCSC cn{1.0, c.delta, make_waveform(Vec(c.s0.s / scale)), c.bands,
                    c.e_i / c.e_t};
  const Vec sl_n = s_l / scale;

  detail::Precomp pre(scn, false);
  const int n = scn.code_dim();
  const int q = scn.tir_len;
  const Mat r_i = model::spectral_matrix(c.bands, scn.code_len, scn.n_tx);

  solvers::ConicProblem p;
  const int sb = p.add_complex_vars(n);
  const int lam = p.add_var(0.0);
  const int gam = p.add_var(-1.0); // maximize the surrogate epigraph
  p.add_lp({{{lam, 1.0}}, 0.0});
  add_code_constraints(p, sb, scn, cn, r_i, true);

  // Surrogate worst-case value as a one-block LMI: the top-left holds
  // K(s) + K(s)^H - W_l, linear in the code through c_pq = A_q^H R_c^{-1} h_p.
  Mat h_l = model::op_H(scn, sl_n);
  Mat g_l = pre.rc_llt.solve(h_l);
  Mat w_l = h_l.adjoint() * g_l;
  w_l = 0.5 * (w_l + w_l.adjoint());

  std::vector<Mat> coef(static_cast<size_t>(q) * q);
  for (int pp = 0; pp < q; ++pp)
    for (int qq = 0; qq < q; ++qq) coef[pp * q + qq] = pre.a_op[qq].adjoint() * g_l.col(pp);

  Mat f0 = Mat::Zero(q + 1, q + 1);
  f0.topLeftCorner(q, q) = -w_l;
  Mat flam = Mat::Zero(q + 1, q + 1);
  flam.topLeftCorner(q, q).setIdentity();
  flam.block(0, q, q, 1) = scn.t0;
  flam.block(q, 0, 1, q) = scn.t0.adjoint();
  flam(q, q) = scn.t0.squaredNorm() - scn.radius * scn.radius;
  Mat fgam = Mat::Zero(q + 1, q + 1);
  fgam(q, q) = -1.0;

  std::vector<std::pair<int, Mat>> terms;
  terms.reserve(2 * n + 2);
  for (int k = 0; k < n; ++k) {
    Mat dre = Mat::Zero(q + 1, q + 1);
    Mat dim = Mat::Zero(q + 1, q + 1);
    for (int pp = 0; pp < q; ++pp)
      for (int qq = 0; qq < q; ++qq) {
        const cplx ck = std::conj(coef[pp * q + qq](k));
        dre(pp, qq) += ck;
        dre(qq, pp) += std::conj(ck);
        dim(pp, qq) += cplx(0, 1) * ck;
        dim(qq, pp) += std::conj(cplx(0, 1) * ck);
      }
    terms.push_back({sb + 2 * k, dre});
    terms.push_back({sb + 2 * k + 1, dim});
  }
  terms.push_back({lam, flam});
  terms.push_back({gam, fgam});
  p.add_lmi(q + 1, f0, terms);

  auto sol = solvers::solve_conic(p);
  if (sol.status == solvers::ConicStatus::infeasible)
    throw ValidationError("mm_step: constraint set is empty; raise e_i or loosen similarity");
  if (sol.status != solvers::ConicStatus::optimal) {
    // stalled runs are nearly always a starved spectral budget; measure the
    // floor exactly before blaming the solver
    if (feasible_init(scn, c).stopband_energy > c.e_i)
      throw ValidationError("mm_step: e_i is below the feasible stopband floor");
    throw SolverError("mm_step: interior-point solver did not converge (kkt " +
                      std::to_string(sol.kkt_residual) + ", gap " +
                      std::to_string(sol.rel_gap) + ", iters " +
                      std::to_string(sol.iterations) + ")");
  }

  Vec s(n);
  for (int k = 0; k < n; ++k) s(k) = scale * sol.complex_value(sb + 2 * k);
  return make_waveform(std::move(s));
}

FeasibleInit feasible_init(const Scenario& scn, const ConstraintSCSC& c) {
  scn.validate();
  check_scsc(scn, c, false);
  const int n = scn.code_dim();
  const Mat r_i = model::spectral_matrix(c.bands, scn.code_len, scn.n_tx);

  // Same unit-budget normalization as mm_step; the stopband objective scales
  // by e_t, so the minimizer maps back exactly.
  const double scale = std::sqrt(c.e_t);
  ConstraintSCSC cn{1.0, c.delta, make_waveform(Vec(c.s0.s / scale)), c.bands, 0.0};

  solvers::ConicProblem p;
  const int sb = p.add_complex_vars(n);
  const int w = p.add_var(1.0); // epigraph of the stopband energy
  add_code_constraints(p, sb, scn, cn, r_i, false);
  p.add_quad_le(stopband_rows(r_i, sb), {{{w, 1.0}}, 0.0});

  auto sol = solvers::solve_conic(p);
  if (sol.status != solvers::ConicStatus::optimal)
    throw SolverError("feasible_init: interior-point solver did not converge");

  Vec s(n);
  for (int k = 0; k < n; ++k) s(k) = scale * sol.complex_value(sb + 2 * k);
  FeasibleInit out;
  out.w = make_waveform(std::move(s));
  out.stopband_energy = stopband_energy_of(r_i, out.w.s);
  out.kkt_residual = sol.kkt_residual;
  return out;
}

DesignResult design_scsc(const Scenario& scn, const ConstraintSCSC& c, const Algo3Params& p) {
  scn.validate();
  p.validate();
  check_scsc(scn, c, true);
  const auto t_begin = std::chrono::steady_clock::now();
  auto ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_begin)
        .count();
  };
  const Mat r_i = model::spectral_matrix(c.bands, scn.code_len, scn.n_tx);

  Waveform s_cur;
  if (p.init_waveform) {
    const Waveform& w0 = *p.init_waveform;
    if (w0.s.size() != scn.code_dim())
      throw ValidationError("design_scsc: initial code length mismatch");
    if (w0.s.squaredNorm() > c.e_t * (1 + 1e-9))
      throw ValidationError("design_scsc: initial code exceeds the energy budget");
    const double bound = c.delta * std::sqrt(c.e_t / scn.code_dim());
    for (int i = 0; i < w0.s.size(); ++i)
      if (std::abs(w0.s(i) - c.s0.s(i)) > bound * (1 + 1e-9) + 1e-12)
        throw ValidationError("design_scsc: initial code violates the similarity bound");
    if (stopband_energy_of(r_i, w0.s) > c.e_i * (1 + 1e-9))
      throw ValidationError("design_scsc: initial code violates the spectral budget");
    s_cur = w0;
  } else {
    auto fi = feasible_init(scn, c);
    if (c.e_i < fi.stopband_energy * (1 - 1e-7))
      throw ValidationError(
          "design_scsc: e_i is below the smallest stopband energy the energy and "
          "similarity constraints admit");
    s_cur = std::move(fi.w);
  }

  DesignResult res;
  res.converged = false;
  double z_prev = worst_case_tir(scn, s_cur.s).value;
  res.trace.push_back({0, z_prev, 0.0, false, ms()});
  for (int l = 1; l <= p.max_iter; ++l) {
    Waveform s_new = mm_step(scn, c, s_cur.s);
    const double z_new = minorizer_value(scn, s_new.s, s_cur.s);
    if (z_new < z_prev) {
      // the exact surrogate cannot drop below the touching value, so a dip is
      // solver noise; keep the incumbent
      res.converged = true;
      res.note = "surrogate stalled at solver precision";
      break;
    }
    const double inc = z_new - z_prev;
    s_cur = std::move(s_new);
    z_prev = z_new;
    res.trace.push_back({l, z_new, inc, true, ms()});
    if (inc <= p.eps) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) res.note = "minorize-maximize reached the iteration cap";

  auto trs = worst_case_tir(scn, s_cur.s);
  res.s_opt = std::move(s_cur);
  res.sinr_worst = trs.value;
  res.t_worst = trs.t_star;
  res.w_opt = model::optimal_filter(scn, res.s_opt.s, res.t_worst);
  return res;
}

} // namespace wg::games
