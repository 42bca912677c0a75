#include "wavegame/conic.hpp"
#include "wavegame/eig.hpp"
#include "wavegame/games.hpp"
#include "wavegame/model.hpp"
#include "wavegame/rng.hpp"
#include "wavegame/spectra_proj.hpp"
#include "wavegame/trs.hpp"

#include "games_detail.hpp"

#include <chrono>
#include <cmath>

namespace wg::games {

void Algo2Params::validate() const {
  if (!(beta >= 0)) throw ValidationError("algo2: beta must be nonnegative");
  if (!(eta > 0)) throw ValidationError("algo2: eta must be positive");
  if (!(eps > 0)) throw ValidationError("algo2: eps must be positive");
  if (max_iter < 1) throw ValidationError("algo2: max_iter must be at least 1");
  if (m_trials < 1) throw ValidationError("algo2: m_trials must be at least 1");
}

namespace {

void check_cm_reference(const Scenario& scn, double e_t, double delta, const Waveform& s0) {
  if (!(e_t > 0)) throw ValidationError("cmsc: e_t must be positive");
  if (!(delta > 0) || delta > 2) throw ValidationError("cmsc: delta must lie in (0, 2]");
  if (s0.s.size() != scn.code_dim())
    throw ValidationError("cmsc: reference code length mismatch");
  const double mag = std::sqrt(e_t / scn.code_dim());
  for (int i = 0; i < s0.s.size(); ++i)
    if (std::abs(std::abs(s0.s(i)) - mag) > 1e-6 * mag)
      throw ValidationError("cmsc: reference code must be constant modulus at energy e_t");
}

// Exact cap on trace(M(t) R) over the fixed-diagonal spectrahedron, by weak
// duality of  min (e_t/n) sum_i mu_i  s.t.  Diag(mu) >= M(t). The eigenvalue
// shift makes the dual slack PSD exactly, so the bound survives solver
// tolerance and caps the worst-case value of every feasible code.
double relaxed_value_certificate(const detail::Precomp& pre, const Vec& t, double e_t) {
  const Mat m = pre.m_of_t(t);
  const int n = static_cast<int>(m.rows());
  solvers::ConicProblem p;
  std::vector<std::pair<int, Mat>> terms;
  terms.reserve(n);
  for (int i = 0; i < n; ++i) {
    Mat ei = Mat::Zero(n, n);
    ei(i, i) = 1.0;
    terms.push_back({p.add_var(1.0), ei});
  }
  p.add_lmi(n, Mat(-m), terms);
  auto sol = solvers::solve_conic(p);
  if (sol.status != solvers::ConicStatus::optimal)
    throw SolverError("design_cmsc: relaxed-value certificate did not converge");
  RVec mu(n);
  for (int i = 0; i < n; ++i) mu(i) = sol.values(terms[i].first);
  Mat slack = -m;
  slack.diagonal() += mu.cast<cplx>();
  auto [lam, vecs] = solvers::herm_eig(slack);
  const double shift =
      std::max(0.0, -lam(n - 1)) + 1e-12 * std::max(1.0, m.norm());
  return (e_t / n) * (mu.sum() + n * shift);
}

Mat inner_max(const detail::Precomp& pre, const Vec& t, const Mat& r_s0, double beta,
              double e_t) {
  Mat m = pre.m_of_t(t);
  // A vanishing proximal weight makes the maximizer escape to the boundary of
  // the spectrahedron along M's top eigenspace; the floor keeps the projection
  // target finite without disturbing honestly regularized runs.
  const double beta_eff = std::max(beta, 1e-6 * std::max(1.0, m.norm()));
  const RVec diag = RVec::Constant(r_s0.rows(), e_t / static_cast<double>(r_s0.rows()));
  return solvers::project_spectrahedron(Mat(r_s0 + m / (2 * beta_eff)), diag).R;
}

} // namespace

Mat algo2_inner_max(const Scenario& scn, const GameState2& state, const Mat& r_s0,
                    double beta, double e_t) {
  scn.validate();
  if (!(e_t > 0)) throw ValidationError("algo2_inner_max: e_t must be positive");
  if (!(beta >= 0)) throw ValidationError("algo2_inner_max: beta must be nonnegative");
  if (state.t.size() != scn.tir_len)
    throw ValidationError("algo2_inner_max: state response length mismatch");
  detail::Precomp pre(scn, false);
  return inner_max(pre, state.t, r_s0, beta, e_t);
}

Vec algo2_t_step(const Scenario& scn, const GameState2& state, const Mat& r_s_next,
                 double eta) {
  scn.validate();
  if (!(eta > 0)) throw ValidationError("algo2_t_step: eta must be positive");
  if (state.t.size() != scn.tir_len)
    throw ValidationError("algo2_t_step: state response length mismatch");
  detail::Precomp pre(scn, true);
  Vec grad = 2.0 * (pre.u_of_rs(r_s_next) * state.t);
  return solvers::project_ball(Vec(state.t - eta * grad), scn.t0, scn.radius);
}

std::vector<Waveform> randomize_cm(const Mat& r_s_star, const Waveform& s0, double delta,
                                   double e_t, int m, std::uint64_t seed) {
  const int n = static_cast<int>(s0.s.size());
  if (r_s_star.rows() != n || r_s_star.cols() != n)
    throw ValidationError("randomize_cm: covariance dimension mismatch");
  if (!(delta > 0) || delta > 2) throw ValidationError("randomize_cm: delta must lie in (0, 2]");
  if (m < 1) throw ValidationError("randomize_cm: need at least one draw");

  // Phase-coupling covariance; the Schur product of PSD factors stays PSD, so
  // clipping at zero only sheds rounding noise.
  Mat sigma = r_s_star.cwiseProduct((s0.s.conjugate() * s0.s.transpose()).eval());
  sigma = 0.5 * (sigma + sigma.adjoint());
  auto [lam_raw, vecs] = solvers::herm_eig(sigma);
  const Vec lam = lam_raw.cwiseMax(0.0).cwiseSqrt().cast<cplx>();

  const double phi = std::acos(1 - delta * delta / 2);
  const double mag = std::sqrt(e_t / n);
  Rng rng(seed);
  std::vector<Waveform> out;
  out.reserve(m);
  for (int trial = 0; trial < m; ++trial) {
    Vec g(n);
    for (int i = 0; i < n; ++i) g(i) = rng.cnormal();
    Vec xi = vecs * g.cwiseProduct(lam);
    Vec s(n);
    for (int i = 0; i < n; ++i) {
      const double psi = (detail::arg_two_pi(xi(i)) - M_PI) * phi / (2 * M_PI);
      s(i) = mag * (s0.s(i) / std::abs(s0.s(i))) * std::exp(cplx(0, psi));
    }
    out.push_back(make_waveform(std::move(s)));
  }
  return out;
}

DesignResult design_cmsc(const Scenario& scn, const ConstraintCMSC& c, const Algo2Params& p) {
  scn.validate();
  p.validate();
  check_cm_reference(scn, c.e_t, c.delta, c.s0);
  const auto t_begin = std::chrono::steady_clock::now();
  auto ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_begin)
        .count();
  };

  detail::Precomp pre(scn, true);
  const Mat r_s0 = c.s0.s * c.s0.s.adjoint();

  Mat r_cur = r_s0;
  Vec t_cur = scn.t0;
  // Proximal penalty vanishes at the anchor itself.
  double z_cur = std::real((t_cur.adjoint() * pre.u_of_rs(r_cur) * t_cur)(0));
  Mat r_best = r_cur;
  double zr_best = solvers::min_quad_ball(pre.u_of_rs(r_cur), scn.t0, scn.radius).value;

  DesignResult res;
  res.converged = false;
  res.trace.push_back({0, z_cur, 0.0, false, ms()});
  for (int k = 1; k <= p.max_iter; ++k) {
    Mat r_next = inner_max(pre, t_cur, r_s0, p.beta, c.e_t);
    Mat u_next = pre.u_of_rs(r_next);
    Vec t_next =
        solvers::project_ball(Vec(t_cur - 2.0 * p.eta * (u_next * t_cur)), scn.t0, scn.radius);
    const double z_next = std::real((t_next.adjoint() * u_next * t_next)(0)) -
                          p.beta * (r_next - r_s0).squaredNorm();
    const double gap = std::abs(z_next - z_cur);
    r_cur = r_next;
    t_cur = t_next;
    z_cur = z_next;
    const double zr = solvers::min_quad_ball(u_next, scn.t0, scn.radius).value;
    if (zr > zr_best) {
      zr_best = zr;
      r_best = r_cur;
    }
    res.trace.push_back({k, z_next, gap, true, ms()});
    if (gap <= p.eps) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) res.note = "gradient descent-ascent reached the iteration cap";

  auto cands = randomize_cm(r_best, c.s0, c.delta, c.e_t, p.m_trials, p.seed);
  int best = -1;
  solvers::TrsResult best_trs;
  double best_val = -1;
  for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
    auto trs = worst_case_tir(scn, cands[i].s);
    if (trs.value > best_val) {
      best_val = trs.value;
      best_trs = trs;
      best = i;
    }
  }

  res.s_opt = cands[best];
  res.sinr_worst = best_trs.value;
  res.t_worst = best_trs.t_star;
  res.w_opt = model::optimal_filter(scn, res.s_opt.s, res.t_worst);
  res.relaxed_value = relaxed_value_certificate(pre, t_cur, c.e_t);
  return res;
}

} // namespace wg::games
