#include "wavegame/trs.hpp"

#include "wavegame/conic.hpp"
#include "wavegame/eig.hpp"
#include "wavegame/rng.hpp"

#include <algorithm>
#include <cmath>

namespace wg::solvers {

namespace {

// secular machinery in the eigenbasis of U: t(l) = V diag(l/(lam_i+l)) V^H t0,
// phi(l) = ||t(l) - t0|| is nonincreasing on l > max(0, -lam_min)
struct Secular {
  RVec lam; // descending
  Mat V;
  Vec u; // V^H t0

  Vec coords(double l) const {
    Vec w(u.size());
    for (int i = 0; i < u.size(); ++i) w(i) = u(i) * (l / (lam(i) + l));
    return w;
  }
  double phi(double l) const {
    double acc = 0;
    for (int i = 0; i < u.size(); ++i) {
      const double ratio = lam(i) / (lam(i) + l);
      acc += std::norm(u(i)) * ratio * ratio;
    }
    return std::sqrt(acc);
  }
  TrsResult result_at(double l) const {
    const Vec w = coords(l);
    TrsResult res;
    res.t_star = V * w;
    res.value = 0;
    for (int i = 0; i < u.size(); ++i) res.value += lam(i) * std::norm(w(i));
    res.multiplier = l;
    return res;
  }
};

// exact ball minimum of the quadratic described by sec; lam may be indefinite
TrsResult solve_secular(const Secular& sec, const Vec& t0, double r) {
  const int q = static_cast<int>(sec.lam.size());
  const double lam_min = sec.lam(q - 1);
  const double lam_adm = std::max(0.0, -lam_min);
  const double delta = std::max(1e-12, 1e-10 * lam_adm);

  if (sec.phi(lam_adm + delta) >= r) {
    // boundary solution: bisect phi(l) = r on the admissible interval
    double lo = lam_adm + delta;
    double hi = std::max(1.0, 2.0 * lo);
    int guard = 0;
    while (sec.phi(hi) > r && ++guard < 500) hi *= 2.0;
    for (int it = 0; it < 300 && hi - lo > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (sec.phi(mid) >= r ? lo : hi) = mid;
    }
    return sec.result_at(0.5 * (lo + hi));
  }

  if (lam_adm <= 1e-14 * std::max(1.0, std::abs(sec.lam(0)))) {
    // PSD with the constrained minimum interior; t(delta) already blends the
    // null-space components of t0
    TrsResult res = sec.result_at(delta);
    res.multiplier = 0;
    return res;
  }

  // hard case: t0 has no component on the critical eigenspace; pseudo-solve
  // (U + lam_adm I) t = lam_adm t0 and extend along the critical eigenvector
  const double crit_tol = std::max(10.0 * delta, 1e-8 * lam_adm);
  Vec w = Vec::Zero(q);
  for (int i = 0; i < q; ++i) {
    const double den = sec.lam(i) + lam_adm;
    if (den > crit_tol) w(i) = sec.u(i) * (lam_adm / den);
  }
  const Vec t_base = sec.V * w;
  const Vec d = t_base - t0;
  const Vec v = sec.V.col(q - 1);
  const double b = (v.adjoint() * d)(0).real();
  const double zeta = -b + std::sqrt(std::max(0.0, b * b - (d.squaredNorm() - r * r)));
  TrsResult res;
  res.t_star = t_base + zeta * v;
  const Vec wf = sec.V.adjoint() * res.t_star;
  res.value = 0;
  for (int i = 0; i < q; ++i) res.value += sec.lam(i) * std::norm(wf(i));
  res.multiplier = lam_adm;
  return res;
}

Secular decompose(const Mat& U, const Vec& t0) {
  Secular sec;
  auto [lam, V] = herm_eig(U);
  sec.lam = std::move(lam);
  sec.V = std::move(V);
  sec.u = sec.V.adjoint() * t0;
  return sec;
}

} // namespace

TrsResult min_quad_ball(const Mat& U, const Vec& t0, double r) {
  if (r < 0) throw ValidationError("min_quad_ball: negative radius");
  if (U.rows() != t0.size()) throw ValidationError("min_quad_ball: dimension mismatch");
  Secular sec = decompose(U, t0);
  const double scale = std::max(1.0, std::abs(sec.lam(0)));
  if (sec.lam(sec.lam.size() - 1) < -1e-9 * scale)
    throw ValidationError("min_quad_ball: matrix is not positive semidefinite");
  sec.lam = sec.lam.cwiseMax(0.0);

  if (r == 0.0) {
    TrsResult res;
    res.t_star = t0;
    res.value = (t0.adjoint() * U * t0)(0).real();
    res.multiplier = 0;
    return res;
  }
  if (t0.norm() <= r) {
    TrsResult res;
    res.t_star = Vec::Zero(t0.size());
    res.value = 0;
    res.multiplier = 0;
    return res;
  }
  return solve_secular(sec, t0, r);
}

std::pair<double, TrsResult> trs_dual(const Mat& U, const Vec& t0, double r) {
  if (r < 0) throw ValidationError("trs_dual: negative radius");
  if (U.rows() != t0.size()) throw ValidationError("trs_dual: dimension mismatch");
  const int q = static_cast<int>(t0.size());

  ConicProblem p;
  const int lam = p.add_var(0.0);
  const int gam = p.add_var(-1.0); // maximize gamma
  {
    LinExpr nonneg;
    nonneg.terms = {{lam, 1.0}};
    p.add_lp(nonneg);
  }
  Mat F0 = Mat::Zero(q + 1, q + 1);
  F0.topLeftCorner(q, q) = U;
  Mat Flam = Mat::Zero(q + 1, q + 1);
  Flam.topLeftCorner(q, q) = Mat::Identity(q, q);
  Flam.block(0, q, q, 1) = t0;
  Flam.block(q, 0, 1, q) = t0.adjoint();
  Flam(q, q) = t0.squaredNorm() - r * r;
  Mat Fgam = Mat::Zero(q + 1, q + 1);
  Fgam(q, q) = -1.0;
  p.add_lmi(q + 1, F0, {{lam, Flam}, {gam, Fgam}});

  const ConicSolution sol = solve_conic(p);
  if (sol.status != ConicStatus::optimal)
    throw SolverError("trs_dual: interior-point solver did not converge");
  const double dual_value = sol.values(gam);

  // primal recovery: machine-precision KKT point, seeded independent of the
  // SDP multiplier so the ball feasibility invariant holds exactly
  TrsResult res;
  if (r == 0.0) {
    res.t_star = t0;
    res.value = (t0.adjoint() * U * t0)(0).real();
    res.multiplier = std::max(0.0, sol.values(lam));
  } else {
    const Secular sec = decompose(U, t0);
    if (sec.lam(q - 1) >= 0 && t0.norm() <= r) {
      res.t_star = Vec::Zero(q);
      res.value = 0;
      res.multiplier = 0;
    } else {
      res = solve_secular(sec, t0, r);
    }
  }
  return {dual_value, res};
}

Vec project_ball(const Vec& t, const Vec& t0, double r) {
  if (r < 0) throw ValidationError("project_ball: negative radius");
  const Vec d = t - t0;
  const double nd = d.norm();
  if (nd <= r) return t;
  return t0 + (r / nd) * d;
}

std::vector<Vec> sample_ball(const Vec& t0, double r, int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample_ball: need at least one sample");
  if (r < 0) throw ValidationError("sample_ball: negative radius");
  const int q = static_cast<int>(t0.size());
  Rng rng(seed);
  std::vector<Vec> out;
  out.reserve(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    Vec dir(q);
    for (int i = 0; i < q; ++i) dir(i) = rng.cnormal();
    const double nd = dir.norm();
    const double radius = r * std::pow(rng.uniform(), 1.0 / (2.0 * q));
    out.push_back(nd > 0 ? Vec(t0 + (radius / nd) * dir) : t0);
  }
  return out;
}

} // namespace wg::solvers
