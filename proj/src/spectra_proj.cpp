#include "wavegame/spectra_proj.hpp"

#include "wavegame/eig.hpp"

#include <algorithm>
#include <cmath>

namespace wg::solvers {

namespace {

struct DualPoint {
  RVec lam;     // eigenvalues of C + Diag(mu), descending
  Mat v;        // matching eigenvectors
  Mat psd;      // positive part, the primal candidate
  RVec g;       // diag(psd) - c
  double theta; // dual objective c . mu - 0.5 ||psd||_F^2
};

DualPoint evaluate(const Mat& c_mat, const RVec& c, const RVec& mu) {
  Mat x = c_mat;
  x.diagonal() += mu.cast<cplx>();
  DualPoint p;
  std::tie(p.lam, p.v) = herm_eig(x);
  RVec pos = p.lam.cwiseMax(0.0);
  p.psd = p.v * pos.asDiagonal() * p.v.adjoint();
  p.psd = 0.5 * (p.psd + p.psd.adjoint());
  p.g = p.psd.diagonal().real() - c;
  p.theta = c.dot(mu) - 0.5 * p.psd.squaredNorm();
  return p;
}

// Generalized Jacobian of mu -> diag(psd_part(C + Diag(mu))). Entries of the
// divided-difference matrix: (lam_a+ - lam_b+)/(lam_a - lam_b), with the sign
// indicator on (numerically) equal pairs.
RMat dual_jacobian(const DualPoint& p) {
  const int n = static_cast<int>(p.lam.size());
  const double scale = std::max(1.0, std::abs(p.lam(0)));
  RMat omega(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double la = p.lam(a);
      const double lb = p.lam(b);
      if (std::abs(la - lb) > 1e-12 * scale)
        omega(a, b) = (std::max(la, 0.0) - std::max(lb, 0.0)) / (la - lb);
      else
        omega(a, b) = la > 0.0 ? 1.0 : 0.0;
    }
  }
  RMat jac(n, n);
  for (int l = 0; l < n; ++l) {
    Vec u = p.v.row(l).adjoint();
    Mat ml = omega.cast<cplx>().cwiseProduct(u * u.adjoint());
    jac.col(l) = (p.v * ml * p.v.adjoint()).diagonal().real();
  }
  return RMat(0.5 * (jac + jac.transpose()));
}

} // namespace

SpectraProj project_spectrahedron(const Mat& C, const RVec& c) {
  const int n = static_cast<int>(c.size());
  if (C.rows() != C.cols() || C.rows() != n || n < 1)
    throw ValidationError("project_spectrahedron: dimension mismatch");
  for (int i = 0; i < n; ++i)
    if (!(c(i) > 0.0))
      throw ValidationError("project_spectrahedron: target diagonal must be positive");
  const double cnorm = std::max(1.0, C.cwiseAbs().maxCoeff());
  if ((C - C.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * cnorm)
    throw ValidationError("project_spectrahedron: matrix is not Hermitian");

  const Mat cs = 0.5 * (C + C.adjoint());
  const double tol =
      std::max(1e-9 * std::max(1.0, c.maxCoeff()), 1e-13 * cs.norm());

  RVec mu = RVec::Zero(n);
  DualPoint cur = evaluate(cs, c, mu);
  int iter = 0;
  for (; iter < 200; ++iter) {
    if (cur.g.cwiseAbs().maxCoeff() <= tol) break;

    RMat jac = dual_jacobian(cur);
    jac.diagonal().array() += 1e-10;
    RVec dir = Eigen::LDLT<RMat>(jac).solve(-cur.g);
    if (!dir.allFinite()) dir = -cur.g;

    // Armijo ascent on the concave dual; the gradient is -g, so the Newton
    // direction has positive slope whenever the regularized solve succeeded.
    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const double slope = -cur.g.dot(dir);
      if (slope > 0.0) {
        double alpha = 1.0;
        for (int ls = 0; ls < 40; ++ls) {
          DualPoint trial = evaluate(cs, c, RVec(mu + alpha * dir));
          if (trial.theta >= cur.theta + 1e-4 * alpha * slope) {
            mu += alpha * dir;
            cur = trial;
            accepted = true;
            break;
          }
          alpha *= 0.5;
        }
      }
      if (!accepted) dir = -cur.g;
    }
    if (!accepted) break;
  }

  const double residual = cur.g.cwiseAbs().maxCoeff();
  if (residual > 1e-7 * std::max(1.0, c.maxCoeff()))
    throw SolverError("project_spectrahedron: dual Newton did not converge");

  SpectraProj out;
  out.R = cur.psd;
  out.mu = mu;
  out.iterations = iter;
  out.residual = residual;
  return out;
}

} // namespace wg::solvers
