#include "wavegame/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wg::solvers {

// Cyclic-by-rows complex Jacobi. Each rotation zeroes one off-diagonal pair; sweeps
// repeat until the off-diagonal Frobenius mass is negligible. Deterministic order.
std::pair<RVec, Mat> herm_eig(const Mat& A_in) {
  const int n = static_cast<int>(A_in.rows());
  if (A_in.cols() != n) throw ValidationError("herm_eig: matrix must be square");
  double scale = std::max(1.0, A_in.norm());
  if ((A_in - A_in.adjoint()).norm() > 1e-10 * scale)
    throw ValidationError("herm_eig: matrix must be Hermitian");

  Mat A = (A_in + A_in.adjoint()) / 2.0;
  Mat V = Mat::Identity(n, n);

  auto off_norm = [&]() {
    double acc = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) acc += std::norm(A(p, q));
    return std::sqrt(2.0 * acc);
  };

  const double tol = 1e-15 * scale;
  for (int sweep = 0; sweep < 60 && off_norm() > tol * n; ++sweep) {
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        cplx apq = A(p, q);
        double mag = std::abs(apq);
        if (mag <= 1e-300) continue;
        // phase-reduce to a real 2x2 rotation
        cplx phase = apq / mag;
        double app = A(p, p).real(), aqq = A(q, q).real();
        double tau = (aqq - app) / (2.0 * mag);
        double tt = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + tt * tt);
        double s = tt * c;
        cplx sp = s * phase; // complex Givens component
        // columns p and q of A and V
        for (int k = 0; k < n; ++k) {
          cplx akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - std::conj(sp) * akq;
          A(k, q) = sp * akp + c * akq;
        }
        // rows p and q
        for (int k = 0; k < n; ++k) {
          cplx apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - sp * aqk;
          A(q, k) = std::conj(sp) * apk + c * aqk;
        }
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        A(p, p) = cplx(A(p, p).real(), 0.0);
        A(q, q) = cplx(A(q, q).real(), 0.0);
        for (int k = 0; k < n; ++k) {
          cplx vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - std::conj(sp) * vkq;
          V(k, q) = sp * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int i, int j) { return A(i, i).real() > A(j, j).real(); });
  RVec lam(n);
  Mat Vs(n, n);
  for (int i = 0; i < n; ++i) {
    lam(i) = A(idx[i], idx[i]).real();
    Vs.col(i) = V.col(idx[i]);
  }
  return {lam, Vs};
}

Vec principal_eigvec(const Mat& A) {
  auto [lam, V] = herm_eig(A);
  Vec v = V.col(0);
  int imax = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
  double mag = std::abs(v(imax));
  if (mag > 0) v *= std::conj(v(imax)) / mag;
  return v;
}

} // namespace wg::solvers
