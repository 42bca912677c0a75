#pragma once

// Internal operator bundle shared by the game drivers; not installed.

#include "wavegame/model.hpp"
#include "wavegame/types.hpp"

#include <cmath>
#include <vector>

namespace wg::games::detail {

// a_op[i] is the i-th delay-tap operator, so G(t) = sum_i t(i) a_op[i] and
// H(s) column i is a_op[i] * s. b_op packs A_i^H R_c^{-1} A_j row-major,
// giving U(R)(i,j) = trace(b_op[i*q+j] R).
struct Precomp {
  std::vector<Mat> a_op;
  Eigen::LLT<Mat> rc_llt;
  std::vector<Mat> b_op;
  int q = 0;

  Precomp(const Scenario& scn, bool with_b) : q(scn.tir_len) {
    rc_llt.compute(scn.noise_cov);
    if (rc_llt.info() != Eigen::Success)
      throw ValidationError("games: noise covariance is not positive definite");
    a_op.reserve(q);
    for (int i = 0; i < q; ++i) {
      Vec e = Vec::Zero(q);
      e(i) = 1.0;
      a_op.push_back(model::op_G(scn, e));
    }
    if (with_b) {
      std::vector<Mat> rc_a(q);
      for (int j = 0; j < q; ++j) rc_a[j] = rc_llt.solve(a_op[j]);
      b_op.resize(static_cast<size_t>(q) * q);
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) b_op[i * q + j] = a_op[i].adjoint() * rc_a[j];
    }
  }

  Mat m_of_t(const Vec& t) const {
    Mat g = Mat::Zero(a_op[0].rows(), a_op[0].cols());
    for (int i = 0; i < q; ++i) g += t(i) * a_op[i];
    Mat m = g.adjoint() * rc_llt.solve(g);
    return Mat(0.5 * (m + m.adjoint()));
  }

  Mat u_of_rs(const Mat& r_s) const {
    Mat u(q, q);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        u(i, j) = b_op[i * q + j].transpose().cwiseProduct(r_s).sum();
    return Mat(0.5 * (u + u.adjoint()));
  }
};

inline double arg_two_pi(cplx z) {
  double a = std::arg(z);
  return a < 0 ? a + 2.0 * M_PI : a;
}

} // namespace wg::games::detail
