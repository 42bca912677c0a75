#include "doctest.h"

#include "wavegame/eig.hpp"
#include "wavegame/rng.hpp"
#include "wavegame/spectra_proj.hpp"
#include "wavegame/types.hpp"

#include "test_util.hpp"

#include <algorithm>
#include <cmath>

using namespace wg;
using namespace wg::solvers;

namespace {

Mat random_hermitian(Rng& rng, int n, double scale = 1.0) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = scale * rng.cnormal();
  return Mat(0.5 * (a + a.adjoint()));
}

// Exact member of {R >= 0, diag(R) = c}: random PD matrix rescaled by a
// congruence with a positive diagonal, which pins the diagonal at c.
Mat random_feasible(Rng& rng, const RVec& c) {
  const int n = static_cast<int>(c.size());
  Mat b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = rng.cnormal();
  Mat a = b * b.adjoint() + 1e-6 * Mat::Identity(n, n);
  RVec d = (c.array() / a.diagonal().real().array()).sqrt();
  return Mat(d.asDiagonal() * a * d.asDiagonal());
}

Mat psd_part(const Mat& a) {
  auto [lam, v] = herm_eig(a);
  RVec clipped = lam.cwiseMax(0.0);
  Mat p = v * clipped.asDiagonal() * v.adjoint();
  return Mat(0.5 * (p + p.adjoint()));
}

double min_eig(const Mat& a) {
  auto [lam, v] = herm_eig(a);
  return lam(lam.size() - 1);
}

// Dykstra's alternating projections between the PSD cone and the affine set
// {diag = c}. Independent of the Newton path; linear convergence is enough at
// the small sizes it is used for.
Mat dykstra(const Mat& c_mat, const RVec& c, int iters) {
  const int n = static_cast<int>(c.size());
  Mat x = c_mat;
  Mat p = Mat::Zero(n, n);
  Mat q = Mat::Zero(n, n);
  Mat y = x;
  for (int it = 0; it < iters; ++it) {
    y = psd_part(x + p);
    p = x + p - y;
    Mat z = y + q;
    for (int i = 0; i < n; ++i) z(i, i) = c(i);
    q = y + q - z;
    x = z;
  }
  return y;
}

} // namespace

TEST_CASE("spectra projection keeps feasible points fixed") {
  Rng rng(401);
  for (int n : {3, 8}) {
    RVec c = RVec::Constant(n, 0.75);
    for (int trial = 0; trial < 4; ++trial) {
      Mat f = random_feasible(rng, c);
      auto res = project_spectrahedron(f, c);
      CHECK((res.R - f).norm() <= 1e-8 * std::max(1.0, f.norm()));
      CHECK(res.mu.cwiseAbs().maxCoeff() <= 1e-6);
    }
  }
}

TEST_CASE("spectra projection of a diagonal matrix pins the diagonal") {
  // Off-diagonal entries of feasible points only add distance, so the
  // projection of any diagonal matrix is Diag(c) regardless of the signs.
  RVec d(4);
  d << 2.0, -3.0, 0.5, -0.1;
  RVec c(4);
  c << 1.0, 0.5, 2.0, 0.25;
  auto res = project_spectrahedron(Mat(d.asDiagonal()), c);
  CHECK((res.R - Mat(c.cast<cplx>().asDiagonal())).norm() <= 1e-8);
}

TEST_CASE("spectra projection 2x2 reduces to a disk projection") {
  // With unit diagonal pinned, feasibility is |R(0,1)| <= 1 and the nearest
  // point clips the off-diagonal entry to the unit disk.
  RVec c = RVec::Ones(2);
  const cplx j(0, 1);
  for (cplx z : {cplx(2.0, 0.0), 1.5 * std::exp(j * 0.7), cplx(0.3, -0.2)}) {
    Mat cm(2, 2);
    cm << 1.0, z, std::conj(z), 1.0;
    auto res = project_spectrahedron(cm, c);
    cplx want = std::abs(z) <= 1.0 ? z : z / std::abs(z);
    CHECK(std::abs(res.R(0, 1) - want) <= 1e-8);
    CHECK(std::abs(res.R(0, 0) - 1.0) <= 1e-9);
    CHECK(std::abs(res.R(1, 1) - 1.0) <= 1e-9);
  }
}

TEST_CASE("spectra projection satisfies the KKT certificate") {
  Rng rng(402);
  for (int n : {2, 3, 6, 16, 32}) {
    RVec c(n);
    for (int i = 0; i < n; ++i) c(i) = 0.2 + rng.uniform();
    Mat cm = random_hermitian(rng, n, 2.0);
    auto res = project_spectrahedron(cm, c);
    const double scale = std::max(1.0, cm.norm());

    // Primal feasibility.
    CHECK(min_eig(res.R) >= -1e-8 * scale);
    CHECK((res.R.diagonal().real() - c).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, c.maxCoeff()));
    CHECK(res.R.diagonal().imag().cwiseAbs().maxCoeff() <= 1e-10 * scale);

    // Stationarity: R - C - Diag(mu) must be PSD and orthogonal to R.
    Mat s = res.R - cm - Mat(res.mu.cast<cplx>().asDiagonal());
    CHECK(min_eig(s) >= -1e-7 * scale);
    const double comp = std::abs((s.adjoint() * res.R).trace().real());
    CHECK(comp <= 1e-6 * std::max(1.0, s.norm() * res.R.norm()));
  }
}

TEST_CASE("spectra projection matches the alternating projection oracle") {
  Rng rng(403);
  for (int n : {4, 8}) {
    RVec c(n);
    for (int i = 0; i < n; ++i) c(i) = 0.5 + 0.5 * rng.uniform();
    Mat cm = random_hermitian(rng, n, 1.5);
    auto res = project_spectrahedron(cm, c);
    Mat oracle = dykstra(cm, c, 6000);
    CHECK((res.R - oracle).norm() <= 5e-5 * std::max(1.0, cm.norm()));
    // The Newton answer can only be closer to C than the truncated oracle run.
    CHECK((res.R - cm).norm() <= (oracle - cm).norm() + 1e-6);
  }
}

TEST_CASE("spectra projection is never beaten by feasible samples") {
  Rng rng(404);
  const int n = 8;
  RVec c = RVec::Constant(n, 1.0 / n);
  Mat cm = random_hermitian(rng, n, 1.0);
  auto res = project_spectrahedron(cm, c);
  const double dist = (res.R - cm).norm();
  for (int trial = 0; trial < 200; ++trial) {
    Mat f = random_feasible(rng, c);
    CHECK(dist <= (f - cm).norm() + 1e-9);
  }
}

TEST_CASE("spectra projection is nonexpansive") {
  Rng rng(405);
  const int n = 6;
  RVec c = RVec::Constant(n, 0.4);
  for (int trial = 0; trial < 30; ++trial) {
    Mat a = random_hermitian(rng, n, 1.0);
    Mat b = random_hermitian(rng, n, 1.0);
    Mat pa = project_spectrahedron(a, c).R;
    Mat pb = project_spectrahedron(b, c).R;
    CHECK((pa - pb).norm() <= (a - b).norm() + 1e-9);
  }
}

TEST_CASE("spectra projection is idempotent") {
  Rng rng(406);
  const int n = 10;
  RVec c = RVec::Constant(n, 0.3);
  Mat cm = random_hermitian(rng, n, 3.0);
  Mat first = project_spectrahedron(cm, c).R;
  Mat second = project_spectrahedron(first, c).R;
  CHECK((second - first).norm() <= 1e-8 * std::max(1.0, first.norm()));
}

TEST_CASE("spectra projection solves the proximal subproblem") {
  // max_R Re<M, R> - beta * ||R - R0||_F^2 over the spectrahedron is the
  // projection of R0 + M / (2 beta); the returned point must dominate random
  // feasible candidates in that objective.
  Rng rng(407);
  const int n = 6;
  RVec c = RVec::Constant(n, 0.5);
  Mat m = random_hermitian(rng, n, 1.0);
  Mat r0 = random_feasible(rng, c);
  const double beta = 0.05;
  auto obj = [&](const Mat& r) {
    return (m.adjoint() * r).trace().real() - beta * (r - r0).squaredNorm();
  };
  Mat star = project_spectrahedron(Mat(r0 + m / (2.0 * beta)), c).R;
  for (int trial = 0; trial < 100; ++trial) {
    Mat f = random_feasible(rng, c);
    CHECK(obj(star) >= obj(f) - 1e-8);
  }
}

TEST_CASE("spectra projection survives badly scaled input") {
  Rng rng(408);
  const int n = 12;
  RVec c = RVec::Constant(n, 40.0);
  Mat cm = random_hermitian(rng, n, 1e5);
  auto res = project_spectrahedron(cm, c);
  CHECK((res.R.diagonal().real() - c).cwiseAbs().maxCoeff() <= 1e-7 * c.maxCoeff());
  CHECK(min_eig(res.R) >= -1e-8 * cm.norm());
}

TEST_CASE("spectra projection validates input") {
  RVec c = RVec::Ones(3);
  Mat bad(3, 3);
  bad.setZero();
  bad(0, 1) = cplx(1.0, 0.0);
  bad(1, 0) = cplx(0.5, 0.0);
  CHECK_THROWS_AS((void)project_spectrahedron(bad, c), ValidationError);

  Mat ok = Mat::Identity(3, 3);
  RVec neg(3);
  neg << 1.0, -0.5, 1.0;
  CHECK_THROWS_AS((void)project_spectrahedron(ok, neg), ValidationError);
  RVec zero = RVec::Zero(3);
  CHECK_THROWS_AS((void)project_spectrahedron(ok, zero), ValidationError);
  CHECK_THROWS_AS((void)project_spectrahedron(ok, RVec::Ones(2)), ValidationError);
  CHECK_THROWS_AS((void)project_spectrahedron(Mat::Identity(2, 3), RVec::Ones(2)),
                  ValidationError);
}
