#include "wavegame/conic.hpp"
#include "wavegame/conic_detail.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace wg::solvers {

namespace detail {

namespace {
constexpr double kInf = 1e100;

RMat chol_lower_safe(RMat S) {
  Eigen::LLT<RMat> llt(S);
  if (llt.info() == Eigen::Success) return RMat(llt.matrixL());
  // iterate drifted to the cone boundary: floor the spectrum
  Eigen::SelfAdjointEigenSolver<RMat> es(S);
  RVec ev = es.eigenvalues();
  const double floor = 1e-14 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (int i = 0; i < ev.size(); ++i) ev(i) = std::max(ev(i), floor);
  S = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return RMat(Eigen::LLT<RMat>(S).matrixL());
}
} // namespace

RVec svec(const RMat& M) {
  const int d = static_cast<int>(M.rows());
  RVec v(svec_len(d));
  int k = 0;
  for (int j = 0; j < d; ++j) {
    v(k++) = M(j, j);
    for (int i = j + 1; i < d; ++i) v(k++) = M(i, j) * M_SQRT2;
  }
  return v;
}

RMat smat(const RVec& v, int d) {
  RMat M(d, d);
  int k = 0;
  for (int j = 0; j < d; ++j) {
    M(j, j) = v(k++);
    for (int i = j + 1; i < d; ++i) {
      const double x = v(k++) * M_SQRT1_2;
      M(i, j) = x;
      M(j, i) = x;
    }
  }
  return M;
}

RMat embed_hermitian(const Mat& C) {
  const int d = static_cast<int>(C.rows());
  RMat E(2 * d, 2 * d);
  const RMat X = C.real();
  const RMat Y = C.imag();
  E.topLeftCorner(d, d) = X;
  E.bottomRightCorner(d, d) = X;
  E.topRightCorner(d, d) = -Y;
  E.bottomLeftCorner(d, d) = Y;
  return E;
}

void ConeLayout::finalize() {
  int off = lp;
  soc_off.clear();
  sdp_off.clear();
  for (int q : soc) {
    soc_off.push_back(off);
    off += q;
  }
  for (int d : sdp) {
    sdp_off.push_back(off);
    off += svec_len(d);
  }
  total = off;
  degree = lp + 2.0 * static_cast<double>(soc.size());
  for (int d : sdp) degree += d;
}

RVec cone_identity(const ConeLayout& K) {
  RVec e = RVec::Zero(K.total);
  e.head(K.lp).setOnes();
  for (size_t i = 0; i < K.soc.size(); ++i) e(K.soc_off[i]) = 1.0;
  for (size_t i = 0; i < K.sdp.size(); ++i) {
    int k = K.sdp_off[i];
    for (int j = 0; j < K.sdp[i]; ++j) {
      e(k) = 1.0;
      k += K.sdp[i] - j;
    }
  }
  return e;
}

double max_step(const ConeLayout& K, const RVec& u, const RVec& du) {
  double alpha = kInf;
  for (int i = 0; i < K.lp; ++i)
    if (du(i) < 0) alpha = std::min(alpha, -u(i) / du(i));
  for (size_t b = 0; b < K.soc.size(); ++b) {
    const int o = K.soc_off[b], q = K.soc[b];
    const double A = du(o) * du(o) - du.segment(o + 1, q - 1).squaredNorm();
    const double B = u(o) * du(o) - u.segment(o + 1, q - 1).dot(du.segment(o + 1, q - 1));
    const double C = std::max(0.0, u(o) * u(o) - u.segment(o + 1, q - 1).squaredNorm());
    const double disc = B * B - A * C;
    if (disc < 0) continue;
    const double denom = -B + std::sqrt(disc);
    if (denom <= 0) continue;
    alpha = std::min(alpha, C / denom);
  }
  for (size_t b = 0; b < K.sdp.size(); ++b) {
    const int d = K.sdp[b];
    const RMat L = chol_lower_safe(smat(u.segment(K.sdp_off[b], svec_len(d)), d));
    RMat D = smat(du.segment(K.sdp_off[b], svec_len(d)), d);
    RMat M = L.triangularView<Eigen::Lower>().solve(D);
    M = L.triangularView<Eigen::Lower>().solve(RMat(M.transpose()));
    Eigen::SelfAdjointEigenSolver<RMat> es(M, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

double membership_violation(const ConeLayout& K, const RVec& u) {
  double viol = 0.0;
  if (K.lp > 0) viol = std::max(viol, -u.head(K.lp).minCoeff());
  for (size_t b = 0; b < K.soc.size(); ++b) {
    const int o = K.soc_off[b], q = K.soc[b];
    viol = std::max(viol, u.segment(o + 1, q - 1).norm() - u(o));
  }
  for (size_t b = 0; b < K.sdp.size(); ++b) {
    const int d = K.sdp[b];
    Eigen::SelfAdjointEigenSolver<RMat> es(smat(u.segment(K.sdp_off[b], svec_len(d)), d),
                                           Eigen::EigenvaluesOnly);
    viol = std::max(viol, -es.eigenvalues().minCoeff());
  }
  return viol;
}

RVec NTScaling::apply_W(const RVec& u) const {
  RVec r(K->total);
  r.head(K->lp) = lp_w.cwiseProduct(u.head(K->lp));
  for (size_t b = 0; b < K->soc.size(); ++b) {
    const int o = K->soc_off[b], q = K->soc[b];
    const auto& S = soc[b];
    const double dot = S.v.dot(u.segment(o, q));
    r(o) = S.eta * (2.0 * dot * S.v(0) - u(o));
    r.segment(o + 1, q - 1) =
        S.eta * (2.0 * dot * S.v.tail(q - 1) + u.segment(o + 1, q - 1));
  }
  for (size_t b = 0; b < K->sdp.size(); ++b) {
    const int d = K->sdp[b], o = K->sdp_off[b];
    const RMat M = smat(u.segment(o, svec_len(d)), d);
    r.segment(o, svec_len(d)) = svec(RMat(sdp[b].R.transpose() * M * sdp[b].R));
  }
  return r;
}

RVec NTScaling::apply_WT(const RVec& u) const {
  RVec r(K->total);
  r.head(K->lp) = lp_w.cwiseProduct(u.head(K->lp));
  for (size_t b = 0; b < K->soc.size(); ++b) {
    const int o = K->soc_off[b], q = K->soc[b];
    const auto& S = soc[b];
    const double dot = S.v.dot(u.segment(o, q));
    r(o) = S.eta * (2.0 * dot * S.v(0) - u(o));
    r.segment(o + 1, q - 1) =
        S.eta * (2.0 * dot * S.v.tail(q - 1) + u.segment(o + 1, q - 1));
  }
  for (size_t b = 0; b < K->sdp.size(); ++b) {
    const int d = K->sdp[b], o = K->sdp_off[b];
    const RMat M = smat(u.segment(o, svec_len(d)), d);
    r.segment(o, svec_len(d)) = svec(RMat(sdp[b].R * M * sdp[b].R.transpose()));
  }
  return r;
}

RVec NTScaling::apply_Winv(const RVec& u) const {
  RVec r(K->total);
  r.head(K->lp) = u.head(K->lp).cwiseQuotient(lp_w);
  for (size_t b = 0; b < K->soc.size(); ++b) {
    const int o = K->soc_off[b], q = K->soc[b];
    const auto& S = soc[b];
    // W^{-1} = eta^{-1} (2 (Jv)(Jv)^T - J)
    const double dot = S.v(0) * u(o) - S.v.tail(q - 1).dot(u.segment(o + 1, q - 1));
    r(o) = (2.0 * dot * S.v(0) - u(o)) / S.eta;
    r.segment(o + 1, q - 1) =
        (-2.0 * dot * S.v.tail(q - 1) + u.segment(o + 1, q - 1)) / S.eta;
  }
  for (size_t b = 0; b < K->sdp.size(); ++b) {
    const int d = K->sdp[b], o = K->sdp_off[b];
    const RMat M = smat(u.segment(o, svec_len(d)), d);
    r.segment(o, svec_len(d)) = svec(RMat(sdp[b].Rinv.transpose() * M * sdp[b].Rinv));
  }
  return r;
}

RVec NTScaling::apply_WinvT(const RVec& u) const {
  RVec r(K->total);
  r.head(K->lp) = u.head(K->lp).cwiseQuotient(lp_w);
  for (size_t b = 0; b < K->soc.size(); ++b) {
    const int o = K->soc_off[b], q = K->soc[b];
    const auto& S = soc[b];
    const double dot = S.v(0) * u(o) - S.v.tail(q - 1).dot(u.segment(o + 1, q - 1));
    r(o) = (2.0 * dot * S.v(0) - u(o)) / S.eta;
    r.segment(o + 1, q - 1) =
        (-2.0 * dot * S.v.tail(q - 1) + u.segment(o + 1, q - 1)) / S.eta;
  }
  for (size_t b = 0; b < K->sdp.size(); ++b) {
    const int d = K->sdp[b], o = K->sdp_off[b];
    const RMat M = smat(u.segment(o, svec_len(d)), d);
    r.segment(o, svec_len(d)) = svec(RMat(sdp[b].Rinv * M * sdp[b].Rinv.transpose()));
  }
  return r;
}

NTScaling nt_scaling(const ConeLayout& K, const RVec& s, const RVec& z) {
  NTScaling W;
  W.K = &K;
  W.lambda.resize(K.total);
  W.lp_w = (s.head(K.lp).cwiseQuotient(z.head(K.lp))).cwiseSqrt();
  W.lambda.head(K.lp) = (s.head(K.lp).cwiseProduct(z.head(K.lp))).cwiseSqrt();
  for (size_t b = 0; b < K.soc.size(); ++b) {
    const int o = K.soc_off[b], q = K.soc[b];
    RVec sb = s.segment(o, q), zb = z.segment(o, q);
    const double a = std::sqrt(std::max(1e-300, sb(0) * sb(0) - sb.tail(q - 1).squaredNorm()));
    const double c = std::sqrt(std::max(1e-300, zb(0) * zb(0) - zb.tail(q - 1).squaredNorm()));
    sb /= a;
    zb /= c;
    const double gamma = std::sqrt((1.0 + sb.dot(zb)) / 2.0);
    RVec wbar = sb;
    wbar(0) += zb(0);
    wbar.tail(q - 1) -= zb.tail(q - 1);
    wbar /= 2.0 * gamma;
    NTScaling::Soc sc;
    sc.v = wbar;
    sc.v(0) += 1.0;
    sc.v /= std::sqrt(2.0 * (wbar(0) + 1.0));
    sc.eta = std::sqrt(a / c);
    W.soc.push_back(std::move(sc));
  }
  for (size_t b = 0; b < K.sdp.size(); ++b) {
    const int d = K.sdp[b], o = K.sdp_off[b];
    const RMat Ls = chol_lower_safe(smat(s.segment(o, svec_len(d)), d));
    const RMat Lz = chol_lower_safe(smat(z.segment(o, svec_len(d)), d));
    Eigen::BDCSVD<RMat> svd(RMat(Lz.transpose() * Ls),
                            Eigen::ComputeFullU | Eigen::ComputeFullV);
    NTScaling::Sdp sd;
    sd.sigma = svd.singularValues();
    RVec si = sd.sigma.cwiseMax(1e-150).cwiseSqrt();
    sd.R = Ls * svd.matrixV() * si.cwiseInverse().asDiagonal();
    sd.Rinv = si.asDiagonal() * svd.matrixV().transpose() *
              Ls.triangularView<Eigen::Lower>().solve(RMat::Identity(d, d));
    W.sdp.push_back(std::move(sd));
  }
  // lambda = W z (SOC/SDP blocks); SDP blocks are diagonal by construction
  for (size_t b = 0; b < K.soc.size(); ++b) {
    const int o = K.soc_off[b], q = K.soc[b];
    const auto& S = W.soc[b];
    const double dot = S.v.dot(z.segment(o, q));
    W.lambda(o) = S.eta * (2.0 * dot * S.v(0) - z(o));
    W.lambda.segment(o + 1, q - 1) =
        S.eta * (2.0 * dot * S.v.tail(q - 1) + z.segment(o + 1, q - 1));
  }
  for (size_t b = 0; b < K.sdp.size(); ++b) {
    const int d = K.sdp[b], o = K.sdp_off[b];
    RVec lam = RVec::Zero(svec_len(d));
    int k = 0;
    for (int j = 0; j < d; ++j) {
      lam(k) = W.sdp[b].sigma(j);
      k += d - j;
    }
    W.lambda.segment(o, svec_len(d)) = lam;
  }
  return W;
}

RVec jordan_mul(const ConeLayout& K, const RVec& a, const RVec& b) {
  RVec r(K.total);
  r.head(K.lp) = a.head(K.lp).cwiseProduct(b.head(K.lp));
  for (size_t i = 0; i < K.soc.size(); ++i) {
    const int o = K.soc_off[i], q = K.soc[i];
    r(o) = a.segment(o, q).dot(b.segment(o, q));
    r.segment(o + 1, q - 1) =
        a(o) * b.segment(o + 1, q - 1) + b(o) * a.segment(o + 1, q - 1);
  }
  for (size_t i = 0; i < K.sdp.size(); ++i) {
    const int d = K.sdp[i], o = K.sdp_off[i];
    const RMat A = smat(a.segment(o, svec_len(d)), d);
    const RMat B = smat(b.segment(o, svec_len(d)), d);
    r.segment(o, svec_len(d)) = svec(RMat(0.5 * (A * B + B * A)));
  }
  return r;
}

RVec jordan_div_lambda(const NTScaling& W, const RVec& d) {
  const ConeLayout& K = *W.K;
  RVec r(K.total);
  r.head(K.lp) = d.head(K.lp).cwiseQuotient(W.lambda.head(K.lp));
  for (size_t i = 0; i < K.soc.size(); ++i) {
    const int o = K.soc_off[i], q = K.soc[i];
    const RVec lam = W.lambda.segment(o, q);
    const double det = lam(0) * lam(0) - lam.tail(q - 1).squaredNorm();
    const double x0 = (lam(0) * d(o) - lam.tail(q - 1).dot(d.segment(o + 1, q - 1))) / det;
    r(o) = x0;
    r.segment(o + 1, q - 1) = (d.segment(o + 1, q - 1) - x0 * lam.tail(q - 1)) / lam(0);
  }
  for (size_t i = 0; i < K.sdp.size(); ++i) {
    const int dim = K.sdp[i], o = K.sdp_off[i];
    const RVec& sig = W.sdp[i].sigma;
    RMat D = smat(d.segment(o, svec_len(dim)), dim);
    for (int c = 0; c < dim; ++c)
      for (int rr = 0; rr < dim; ++rr) D(rr, c) *= 2.0 / (sig(rr) + sig(c));
    r.segment(o, svec_len(dim)) = svec(D);
  }
  return r;
}

} // namespace detail

// ---------------------------------------------------------------------------
// builder

namespace {
void check_index(int idx, int n, const char* what) {
  if (idx < 0 || idx >= n) throw ValidationError(std::string(what) + ": variable index out of range");
}

void check_hermitian(const Mat& F, const char* what) {
  if (F.rows() != F.cols()) throw ValidationError(std::string(what) + ": matrix not square");
  const double scale = std::max(1.0, F.cwiseAbs().maxCoeff());
  if ((F - F.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw ValidationError(std::string(what) + ": matrix not Hermitian");
}
} // namespace

int ConicProblem::add_var(double cost) {
  cost_.push_back(cost);
  return static_cast<int>(cost_.size()) - 1;
}

int ConicProblem::add_complex_vars(int n) {
  const int base = static_cast<int>(cost_.size());
  cost_.resize(cost_.size() + 2 * static_cast<size_t>(n), 0.0);
  return base;
}

void ConicProblem::add_cost(int var, double coeff) {
  check_index(var, num_vars(), "add_cost");
  cost_[static_cast<size_t>(var)] += coeff;
}

int ConicProblem::add_hermitian_var(int d) {
  if (d < 1) throw ValidationError("add_hermitian_var: dimension must be positive");
  HVar hv;
  hv.dim = d;
  hv.base = num_vars();
  cost_.resize(cost_.size() + static_cast<size_t>(d) * d, 0.0);
  hvars_.push_back(hv);
  return static_cast<int>(hvars_.size()) - 1;
}

// layout per hvar: d diagonal entries, then (re, im) pairs column-major over i < j
int ConicProblem::hvar_diag(int h, int i) const { return hvars_[static_cast<size_t>(h)].base + i; }

namespace {
int pair_offset(int i, int j) {
  // pairs (i, j), i < j, ordered by j then i
  return j * (j - 1) / 2 + i;
}
} // namespace

int ConicProblem::hvar_re(int h, int i, int j) const {
  const auto& hv = hvars_[static_cast<size_t>(h)];
  return hv.base + hv.dim + 2 * pair_offset(i, j);
}

int ConicProblem::hvar_im(int h, int i, int j) const {
  const auto& hv = hvars_[static_cast<size_t>(h)];
  return hv.base + hv.dim + 2 * pair_offset(i, j) + 1;
}

void ConicProblem::add_cost_trace(int h, const Mat& C) {
  check_hermitian(C, "add_cost_trace");
  const auto& hv = hvars_[static_cast<size_t>(h)];
  if (C.rows() != hv.dim) throw ValidationError("add_cost_trace: dimension mismatch");
  for (int i = 0; i < hv.dim; ++i) add_cost(hvar_diag(h, i), C(i, i).real());
  for (int j = 1; j < hv.dim; ++j)
    for (int i = 0; i < j; ++i) {
      add_cost(hvar_re(h, i, j), 2.0 * C(i, j).real());
      add_cost(hvar_im(h, i, j), 2.0 * C(i, j).imag());
    }
}

void ConicProblem::add_psd(int h) {
  const auto& hv = hvars_[static_cast<size_t>(h)];
  const int d = hv.dim;
  std::vector<std::pair<int, Mat>> terms;
  for (int i = 0; i < d; ++i) {
    Mat E = Mat::Zero(d, d);
    E(i, i) = 1.0;
    terms.emplace_back(hvar_diag(h, i), E);
  }
  for (int j = 1; j < d; ++j)
    for (int i = 0; i < j; ++i) {
      Mat Er = Mat::Zero(d, d);
      Er(i, j) = 1.0;
      Er(j, i) = 1.0;
      terms.emplace_back(hvar_re(h, i, j), Er);
      Mat Ei = Mat::Zero(d, d);
      Ei(i, j) = cplx(0.0, 1.0);
      Ei(j, i) = cplx(0.0, -1.0);
      terms.emplace_back(hvar_im(h, i, j), Ei);
    }
  add_lmi(d, Mat::Zero(d, d), terms);
}

Mat ConicProblem::hermitian_value(const ConicSolution& sol, int h) const {
  const auto& hv = hvars_[static_cast<size_t>(h)];
  Mat X(hv.dim, hv.dim);
  for (int i = 0; i < hv.dim; ++i) X(i, i) = sol.values(hvar_diag(h, i));
  for (int j = 1; j < hv.dim; ++j)
    for (int i = 0; i < j; ++i) {
      const cplx v(sol.values(hvar_re(h, i, j)), sol.values(hvar_im(h, i, j)));
      X(i, j) = v;
      X(j, i) = std::conj(v);
    }
  return X;
}

void ConicProblem::add_eq(const std::vector<std::pair<int, double>>& terms, double rhs) {
  for (const auto& t : terms) check_index(t.first, num_vars(), "add_eq");
  eqs_.emplace_back(terms, rhs);
}

void ConicProblem::add_lp(const LinExpr& expr) {
  for (const auto& t : expr.terms) check_index(t.first, num_vars(), "add_lp");
  lp_rows_.push_back(expr);
}

void ConicProblem::add_soc(const std::vector<LinExpr>& rows) {
  if (rows.size() < 2) throw ValidationError("add_soc: cone needs at least two rows");
  for (const auto& r : rows)
    for (const auto& t : r.terms) check_index(t.first, num_vars(), "add_soc");
  soc_blocks_.push_back(rows);
}

void ConicProblem::add_quad_le(const std::vector<LinExpr>& rows, const LinExpr& bound) {
  // sum ||rows||^2 <= bound  <=>  || (rows, (bound-1)/2) || <= (bound+1)/2
  LinExpr plus, minus;
  for (const auto& t : bound.terms) {
    plus.terms.emplace_back(t.first, 0.5 * t.second);
    minus.terms.emplace_back(t.first, 0.5 * t.second);
  }
  plus.constant = 0.5 * bound.constant + 0.5;
  minus.constant = 0.5 * bound.constant - 0.5;
  std::vector<LinExpr> all;
  all.push_back(plus);
  for (const auto& r : rows) all.push_back(r);
  all.push_back(minus);
  add_soc(all);
}

void ConicProblem::add_lmi(int dim, const Mat& F0, const std::vector<std::pair<int, Mat>>& terms) {
  if (F0.rows() != dim || F0.cols() != dim) throw ValidationError("add_lmi: F0 dimension mismatch");
  check_hermitian(F0, "add_lmi");
  for (const auto& t : terms) {
    check_index(t.first, num_vars(), "add_lmi");
    if (t.second.rows() != dim || t.second.cols() != dim)
      throw ValidationError("add_lmi: coefficient dimension mismatch");
    check_hermitian(t.second, "add_lmi");
  }
  lmi_blocks_.push_back({dim, F0, terms});
}

// ---------------------------------------------------------------------------
// homogeneous self-dual interior point method

namespace {

using detail::ConeLayout;
using detail::NTScaling;

struct ProblemData {
  RVec c, h, b;
  RMat G, A;
  ConeLayout K;
};

struct KktSolver {
  const ProblemData* pd;
  RMat Gs;       // W^{-T} applied to the columns of G
  RMat Kred;     // [H A^T; A 0]
  Eigen::FullPivLU<RMat> lu;

  void factor(const ProblemData& p, const NTScaling& W) {
    pd = &p;
    const int n = static_cast<int>(p.c.size());
    const int np = static_cast<int>(p.b.size());
    Gs.resize(p.G.rows(), n);
    for (int j = 0; j < n; ++j) Gs.col(j) = W.apply_WinvT(p.G.col(j));
    Kred.setZero(n + np, n + np);
    Kred.topLeftCorner(n, n).noalias() = Gs.transpose() * Gs;
    if (np > 0) {
      Kred.topRightCorner(n, np) = p.A.transpose();
      Kred.bottomLeftCorner(np, n) = p.A;
    }
    lu.compute(Kred);
  }

  void solve_once(const NTScaling& W, const RVec& bx, const RVec& by, const RVec& bz, RVec& ux,
                  RVec& uy, RVec& uz) const {
    const int n = static_cast<int>(pd->c.size());
    const int np = static_cast<int>(pd->b.size());
    RVec rhs(n + np);
    rhs.head(n) = bx + Gs.transpose() * W.apply_WinvT(bz);
    rhs.tail(np) = by;
    RVec sol = lu.solve(rhs);
    sol += lu.solve(RVec(rhs - Kred * sol));
    ux = sol.head(n);
    uy = sol.tail(np);
    uz = W.apply_Winv(W.apply_WinvT(RVec(pd->G * ux - bz)));
  }

  // M(ux,uy,uz) = (bx, by, bz) with M = (A^T uy + G^T uz, A ux, G ux - W^T W uz),
  // refined against the full system: the reduced solve squares the conditioning of W
  void solve(const NTScaling& W, const RVec& bx, const RVec& by, const RVec& bz, RVec& ux,
             RVec& uy, RVec& uz) const {
    solve_once(W, bx, by, bz, ux, uy, uz);
    const double scale =
        1.0 + bx.norm() + by.norm() + bz.norm() + ux.norm() + uy.norm() + uz.norm();
    for (int round = 0; round < 3; ++round) {
      const RVec r1 = bx - (pd->A.transpose() * uy + pd->G.transpose() * uz);
      const RVec r2 = by - pd->A * ux;
      const RVec r3 = bz - (pd->G * ux - W.apply_WT(W.apply_W(uz)));
      if (r1.norm() + r2.norm() + r3.norm() <= 1e-14 * scale) break;
      RVec dx, dy, dz;
      solve_once(W, r1, r2, r3, dx, dy, dz);
      ux += dx;
      uy += dy;
      uz += dz;
    }
  }
};

// least eigenvalue across blocks, for the initial centering shift
double min_cone_eig(const ConeLayout& K, const RVec& u) {
  double mn = 1e100;
  if (K.lp > 0) mn = std::min(mn, u.head(K.lp).minCoeff());
  for (size_t b = 0; b < K.soc.size(); ++b) {
    const int o = K.soc_off[b], q = K.soc[b];
    mn = std::min(mn, u(o) - u.segment(o + 1, q - 1).norm());
  }
  for (size_t b = 0; b < K.sdp.size(); ++b) {
    const int d = K.sdp[b];
    Eigen::SelfAdjointEigenSolver<RMat> es(
        detail::smat(u.segment(K.sdp_off[b], detail::svec_len(d)), d), Eigen::EigenvaluesOnly);
    mn = std::min(mn, es.eigenvalues().minCoeff());
  }
  return mn;
}

} // namespace

ConicSolution solve_conic(const ConicProblem& prob, const ConicOptions& opt) {
  // assemble problem data
  ProblemData pd;
  const int n = prob.num_vars();
  if (n == 0) throw ValidationError("solve_conic: problem has no variables");
  if (n > 1024) throw ValidationError("solve_conic: problem too large for a dense solver");
  pd.c = Eigen::Map<const RVec>(prob.cost_.data(), n);

  pd.K.lp = static_cast<int>(prob.lp_rows_.size());
  for (const auto& blk : prob.soc_blocks_) pd.K.soc.push_back(static_cast<int>(blk.size()));
  for (const auto& blk : prob.lmi_blocks_) pd.K.sdp.push_back(2 * blk.dim);
  pd.K.finalize();
  const int m = pd.K.total;
  if (m == 0) throw ValidationError("solve_conic: problem has no cone constraints");

  pd.G = RMat::Zero(m, n);
  pd.h = RVec::Zero(m);
  {
    int row = 0;
    for (const auto& e : prob.lp_rows_) {
      pd.h(row) = e.constant;
      for (const auto& t : e.terms) pd.G(row, t.first) -= t.second;
      ++row;
    }
    for (const auto& blk : prob.soc_blocks_)
      for (const auto& e : blk) {
        pd.h(row) = e.constant;
        for (const auto& t : e.terms) pd.G(row, t.first) -= t.second;
        ++row;
      }
    for (size_t b = 0; b < prob.lmi_blocks_.size(); ++b) {
      const auto& blk = prob.lmi_blocks_[b];
      const int o = pd.K.sdp_off[b];
      const int len = detail::svec_len(2 * blk.dim);
      pd.h.segment(o, len) = detail::svec(detail::embed_hermitian(blk.F0));
      for (const auto& t : blk.terms)
        pd.G.col(t.first).segment(o, len) -= detail::svec(detail::embed_hermitian(t.second));
    }
  }
  const int np = static_cast<int>(prob.eqs_.size());
  pd.A = RMat::Zero(np, n);
  pd.b = RVec::Zero(np);
  for (int r = 0; r < np; ++r) {
    for (const auto& t : prob.eqs_[static_cast<size_t>(r)].first) pd.A(r, t.first) += t.second;
    pd.b(r) = prob.eqs_[static_cast<size_t>(r)].second;
  }

  const ConeLayout& K = pd.K;
  const RVec e = detail::cone_identity(K);

  // identity scaling for the initial least-squares centering
  NTScaling Wid;
  Wid.K = &K;
  Wid.lp_w = RVec::Ones(K.lp);
  for (int q : K.soc) {
    NTScaling::Soc sc;
    sc.eta = 1.0;
    sc.v = RVec::Zero(q);
    sc.v(0) = 1.0;
    Wid.soc.push_back(std::move(sc));
  }
  for (int d : K.sdp) {
    NTScaling::Sdp sd;
    sd.R = RMat::Identity(d, d);
    sd.Rinv = RMat::Identity(d, d);
    sd.sigma = RVec::Ones(d);
    Wid.sdp.push_back(std::move(sd));
  }

  KktSolver kkt;
  kkt.factor(pd, Wid);

  RVec x, y, z, s, tmp;
  {
    RVec ux, uy, uz;
    // primal: minimize ||h - Gx|| subject to Ax = b
    kkt.solve(Wid, RVec(pd.G.transpose() * pd.h), pd.b, RVec::Zero(m), ux, uy, uz);
    x = ux;
    s = pd.h - pd.G * x;
    double me = min_cone_eig(K, s);
    if (me <= 1e-8 * std::max(1.0, s.norm())) s += (1.0 - me) * e;
    // dual: minimize ||z|| subject to A^T y + G^T z = -c
    kkt.solve(Wid, RVec(-pd.c), RVec::Zero(np), RVec::Zero(m), ux, uy, uz);
    y = uy;
    z = pd.G * ux;
    me = min_cone_eig(K, z);
    if (me <= 1e-8 * std::max(1.0, z.norm())) z += (1.0 - me) * e;
  }
  double tau = 1.0, kappa = 1.0;

  const double norm_b = std::max(1.0, pd.b.norm());
  const double norm_h = std::max(1.0, pd.h.norm());
  const double norm_c = std::max(1.0, pd.c.norm());

  ConicSolution sol;
  double best_merit = std::numeric_limits<double>::infinity();
  int stall = 0;

  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    const RVec xh = x / tau;
    const RVec sh = s / tau;
    const RVec yh = y / tau;
    const RVec zh = z / tau;
    const double pcost = pd.c.dot(xh);
    const double gap = s.dot(z) / (tau * tau);
    const double relgap = gap / std::max(1.0, std::abs(pcost));
    double pres = (pd.G * xh + sh - pd.h).norm() / norm_h;
    if (np > 0) pres = std::max(pres, (pd.A * xh - pd.b).norm() / norm_b);
    const double dres = (pd.A.transpose() * yh + pd.G.transpose() * zh + pd.c).norm() / norm_c;

    // keep the best iterate: the endgame can lose a near-optimal point to the
    // ill-conditioning of the scaled KKT system
    const double merit = std::max({pres, dres, relgap});
    if (merit < best_merit) {
      best_merit = merit;
      sol.values = xh;
      sol.objective_value = pcost;
      sol.kkt_residual = std::max(pres, dres);
      sol.rel_gap = relgap;
    }
    sol.iterations = iter;

#ifdef WG_CONIC_TRACE
    fprintf(stderr, "it=%3d pres=%9.3e dres=%9.3e gap=%9.3e tau=%9.3e kappa=%9.3e\n", iter, pres,
            dres, gap, tau, kappa);
#endif
    if (pres <= opt.feastol && dres <= opt.feastol && relgap <= opt.gaptol) {
      sol.values = xh;
      sol.objective_value = pcost;
      sol.kkt_residual = std::max(pres, dres);
      sol.rel_gap = relgap;
      sol.status = ConicStatus::optimal;
      return sol;
    }

    // infeasibility certificates
    const double hzby = pd.b.dot(y) + pd.h.dot(z);
    if (hzby < 0) {
      const double cert = (pd.A.transpose() * y + pd.G.transpose() * z).norm() / (-hzby) / norm_c;
      if (cert <= opt.feastol) {
        sol.status = ConicStatus::infeasible;
        sol.kkt_residual = cert;
        return sol;
      }
    }
    const double cx = pd.c.dot(x);
    if (cx < 0) {
      const double scale = -cx;
      const double r1 = np > 0 ? (pd.A * x).norm() / scale / norm_b : 0.0;
      const double r2 = (pd.G * x + s).norm() / scale / norm_h;
      if (std::max(r1, r2) <= opt.feastol) {
        sol.status = ConicStatus::infeasible; // dual infeasible: primal unbounded below
        sol.kkt_residual = std::max(r1, r2);
        return sol;
      }
    }

    if (iter == opt.max_iter) break;
    // a NaN iterate never recovers, and a residual exploding orders of
    // magnitude past the best seen is the endgame diverging
    if (!std::isfinite(merit + tau + kappa)) break;
    if (merit > 1e4 * best_merit && best_merit < 1e-4) break;

    const NTScaling W = detail::nt_scaling(K, s, z);
    const double mu = (s.dot(z) + tau * kappa) / (K.degree + 1.0);

    kkt.factor(pd, W);

    // residuals
    const RVec rx = pd.A.transpose() * y + pd.G.transpose() * z + pd.c * tau;
    const RVec ry = pd.A * x - pd.b * tau;
    const RVec rz = pd.G * x + s - pd.h * tau;
    const double rt = kappa + pd.c.dot(x) + pd.b.dot(y) + pd.h.dot(z);

    RVec u1x, u1y, u1z;
    kkt.solve(W, RVec(-pd.c), pd.b, pd.h, u1x, u1y, u1z);
    const double chb_u1 = pd.c.dot(u1x) + pd.b.dot(u1y) + pd.h.dot(u1z);

    auto direction = [&](double eta, const RVec& ds, double dk, RVec& dx, RVec& dy, RVec& dz,
                         RVec& dsv, double& dtau, double& dkap) {
      const RVec v = detail::jordan_div_lambda(W, ds);
      RVec u2x, u2y, u2z;
      kkt.solve(W, RVec(-eta * rx), RVec(-eta * ry), RVec(-eta * rz - W.apply_WT(v)), u2x, u2y,
                u2z);
      const double chb_u2 = pd.c.dot(u2x) + pd.b.dot(u2y) + pd.h.dot(u2z);
      dtau = (eta * rt + dk / tau + chb_u2) / (kappa / tau - chb_u1);
      dx = u2x + dtau * u1x;
      dy = u2y + dtau * u1y;
      dz = u2z + dtau * u1z;
      dsv = W.apply_WT(RVec(v - W.apply_W(dz)));
      dkap = (dk - kappa * dtau) / tau;
    };

    // affine direction
    const RVec lam_sq = detail::jordan_mul(K, W.lambda, W.lambda);
    RVec dxa, dya, dza, dsa;
    double dtaua, dkapa;
    direction(1.0, RVec(-lam_sq), -tau * kappa, dxa, dya, dza, dsa, dtaua, dkapa);

    double alpha_aff = std::min(detail::max_step(K, s, dsa), detail::max_step(K, z, dza));
    if (dtaua < 0) alpha_aff = std::min(alpha_aff, -tau / dtaua);
    if (dkapa < 0) alpha_aff = std::min(alpha_aff, -kappa / dkapa);
    alpha_aff = std::min(1.0, alpha_aff);

    const double sigma = std::pow(1.0 - alpha_aff, 3);

    // combined direction with Mehrotra correction
    const RVec corr =
        detail::jordan_mul(K, W.apply_WinvT(dsa), W.apply_W(dza));
    RVec ds = -lam_sq - corr + sigma * mu * e;
    const double dk = -tau * kappa - dtaua * dkapa + sigma * mu;
    RVec dx, dy, dz, dsv;
    double dtau, dkap;
    direction(1.0 - sigma, ds, dk, dx, dy, dz, dsv, dtau, dkap);

    double alpha = std::min(detail::max_step(K, s, dsv), detail::max_step(K, z, dz));
    if (dtau < 0) alpha = std::min(alpha, -tau / dtau);
    if (dkap < 0) alpha = std::min(alpha, -kappa / dkap);
    alpha = std::min(1.0, 0.98 * alpha);

#ifdef WG_CONIC_TRACE
    fprintf(stderr, "      alpha_aff=%9.3e sigma=%9.3e alpha=%9.3e\n", alpha_aff, sigma, alpha);
#endif
    if (!std::isfinite(dtau) || !std::isfinite(dkap) || !dx.allFinite() || !dy.allFinite() ||
        !dz.allFinite() || !dsv.allFinite())
      break;
    if (alpha < 1e-7) {
      if (++stall >= 2) break;
    } else {
      stall = 0;
    }

    x += alpha * dx;
    y += alpha * dy;
    z += alpha * dz;
    s += alpha * dsv;
    tau += alpha * dtau;
    kappa += alpha * dkap;
  }

  // the retained best iterate within two digits of the target tolerances is
  // still a usable optimum; tighter is often unreachable at this conditioning
  sol.status = (sol.kkt_residual <= 100 * opt.feastol && sol.rel_gap <= 100 * opt.gaptol)
                   ? ConicStatus::optimal
                   : ConicStatus::max_iter;
  return sol;
}

} // namespace wg::solvers
