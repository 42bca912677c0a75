#pragma once

// Cone arithmetic for the interior-point solver: svec packing, Nesterov-Todd
// scalings and Jordan-algebra operations on the composite cone
//   K = R+^lp  x  SOC(q_1) x ... x SOC(q_k)  x  PSD(d_1) x ... x PSD(d_m)
// PSD blocks are real symmetric, packed column-major lower triangle with
// off-diagonal entries scaled by sqrt(2) so inner products match trace products.

#include "wavegame/types.hpp"

#include <vector>

namespace wg::solvers::detail {

inline int svec_len(int d) { return d * (d + 1) / 2; }

RVec svec(const RMat& M);
RMat smat(const RVec& v, int d);

// [[X, -Y], [Y, X]] for Hermitian C = X + iY; eigenvalues doubled in multiplicity.
RMat embed_hermitian(const Mat& C);

struct ConeLayout {
  int lp = 0;
  std::vector<int> soc;
  std::vector<int> sdp;

  std::vector<int> soc_off, sdp_off;
  int total = 0;
  double degree = 0; // Jordan-algebra rank nu

  void finalize();
};

RVec cone_identity(const ConeLayout& K);
// sup { a >= 0 : u + a*du in K }, 1e100 when unbounded; u must be interior
double max_step(const ConeLayout& K, const RVec& u, const RVec& du);
// max over blocks of (distance outside the cone); <= 0 means member
double membership_violation(const ConeLayout& K, const RVec& u);

struct NTScaling {
  const ConeLayout* K = nullptr;
  RVec lambda; // scaled point, = W z = W^{-T} s

  RVec lp_w;
  struct Soc {
    double eta;
    RVec v; // det(v) = 1, W = eta * (2 v v^T - J)
  };
  std::vector<Soc> soc;
  struct Sdp {
    RMat R, Rinv;
    RVec sigma; // lambda block = svec(diag(sigma))
  };
  std::vector<Sdp> sdp;

  RVec apply_W(const RVec& u) const;
  RVec apply_WT(const RVec& u) const;
  RVec apply_Winv(const RVec& u) const;
  RVec apply_WinvT(const RVec& u) const;
};

// s, z strictly interior
NTScaling nt_scaling(const ConeLayout& K, const RVec& s, const RVec& z);

RVec jordan_mul(const ConeLayout& K, const RVec& a, const RVec& b);
// solve lambda o x = d where lambda is the NT scaled point
RVec jordan_div_lambda(const NTScaling& W, const RVec& d);

} // namespace wg::solvers::detail
