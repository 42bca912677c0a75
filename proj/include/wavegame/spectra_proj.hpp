#pragma once

#include "wavegame/types.hpp"

namespace wg::solvers {

// Frobenius projection onto the spectrahedron {R Hermitian, R >= 0, diag(R) = c}.
// mu holds the multipliers of the diagonal constraints, so R - C - Diag(mu) is PSD
// and orthogonal to R at the solution; that pair certifies optimality.
struct SpectraProj {
  Mat R;
  RVec mu;
  int iterations = 0;
  double residual = 0; // final max |diag(R) - c|
};

// C must be Hermitian within 1e-9 relative tolerance and c strictly positive
// (Diag(c) is then an interior feasible point, so the dual optimum is attained).
// Dual semismooth Newton on diag(psd_part(C + Diag(mu))) = c.
SpectraProj project_spectrahedron(const Mat& C, const RVec& c);

} // namespace wg::solvers
