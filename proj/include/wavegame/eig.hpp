#pragma once

#include "wavegame/types.hpp"

#include <utility>

namespace wg::solvers {

// Cyclic complex Jacobi eigendecomposition of a Hermitian matrix. Eigenvalues are
// returned in descending order with matching unitary eigenvector columns.
// Input must be Hermitian within 1e-10 relative to its norm.
std::pair<RVec, Mat> herm_eig(const Mat& A);

// Unit eigenvector of the largest eigenvalue, phase fixed so the entry of largest
// modulus (lowest index on ties) is real positive.
Vec principal_eigvec(const Mat& A);

} // namespace wg::solvers
