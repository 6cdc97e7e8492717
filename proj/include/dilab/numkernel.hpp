#pragma once

#include "dilab/types.hpp"

namespace dilab {

// Largest singular value. Dense matrices use an SVD; sparse matrices up to
// 2000 rows/columns are densified, larger ones use Lanczos iteration on
// a*a with residual-based stopping.
double opnorm(const CMat& a);
double opnorm(const SpMat& a, double tol = 1e-10);

// Unique PSD square root of a Hermitian matrix. Eigenvalues in
// [-tau_psd, 0) are clamped to zero; anything below -tau_psd throws,
// which is how a failed contraction check surfaces.
CMat psd_sqrt(const CMat& a, double tau_psd = 1e-10);

// Horizontal stack [a_1 ... a_p] of same-height blocks.
CMat hstack(const std::vector<CMat>& blocks);
// Vertical stack.
CMat vstack(const std::vector<CMat>& blocks);

// kron(a, b) for a dense coefficient against a sparse operator.
SpMat kron_sparse(const CMat& a, const SpMat& b);

SpMat sparse_identity(Eigen::Index d);

bool all_finite(const CMat& a);

}  // namespace dilab
