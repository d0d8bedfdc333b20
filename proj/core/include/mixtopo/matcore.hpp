#pragma once

#include <vector>

#include "mixtopo/cmatrix.hpp"

namespace mixtopo {

namespace tol {
inline constexpr double input_check = 1e-8;
inline constexpr double reconstruction = 1e-10;
inline constexpr double invertible = 1e-12;
}  // namespace tol

struct EigDecomposition {
    std::vector<double> values;  // descending
    CMatrix vectors;             // column j pairs with values[j]
};

struct SvdTriple {
    CMatrix left;
    std::vector<double> singulars;  // descending, >= 0
    CMatrix right;
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Eigenvalues are returned in descending order; each
/// eigenvector is rotated so that its largest-modulus component is real and
/// positive (lowest index wins ties), which makes the output deterministic.
///
/// Throws NonHermitianInput when the input fails is_hermitian(1e-8) and
/// NonFiniteInput on NaN/Inf entries.
EigDecomposition herm_eig(const CMatrix& a);

/// One-sided (Hestenes) Jacobi SVD, A = L diag(D) R^dag. Small singular
/// values keep high relative accuracy, which the near-pure transport relies
/// on.
SvdTriple svd(const CMatrix& a);

/// Unique PSD square root. Eigenvalues in [-1e-8, 0) are clamped to zero
/// (scaled by max(1, largest eigenvalue)); anything more negative throws
/// NotPositive.
CMatrix sqrt_psd(const CMatrix& a);

/// Unitary factor W of the polar decomposition A = sqrt(A A^dag) W, computed
/// as L R^dag from svd(). Invariant under block rotations of degenerate
/// singular subspaces because A is required to be invertible: throws
/// RankDeficient when sigma_min <= 1e-12 * sigma_max.
CMatrix unitary_polar(const CMatrix& a);

/// Largest singular value.
double operator_norm(const CMatrix& a);

}  // namespace mixtopo
