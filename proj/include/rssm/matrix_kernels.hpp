#pragma once

#include <Eigen/Dense>

#include "rssm/flops.hpp"

namespace rssm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric part (M + Mᵀ)/2. Throws DimensionError on non-square input.
Matrix sym(const Matrix& M);

/// Skew-symmetric part (M - Mᵀ)/2. Throws DimensionError on non-square input.
Matrix skew(const Matrix& M);

/// Inverse square root of a symmetric positive definite matrix, via symmetric
/// eigendecomposition. The input is symmetrized before decomposing. Eigenvalues
/// at or below 1e-12 times the largest eigenvalue raise SingularityError
/// carrying the offending eigenvalue. Result T satisfies T S T = I.
Matrix inv_sqrt(const Matrix& S, FlopCounter* flops = nullptr);

/// Nearest matrix with orthonormal columns: A (AᵀA)^{-1/2}, backed by the
/// symmetric eigendecomposition of the Gram matrix. Requires rows >= cols and
/// A of full column rank; rank deficiency raises SingularityError because the
/// projection is then not unique.
Matrix polar_project(const Matrix& A, FlopCounter* flops = nullptr);

/// Sum of singular values, computed as trace((MᵀM)^{1/2}) through the
/// symmetric eigendecomposition of the smaller Gram matrix.
double nuclear_norm(const Matrix& M);

/// Largest singular value.
double operator_norm(const Matrix& M);

namespace detail {

/// Eigendecomposition of sym(S) with eigenvalues ascending. Shared spine of
/// the spectral kernels above.
void eigh(const Matrix& S, Vector& eigenvalues, Matrix& eigenvectors,
          FlopCounter* flops = nullptr);

/// V f(Λ) Vᵀ for an entrywise spectral map already applied to `mapped`.
Matrix spectral_assemble(const Vector& mapped, const Matrix& eigenvectors,
                         FlopCounter* flops = nullptr);

}  // namespace detail
}  // namespace rssm
