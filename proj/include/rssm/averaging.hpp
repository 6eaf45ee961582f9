#pragma once

#include <vector>

#include "rssm/blocks.hpp"

namespace rssm {

/// Base point, partition, and the coefficient matrices of the averaging
/// operator's block-coordinate form: Q = J + (ell-2)I and its entrywise
/// reciprocal Q' = J - ((ell-2)/(ell-1))I.
class AveragingContext {
 public:
  AveragingContext(StiefelPoint X, Partition partition);

  const StiefelPoint& base() const { return X_; }
  const Partition& partition() const { return partition_; }
  const Matrix& q() const { return Q_; }
  const Matrix& q_prime() const { return Qp_; }
  int ell() const { return partition_.ell(); }
  double pair_count() const;  // C(ell, 2)

 private:
  StiefelPoint X_;
  Partition partition_;
  Matrix Q_, Qp_;
};

/// Block Hadamard product: block (i,j) of the result is a_ij * B_ij under the
/// partition's block structure. A is ell x ell, B is p x p.
Matrix block_hadamard(const Matrix& A, const Matrix& B,
                      const Partition& partition);

/// The averaging operator A_X(ξ) through its coordinate form
/// X (C(ell,2)^{-1} Q ⊡ Xᵀξ) + (2/ell)(I - XXᵀ)ξ.
Matrix apply_averaging(const AveragingContext& ctx, const Matrix& xi);

/// A_X^{-1}(ξ) = X (C(ell,2) Q' ⊡ Xᵀξ) + (ell/2)(I - XXᵀ)ξ.
Matrix apply_averaging_inverse(const AveragingContext& ctx, const Matrix& xi);

/// Mahalanobis inner product ⟨A_X^{-1}(ξ), η⟩.
double mahalanobis_inner(const AveragingContext& ctx, const Matrix& xi,
                         const Matrix& eta);

/// ‖ξ‖²_{A_X^{-1}} = ⟨A_X^{-1}(ξ), ξ⟩, clamped at 0 against roundoff.
double mahalanobis_norm_sq(const AveragingContext& ctx, const Matrix& xi);

/// Definitional form C(ell,2)^{-1} Σ_{i<j} (I - X_{-ij}X_{-ij}ᵀ) ξ_ij I_ijᵀ —
/// the oracle the coordinate form is tested against; O(ell²) projections.
Matrix apply_averaging_definitional(const AveragingContext& ctx,
                                    const Matrix& xi);

struct SpectrumReport {
  std::vector<double> eigenvalues;       // observed, ascending
  double expected_small = 0.0;           // C(ell,2)^{-1}
  double expected_large = 0.0;           // 2/ell
  int expected_mult_small = 0;           // p² - Σ p_i²
  int expected_mult_large = 0;           // (n-p)p + Σ p_i²
  int observed_mult_small = 0;
  int observed_mult_large = 0;
  double max_eigenvalue_error = 0.0;
  bool pass = false;
};

/// Materializes A_X as a dense np x np matrix (test/diagnostic only; guarded
/// at n*p <= 400), eigendecomposes it, and compares the spectrum against the
/// closed form {2/ell, C(ell,2)^{-1}} with the exact multiplicities.
SpectrumReport spectrum_check(const AveragingContext& ctx, double tol = 1e-9);

struct CommutationReport {
  double max_discrepancy = 0.0;
  bool pass = false;
};

/// Verifies P_{T_X St} ∘ A_X(ξ) = A_X ∘ P_{T_X St}(ξ)
/// = C(ell,2)^{-1} Σ P_{T_{X_ij}M}(ξ_ij) I_ijᵀ, all three within tol.
CommutationReport commutation_check(const AveragingContext& ctx,
                                    const Matrix& xi, double tol = 1e-10);

struct SubgradientAverageReport {
  double inner_error = 0.0;  // |E⟨g_ij I_ijᵀ, η⟩_{A^{-1}} - ⟨P_{T_X}g, η⟩|
  double norm_error = 0.0;   // |E‖g_ij I_ijᵀ‖²_{A^{-1}} - ‖P_{T_X}g‖²|
  bool pass = false;
};

/// The two averaged-subgradient identities with the expectation replaced by
/// the exact average over all C(ell,2) pairs, for a supplied Euclidean
/// subgradient selection g and probe direction η.
SubgradientAverageReport subgradient_average_check(const AveragingContext& ctx,
                                                   const Matrix& g,
                                                   const Matrix& eta,
                                                   double tol = 1e-9);

}  // namespace rssm
