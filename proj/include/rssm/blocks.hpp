#pragma once

#include <vector>

#include "rssm/stiefel.hpp"

namespace rssm {

/// Ordered disjoint cover {C_1, ..., C_ell} of the column indices
/// {0, ..., p-1}. Every block is nonempty and stored in ascending order.
class Partition {
 public:
  Partition(std::vector<std::vector<int>> blocks, int p);

  int ell() const { return static_cast<int>(blocks_.size()); }
  int p() const { return p_; }
  const std::vector<int>& block(int i) const { return blocks_[i]; }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  /// Index of the block containing column `col`.
  int block_of(int col) const { return block_of_[col]; }

 private:
  std::vector<std::vector<int>> blocks_;
  std::vector<int> block_of_;
  int p_;
};

/// Contiguous balanced partition: block sizes differ by at most one and every
/// size is <= ceil(p/ell). Requires 2 <= ell <= p.
Partition make_uniform_partition(int p, int ell);

/// Balanced partition of a seeded random permutation of the columns.
Partition make_shuffled_partition(int p, int ell, Rng& rng);

/// Unordered pair {i, j} of partition blocks, i < j, with the merged column
/// list C_ij ascending and its complement.
struct BlockPair {
  int i = 0;
  int j = 1;
  std::vector<int> columns;     // C_i ∪ C_j, ascending
  std::vector<int> complement;  // [p] \ C_ij, ascending
  int size() const { return static_cast<int>(columns.size()); }
};

BlockPair make_block_pair(const Partition& partition, int i, int j);

/// Uniform draw over the C(ell,2) unordered block pairs.
BlockPair sample_pair(const Partition& partition, Rng& rng);

/// Tangent vector to the submanifold block at X_ij, tagged with its pair.
/// Satisfies X_{-ij}ᵀ ξ = 0 and sym(X_ijᵀ ξ) = 0.
struct BlockTangent {
  BlockPair pair;
  Matrix matrix;  // n x p_ij
};

/// Projection of ξ onto the tangent space of the submanifold block:
/// X_ij skew(X_ijᵀ ξ) + (I - XXᵀ) ξ, computed by the low-cost recipe
/// Y = Xᵀξ; Y(C_ij,:) <- sym(Y(C_ij,:)); result = ξ - XY. Cost O(n p p_ij).
BlockTangent block_tangent_project(const StiefelPoint& X, const BlockPair& pair,
                                   const Matrix& xi,
                                   FlopCounter* flops = nullptr);

/// Projection onto the submanifold block M_{X_{-ij}}: the polar projection of
/// (I - X_{-ij}X_{-ij}ᵀ) Ξ. The proximal-smoothness precondition is certified
/// by σ_min((I - X_{-ij}X_{-ij}ᵀ)Ξ) >= 1e-8; below it a SingularityError is
/// raised because the nearest point may not be unique.
Matrix project_onto_block(const StiefelPoint& X, const BlockPair& pair,
                          const Matrix& Xi, FlopCounter* flops = nullptr);

/// One block update: columns C_ij of X are replaced by the projection of
/// X_ij - γ g onto the submanifold block. Since X_ijᵀ g is skew, the Gram
/// matrix is assembled as I + γ² gᵀg. Requires γ > 0.
StiefelPoint rssm_block_step(const StiefelPoint& X, const BlockPair& pair,
                             const BlockTangent& g, double gamma,
                             FlopCounter* flops = nullptr);

/// Copy of the selected columns of X (column extraction copies; the cost is
/// dominated by the O(n p p_ij) multiplies around it).
Matrix gather_columns(const Matrix& X, const std::vector<int>& cols);
void scatter_columns(Matrix& X, const std::vector<int>& cols, const Matrix& B);

}  // namespace rssm
