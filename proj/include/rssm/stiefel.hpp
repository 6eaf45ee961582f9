#pragma once

#include <utility>

#include "rssm/matrix_kernels.hpp"
#include "rssm/rng.hpp"

namespace rssm {

/// A point on St(n,p): an n x p matrix with orthonormal columns, stored
/// column-major (Eigen default). The public constructor checks feasibility;
/// kernels whose output is orthonormal by construction use the unchecked tag
/// so the hot path does not pay the O(np^2) check. Iterates are not
/// re-orthonormalized between solver iterations; the solver asserts drift
/// periodically instead.
class StiefelPoint {
 public:
  static constexpr double kFeasibilityTol = 1e-10;

  struct unchecked_t {};
  static constexpr unchecked_t unchecked{};

  /// Validates ‖XᵀX - I‖_F <= kFeasibilityTol; throws DimensionError on
  /// infeasible input.
  explicit StiefelPoint(Matrix X);
  StiefelPoint(Matrix X, unchecked_t) : X_(std::move(X)) {}

  const Matrix& matrix() const { return X_; }
  Eigen::Index rows() const { return X_.rows(); }
  Eigen::Index cols() const { return X_.cols(); }

  /// ‖XᵀX - I‖_F, assertable at any time.
  double feasibility_error() const;

 private:
  Matrix X_;
};

/// Uniform (Haar) random point on St(n,p): the polar projection of a matrix
/// with iid standard Gaussian entries. Requires n >= p >= 1.
StiefelPoint random_stiefel(int n, int p, Rng& rng);

/// Projection onto the tangent space at X:  ξ - X sym(Xᵀξ).
Matrix tangent_project(const StiefelPoint& X, const Matrix& xi,
                       FlopCounter* flops = nullptr);

/// ‖sym(Xᵀξ)‖_F <= tol, i.e. membership of ξ in T_X St(n,p).
bool is_tangent(const StiefelPoint& X, const Matrix& xi, double tol = 1e-10);

/// Polar retraction (X + ξ)(I + ξᵀξ)^{-1/2}, which coincides with the
/// projection of X + ξ onto the manifold for tangent ξ.
StiefelPoint retract(const StiefelPoint& X, const Matrix& xi,
                     FlopCounter* flops = nullptr);

/// Riemannian subgradient from a Euclidean one: the tangent projection of g.
Matrix riemannian_subgradient(const StiefelPoint& X, const Matrix& g,
                              FlopCounter* flops = nullptr);

/// ‖tangent_project(X, g)‖_F. Upper-bounds the distance of 0 to the
/// Riemannian subdifferential only for the supplied subgradient selection.
double stationarity_proxy(const StiefelPoint& X, const Matrix& g);

}  // namespace rssm
