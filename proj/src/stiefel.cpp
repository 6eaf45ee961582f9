#include "rssm/stiefel.hpp"

#include <string>

#include "rssm/errors.hpp"

namespace rssm {

StiefelPoint::StiefelPoint(Matrix X) : X_(std::move(X)) {
  if (X_.rows() < X_.cols() || X_.cols() < 1)
    throw DimensionError("StiefelPoint: need n >= p >= 1, got " +
                         std::to_string(X_.rows()) + "x" +
                         std::to_string(X_.cols()));
  const double err = feasibility_error();
  if (!(err <= kFeasibilityTol))
    throw DimensionError("StiefelPoint: columns not orthonormal, ‖XᵀX-I‖_F = " +
                         std::to_string(err));
}

double StiefelPoint::feasibility_error() const {
  const Matrix gram = X_.transpose() * X_;
  return (gram - Matrix::Identity(X_.cols(), X_.cols())).norm();
}

StiefelPoint random_stiefel(int n, int p, Rng& rng) {
  if (n < p || p < 1)
    throw DimensionError("random_stiefel: need n >= p >= 1");
  // Redraw on (measure-zero) numerically rank-deficient Gaussians; the
  // conditioned distribution is still Haar.
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix G(n, p);
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < n; ++i) G(i, j) = rng.gaussian();
    try {
      return StiefelPoint(polar_project(G), StiefelPoint::unchecked);
    } catch (const SingularityError&) {
    }
  }
  throw SingularityError("random_stiefel: persistent rank deficiency", 0.0);
}

Matrix tangent_project(const StiefelPoint& X, const Matrix& xi,
                       FlopCounter* flops) {
  if (xi.rows() != X.rows() || xi.cols() != X.cols())
    throw DimensionError("tangent_project: shape mismatch");
  const auto n = static_cast<std::uint64_t>(X.rows());
  const auto p = static_cast<std::uint64_t>(X.cols());
  detail::count_gemm(flops, p, n, p);
  const Matrix M = X.matrix().transpose() * xi;
  detail::count_entrywise(flops, p, p);
  detail::count_gemm(flops, n, p, p);
  detail::count_entrywise(flops, n, p);
  return xi - X.matrix() * sym(M);
}

bool is_tangent(const StiefelPoint& X, const Matrix& xi, double tol) {
  if (xi.rows() != X.rows() || xi.cols() != X.cols()) return false;
  return sym(Matrix(X.matrix().transpose() * xi)).norm() <= tol;
}

StiefelPoint retract(const StiefelPoint& X, const Matrix& xi,
                     FlopCounter* flops) {
  if (xi.rows() != X.rows() || xi.cols() != X.cols())
    throw DimensionError("retract: shape mismatch");
  const auto n = static_cast<std::uint64_t>(X.rows());
  const auto p = static_cast<std::uint64_t>(X.cols());
  // For tangent ξ the Gram (X+ξ)ᵀ(X+ξ) equals I + ξᵀξ; assembling it from
  // X+ξ keeps the polar factor orthonormal to machine precision even when
  // the base point carries roundoff-level infeasibility.
  const Matrix B = X.matrix() + xi;
  detail::count_entrywise(flops, n, p);
  detail::count_gemm(flops, p, n, p);
  const Matrix gram = B.transpose() * B;
  const Matrix T = inv_sqrt(gram, flops);
  detail::count_gemm(flops, n, p, p);
  return StiefelPoint(B * T, StiefelPoint::unchecked);
}

Matrix riemannian_subgradient(const StiefelPoint& X, const Matrix& g,
                              FlopCounter* flops) {
  return tangent_project(X, g, flops);
}

double stationarity_proxy(const StiefelPoint& X, const Matrix& g) {
  return tangent_project(X, g).norm();
}

}  // namespace rssm
