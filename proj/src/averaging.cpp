#include "rssm/averaging.hpp"

#include <algorithm>
#include <cmath>

#include "rssm/errors.hpp"

namespace rssm {

AveragingContext::AveragingContext(StiefelPoint X, Partition partition)
    : X_(std::move(X)), partition_(std::move(partition)) {
  if (partition_.p() != X_.cols())
    throw DimensionError("AveragingContext: partition does not match p");
  const int ell = partition_.ell();
  Q_ = Matrix::Ones(ell, ell) +
       (ell - 2.0) * Matrix::Identity(ell, ell);
  Qp_ = Matrix::Ones(ell, ell) -
        ((ell - 2.0) / (ell - 1.0)) * Matrix::Identity(ell, ell);
}

double AveragingContext::pair_count() const {
  const double ell = partition_.ell();
  return 0.5 * ell * (ell - 1.0);
}

Matrix block_hadamard(const Matrix& A, const Matrix& B,
                      const Partition& partition) {
  const int ell = partition.ell();
  const int p = partition.p();
  if (A.rows() != ell || A.cols() != ell)
    throw DimensionError("block_hadamard: coefficient matrix must be ell x ell");
  if (B.rows() != p || B.cols() != p)
    throw DimensionError("block_hadamard: B must be p x p");
  Matrix out(p, p);
  for (int c = 0; c < p; ++c) {
    const int bc = partition.block_of(c);
    for (int r = 0; r < p; ++r)
      out(r, c) = A(partition.block_of(r), bc) * B(r, c);
  }
  return out;
}

Matrix apply_averaging(const AveragingContext& ctx, const Matrix& xi) {
  const auto& X = ctx.base().matrix();
  if (xi.rows() != X.rows() || xi.cols() != X.cols())
    throw DimensionError("apply_averaging: shape mismatch");
  const double ell = ctx.ell();
  const Matrix M = X.transpose() * xi;
  const Matrix H = block_hadamard(ctx.q() / ctx.pair_count(), M,
                                  ctx.partition());
  return X * H + (2.0 / ell) * (xi - X * M);
}

Matrix apply_averaging_inverse(const AveragingContext& ctx, const Matrix& xi) {
  const auto& X = ctx.base().matrix();
  if (xi.rows() != X.rows() || xi.cols() != X.cols())
    throw DimensionError("apply_averaging_inverse: shape mismatch");
  const double ell = ctx.ell();
  const Matrix M = X.transpose() * xi;
  const Matrix H = block_hadamard(ctx.pair_count() * ctx.q_prime(), M,
                                  ctx.partition());
  return X * H + (ell / 2.0) * (xi - X * M);
}

double mahalanobis_inner(const AveragingContext& ctx, const Matrix& xi,
                         const Matrix& eta) {
  return apply_averaging_inverse(ctx, xi).cwiseProduct(eta).sum();
}

double mahalanobis_norm_sq(const AveragingContext& ctx, const Matrix& xi) {
  return std::max(0.0, mahalanobis_inner(ctx, xi, xi));
}

Matrix apply_averaging_definitional(const AveragingContext& ctx,
                                    const Matrix& xi) {
  const auto& X = ctx.base();
  const int ell = ctx.ell();
  Matrix acc = Matrix::Zero(xi.rows(), xi.cols());
  for (int i = 0; i < ell; ++i) {
    for (int j = i + 1; j < ell; ++j) {
      const BlockPair pair = make_block_pair(ctx.partition(), i, j);
      const Matrix xi_ij = gather_columns(xi, pair.columns);
      Matrix proj = xi_ij;
      if (!pair.complement.empty()) {
        const Matrix Xrest = gather_columns(X.matrix(), pair.complement);
        proj.noalias() -= Xrest * (Xrest.transpose() * xi_ij);
      }
      scatter_columns(acc, pair.columns,
                      Matrix(gather_columns(acc, pair.columns) + proj));
    }
  }
  return acc / ctx.pair_count();
}

SpectrumReport spectrum_check(const AveragingContext& ctx, double tol) {
  const auto n = ctx.base().rows();
  const auto p = ctx.base().cols();
  const Eigen::Index dim = n * p;
  if (dim > 400)
    throw ConfigError("spectrum_check: dense operator guard n*p <= 400");

  Matrix K(dim, dim);
  Matrix E = Matrix::Zero(n, p);
  for (Eigen::Index c = 0; c < p; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      E(r, c) = 1.0;
      const Matrix AE = apply_averaging(ctx, E);
      K.col(c * n + r) = Eigen::Map<const Vector>(AE.data(), dim);
      E(r, c) = 0.0;
    }
  }

  Vector lam;
  Matrix V;
  detail::eigh(K, lam, V);

  SpectrumReport report;
  report.eigenvalues.assign(lam.data(), lam.data() + lam.size());
  const int ell = ctx.ell();
  report.expected_small = 1.0 / ctx.pair_count();
  report.expected_large = 2.0 / ell;
  int sum_pi_sq = 0;
  for (const auto& blk : ctx.partition().blocks())
    sum_pi_sq += static_cast<int>(blk.size() * blk.size());
  report.expected_mult_large = static_cast<int>((n - p) * p) + sum_pi_sq;
  report.expected_mult_small = static_cast<int>(p * p) - sum_pi_sq;

  double max_err = 0.0;
  int mult_small = 0, mult_large = 0;
  for (double v : report.eigenvalues) {
    const double d_small = std::abs(v - report.expected_small);
    const double d_large = std::abs(v - report.expected_large);
    if (d_small < d_large) {
      ++mult_small;
      max_err = std::max(max_err, d_small);
    } else {
      ++mult_large;
      max_err = std::max(max_err, d_large);
    }
  }
  // At ell = 2 the two eigenvalues coincide and the split is arbitrary; fold
  // both the observed and the closed-form multiplicities into one cluster.
  if (std::abs(report.expected_small - report.expected_large) < 1e-14) {
    mult_large += mult_small;
    mult_small = 0;
    report.expected_mult_large += report.expected_mult_small;
    report.expected_mult_small = 0;
  }
  report.observed_mult_small = mult_small;
  report.observed_mult_large = mult_large;
  report.max_eigenvalue_error = max_err;
  report.pass = max_err <= tol &&
                mult_small == report.expected_mult_small &&
                mult_large == report.expected_mult_large;
  return report;
}

CommutationReport commutation_check(const AveragingContext& ctx,
                                    const Matrix& xi, double tol) {
  const auto& X = ctx.base();
  const Matrix a = tangent_project(X, apply_averaging(ctx, xi));
  const Matrix b = apply_averaging(ctx, tangent_project(X, xi));

  Matrix c = Matrix::Zero(xi.rows(), xi.cols());
  const int ell = ctx.ell();
  for (int i = 0; i < ell; ++i) {
    for (int j = i + 1; j < ell; ++j) {
      const BlockPair pair = make_block_pair(ctx.partition(), i, j);
      const BlockTangent t =
          block_tangent_project(X, pair, gather_columns(xi, pair.columns));
      scatter_columns(c, pair.columns,
                      Matrix(gather_columns(c, pair.columns) + t.matrix));
    }
  }
  c /= ctx.pair_count();

  CommutationReport report;
  report.max_discrepancy =
      std::max({(a - b).norm(), (a - c).norm(), (b - c).norm()});
  report.pass = report.max_discrepancy <= tol;
  return report;
}

SubgradientAverageReport subgradient_average_check(const AveragingContext& ctx,
                                                   const Matrix& g,
                                                   const Matrix& eta,
                                                   double tol) {
  const StiefelPoint& X = ctx.base();
  const Matrix g_riem = tangent_project(X, g);

  double mean_inner = 0.0, mean_norm_sq = 0.0;
  const int ell = ctx.ell();
  for (int i = 0; i < ell; ++i) {
    for (int j = i + 1; j < ell; ++j) {
      const BlockPair pair = make_block_pair(ctx.partition(), i, j);
      const BlockTangent g_ij =
          block_tangent_project(X, pair, gather_columns(g, pair.columns));
      Matrix lifted = Matrix::Zero(X.rows(), X.cols());
      scatter_columns(lifted, pair.columns, g_ij.matrix);
      mean_inner += mahalanobis_inner(ctx, lifted, eta);
      mean_norm_sq += mahalanobis_norm_sq(ctx, lifted);
    }
  }
  mean_inner /= ctx.pair_count();
  mean_norm_sq /= ctx.pair_count();

  SubgradientAverageReport report;
  report.inner_error =
      std::abs(mean_inner - g_riem.cwiseProduct(eta).sum());
  report.norm_error = std::abs(mean_norm_sq - g_riem.squaredNorm());
  report.pass = report.inner_error <= tol && report.norm_error <= tol;
  return report;
}

}  // namespace rssm
