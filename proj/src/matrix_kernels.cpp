#include "rssm/matrix_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rssm/errors.hpp"

namespace rssm {

namespace {
constexpr double kRelativeEigFloor = 1e-12;
}

Matrix sym(const Matrix& M) {
  if (M.rows() != M.cols())
    throw DimensionError("sym: input must be square, got " +
                         std::to_string(M.rows()) + "x" +
                         std::to_string(M.cols()));
  return 0.5 * (M + M.transpose());
}

Matrix skew(const Matrix& M) {
  if (M.rows() != M.cols())
    throw DimensionError("skew: input must be square, got " +
                         std::to_string(M.rows()) + "x" +
                         std::to_string(M.cols()));
  return 0.5 * (M - M.transpose());
}

namespace detail {

void eigh(const Matrix& S, Vector& eigenvalues, Matrix& eigenvectors,
          FlopCounter* flops) {
  const Matrix A = sym(S);
  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  if (es.info() != Eigen::Success)
    throw SingularityError("eigh: eigendecomposition failed to converge", 0.0);
  eigenvalues = es.eigenvalues();
  eigenvectors = es.eigenvectors();
  count_eigh(flops, static_cast<std::uint64_t>(S.rows()));
}

Matrix spectral_assemble(const Vector& mapped, const Matrix& eigenvectors,
                         FlopCounter* flops) {
  const auto k = static_cast<std::uint64_t>(eigenvectors.rows());
  detail::count_gemm(flops, k, k, k);
  detail::count_gemm(flops, k, k, k);
  return eigenvectors * mapped.asDiagonal() * eigenvectors.transpose();
}

}  // namespace detail

Matrix inv_sqrt(const Matrix& S, FlopCounter* flops) {
  if (S.rows() != S.cols())
    throw DimensionError("inv_sqrt: input must be square");
  Vector lam;
  Matrix V;
  detail::eigh(S, lam, V, flops);
  const double lmax = lam(lam.size() - 1);
  const double floor = kRelativeEigFloor * std::max(lmax, 0.0);
  if (!(lam(0) > 0.0) || lam(0) <= floor)
    throw SingularityError(
        "inv_sqrt: eigenvalue " + std::to_string(lam(0)) +
            " below floor " + std::to_string(floor),
        lam(0));
  const Vector mapped = lam.array().rsqrt();
  return detail::spectral_assemble(mapped, V, flops);
}

Matrix polar_project(const Matrix& A, FlopCounter* flops) {
  if (A.rows() < A.cols())
    throw DimensionError("polar_project: need rows >= cols, got " +
                         std::to_string(A.rows()) + "x" +
                         std::to_string(A.cols()));
  const auto n = static_cast<std::uint64_t>(A.rows());
  const auto k = static_cast<std::uint64_t>(A.cols());
  detail::count_gemm(flops, k, n, k);
  const Matrix gram = A.transpose() * A;
  Vector lam;
  Matrix V;
  detail::eigh(gram, lam, V, flops);
  const double lmax = lam(lam.size() - 1);
  const double floor = kRelativeEigFloor * std::max(lmax, 0.0);
  if (!(lam(0) > 0.0) || lam(0) <= floor)
    throw SingularityError(
        "polar_project: input is numerically rank deficient (Gram eigenvalue " +
            std::to_string(lam(0)) + ")",
        lam(0));
  const Vector mapped = lam.array().rsqrt();
  const Matrix T = detail::spectral_assemble(mapped, V, flops);
  detail::count_gemm(flops, n, k, k);
  return A * T;
}

double nuclear_norm(const Matrix& M) {
  // Use the smaller Gram side; singular values are shared.
  const Matrix gram = (M.cols() <= M.rows())
                          ? Matrix(M.transpose() * M)
                          : Matrix(M * M.transpose());
  Vector lam;
  Matrix V;
  detail::eigh(gram, lam, V);
  double total = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    total += std::sqrt(std::max(lam(i), 0.0));
  return total;
}

double operator_norm(const Matrix& M) {
  const Matrix gram = (M.cols() <= M.rows())
                          ? Matrix(M.transpose() * M)
                          : Matrix(M * M.transpose());
  Vector lam;
  Matrix V;
  detail::eigh(gram, lam, V);
  return std::sqrt(std::max(lam(lam.size() - 1), 0.0));
}

}  // namespace rssm
