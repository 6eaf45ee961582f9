#include <Eigen/SVD>

#include "doctest.h"
#include "rssm/errors.hpp"
#include "rssm/matrix_kernels.hpp"
#include "rssm/rng.hpp"
#include "support/toy_oracles.hpp"

using namespace rssm;
using rssm::testing::random_matrix;

namespace {

// Independent oracle: full SVD via Jacobi rotations, a different algorithm
// from the eigendecomposition-backed kernels under test.
Eigen::JacobiSVD<Matrix> svd_oracle(const Matrix& M) {
  return Eigen::JacobiSVD<Matrix>(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

}  // namespace

TEST_CASE("sym and skew basics") {
  const Matrix I = Matrix::Identity(3, 3);
  CHECK((sym(I) - I).norm() == 0.0);
  CHECK(skew(I).norm() == 0.0);

  Matrix M(2, 2);
  M << 0, 2, 0, 0;
  Matrix S(2, 2), K(2, 2);
  S << 0, 1, 1, 0;
  K << 0, 1, -1, 0;
  CHECK((sym(M) - S).norm() == 0.0);
  CHECK((skew(M) - K).norm() == 0.0);

  Rng rng(1);
  const Matrix R = random_matrix(5, 5, rng);
  CHECK((sym(R) + skew(R) - R).norm() <= 1e-14 * R.norm());
  CHECK((skew(R).transpose() + skew(R)).norm() == 0.0);

  CHECK_THROWS_AS(sym(random_matrix(3, 2, rng)), DimensionError);
  CHECK_THROWS_AS(skew(random_matrix(3, 2, rng)), DimensionError);
}

TEST_CASE("inv_sqrt") {
  const Matrix I = Matrix::Identity(4, 4);
  CHECK((inv_sqrt(I) - I).norm() <= 1e-12);

  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 4.0;
  D(1, 1) = 9.0;
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 0.5;
  expected(1, 1) = 1.0 / 3.0;
  CHECK((inv_sqrt(D) - expected).norm() <= 1e-12);

  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 2 + rng.uniform_int(6);
    const Matrix A = random_matrix(k, k, rng);
    const Matrix S = A.transpose() * A + Matrix::Identity(k, k);
    const Matrix T = inv_sqrt(S);
    CHECK((T - T.transpose()).norm() <= 1e-12 * T.norm());
    CHECK((T * S * T - Matrix::Identity(k, k)).norm() <= 1e-10 * k);
  }

  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = 1e-14;
  CHECK_THROWS_AS(inv_sqrt(bad), SingularityError);
  try {
    inv_sqrt(bad);
  } catch (const SingularityError& e) {
    CHECK(e.offending_eigenvalue() == doctest::Approx(1e-14).epsilon(1e-3));
  }
  CHECK_THROWS_AS(inv_sqrt(random_matrix(3, 2, rng)), DimensionError);
}

TEST_CASE("polar_project") {
  Rng rng(3);
  const StiefelPoint X = random_stiefel(6, 3, rng);
  CHECK((polar_project(X.matrix()) - X.matrix()).norm() <= 1e-10);
  CHECK((polar_project(2.0 * X.matrix()) - X.matrix()).norm() <= 1e-10);

  for (int trial = 0; trial < 20; ++trial) {
    Matrix A = random_matrix(6, 3, rng);
    auto svd = svd_oracle(A);
    if (svd.singularValues().minCoeff() <= 0.5) continue;
    const Matrix P = polar_project(A);
    const Matrix ref = svd.matrixU() * svd.matrixV().transpose();
    CHECK((P - ref).norm() <= 1e-8);
    CHECK((P.transpose() * P - Matrix::Identity(3, 3)).norm() <= 1e-10);
    CHECK((polar_project(P) - P).norm() <= 1e-10);
  }

  Matrix rank1 = Matrix::Zero(6, 3);
  rank1.col(0).setOnes();
  rank1.col(1) = 2.0 * rank1.col(0);
  rank1.col(2) = -rank1.col(0);
  CHECK_THROWS_AS(polar_project(rank1), SingularityError);
  CHECK_THROWS_AS(polar_project(random_matrix(2, 4, rng)), DimensionError);
}

TEST_CASE("nuclear and operator norms") {
  CHECK(nuclear_norm(Matrix::Zero(4, 3)) == 0.0);
  Matrix embedded = Matrix::Zero(5, 3);
  embedded.topRows(3) = Matrix::Identity(3, 3);
  CHECK(nuclear_norm(embedded) == doctest::Approx(3.0).epsilon(1e-12));

  CHECK(operator_norm(Matrix::Identity(4, 4)) == doctest::Approx(1.0));
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = -5.0;
  CHECK(operator_norm(D) == doctest::Approx(5.0));

  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix M = random_matrix(5 + rng.uniform_int(3), 4, rng);
    const auto sv = svd_oracle(M).singularValues();
    CHECK(nuclear_norm(M) == doctest::Approx(sv.sum()).epsilon(1e-9));
    CHECK(operator_norm(M) == doctest::Approx(sv.maxCoeff()).epsilon(1e-9));
  }

  const Matrix M = random_matrix(6, 4, rng);
  const double opnorm = operator_norm(M);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix v = random_matrix(4, 1, rng);
    CHECK((M * v).norm() <= opnorm * v.norm() + 1e-12);
  }
}
