#pragma once

#include <memory>
#include <vector>

#include "rssm/oracle.hpp"
#include "rssm/stiefel.hpp"

namespace rssm {

/// Robust subspace recovery instance (dual principal component pursuit):
/// unit-norm data columns, m1 inliers spanning the d-dimensional subspace of
/// `basis`, m2 unstructured outliers, columns permuted.
struct RsrInstance {
  Matrix data;   // n x (m1 + m2), unit-norm columns
  Matrix basis;  // ground-truth S in St(n, d)
  int n = 0, d = 0, m1 = 0, m2 = 0;
  int p() const { return n - d; }
  int m() const { return m1 + m2; }
};

RsrInstance gen_rsr(int n, int d, int m1, int m2, Rng& rng);

/// f(X) = (1/m) Σ_j ‖Xᵀ ỹ_j‖₂ for X with n rows and p = n - d columns.
double rsr_value(const RsrInstance& inst, const Matrix& X);

/// Subgradient selection (1/m) Σ_j ỹ_j u_jᵀ with u_j = Xᵀỹ_j/‖Xᵀỹ_j‖ when the
/// residual exceeds 1e-12 and u_j = 0 otherwise.
Matrix rsr_subgradient(const RsrInstance& inst, const Matrix& X);

/// Columns `cols` of the full subgradient, exactly.
Matrix rsr_partial_subgradient(const RsrInstance& inst, const Matrix& X,
                               const std::vector<int>& cols);

/// Spectral initialization: the p eigenvectors of ỸỸᵀ with smallest
/// eigenvalues, ascending.
StiefelPoint rsr_init(const RsrInstance& inst);

/// Estimation error √(max(0, 2(p - ‖(I - SSᵀ)X‖_*))) = dist(X, basis of S^⊥).
double rsr_error(const RsrInstance& inst, const Matrix& X);

/// Certified Lipschitz bound (1/m) Σ_j ‖ỹ_j‖ (= 1 for unit-norm data).
double rsr_lipschitz_bound(const RsrInstance& inst);

/// Orthogonal dictionary learning instance: Y = X* S with X* orthogonal and
/// S Bernoulli(theta)-masked standard Gaussian.
struct OdlInstance {
  Matrix data;        // Y, n x m
  Matrix dictionary;  // ground-truth X* in St(n, n)
  double theta = 0.3;
  int n = 0, m = 0;
};

OdlInstance gen_odl(int n, int m, double theta, Rng& rng);

/// f(X) = ‖YᵀX‖₁ (entrywise). Accepts X with n rows and up to n columns so
/// the oracle is evaluable on partial frames as well as the square problem.
double odl_value(const OdlInstance& inst, const Matrix& X);

/// Subgradient selection Y sign(YᵀX) with sign(0) = 0.
Matrix odl_subgradient(const OdlInstance& inst, const Matrix& X);

Matrix odl_partial_subgradient(const OdlInstance& inst, const Matrix& X,
                               const std::vector<int>& cols);

/// err(X, X*) = Σ_i |max_j |x_iᵀ x*_j| - 1|; zero iff every column of X
/// aligns with some dictionary atom up to sign.
double odl_error(const OdlInstance& inst, const Matrix& X);

/// Certified (deliberately loose) Lipschitz bound √n Σ_j ‖y_j‖.
double odl_lipschitz_bound(const OdlInstance& inst);

/// Solver-facing oracle over an RSR instance. Sessions cache Z = XᵀỸ and the
/// per-column residual norms so a block update costs O(n m p_ij).
class RsrOracle : public ProblemOracle {
 public:
  explicit RsrOracle(std::shared_ptr<const RsrInstance> inst);

  Eigen::Index rows() const override;
  Eigen::Index cols() const override;
  double value(const Matrix& X) const override;
  Matrix subgradient(const Matrix& X) const override;
  double lipschitz_bound() const override;
  bool has_error_metric() const override { return true; }
  double error_metric(const Matrix& X) const override;
  std::unique_ptr<OracleSession> make_session(const Matrix& X0) const override;

  const RsrInstance& instance() const { return *inst_; }

 private:
  std::shared_ptr<const RsrInstance> inst_;
};

/// Solver-facing oracle over an ODL instance. Sessions cache W = XᵀY.
class OdlOracle : public ProblemOracle {
 public:
  explicit OdlOracle(std::shared_ptr<const OdlInstance> inst);

  Eigen::Index rows() const override;
  Eigen::Index cols() const override;
  double value(const Matrix& X) const override;
  Matrix subgradient(const Matrix& X) const override;
  double lipschitz_bound() const override;
  bool has_error_metric() const override { return true; }
  double error_metric(const Matrix& X) const override;
  std::unique_ptr<OracleSession> make_session(const Matrix& X0) const override;

  const OdlInstance& instance() const { return *inst_; }

 private:
  std::shared_ptr<const OdlInstance> inst_;
};

}  // namespace rssm
