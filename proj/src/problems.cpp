#include "rssm/problems.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "rssm/blocks.hpp"
#include "rssm/errors.hpp"

namespace rssm {

namespace {

constexpr double kKinkEps = 1e-12;  // residual threshold guarding division

Matrix unit_sphere_columns(int n, int count, Rng& rng) {
  Matrix M(n, count);
  for (int j = 0; j < count; ++j) {
    double norm = 0.0;
    do {
      for (int i = 0; i < n; ++i) M(i, j) = rng.gaussian();
      norm = M.col(j).norm();
    } while (!(norm > 1e-12));
    M.col(j) /= norm;
  }
  return M;
}

}  // namespace

RsrInstance gen_rsr(int n, int d, int m1, int m2, Rng& rng) {
  if (d >= n || d < 1) throw DimensionError("gen_rsr: need 1 <= d < n");
  if (m1 < 1 || m2 < 0) throw DimensionError("gen_rsr: need m1 >= 1, m2 >= 0");
  RsrInstance inst;
  inst.n = n;
  inst.d = d;
  inst.m1 = m1;
  inst.m2 = m2;
  inst.basis = random_stiefel(n, d, rng).matrix();

  const Matrix R = unit_sphere_columns(d, m1, rng);
  Matrix all(n, m1 + m2);
  all.leftCols(m1) = inst.basis * R;
  if (m2 > 0) all.rightCols(m2) = unit_sphere_columns(n, m2, rng);

  // Random permutation Γ of the columns; cosmetic for the objective but kept
  // for fidelity to the data model.
  std::vector<int> perm(m1 + m2);
  for (int i = 0; i < m1 + m2; ++i) perm[i] = i;
  for (int i = m1 + m2 - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
  inst.data.resize(n, m1 + m2);
  for (int j = 0; j < m1 + m2; ++j) inst.data.col(j) = all.col(perm[j]);
  return inst;
}

double rsr_value(const RsrInstance& inst, const Matrix& X) {
  if (X.rows() != inst.n || X.cols() != inst.p())
    throw DimensionError("rsr_value: expected " + std::to_string(inst.n) +
                         "x" + std::to_string(inst.p()));
  const Matrix Z = X.transpose() * inst.data;  // p x m
  return Z.colwise().norm().sum() / inst.m();
}

Matrix rsr_subgradient(const RsrInstance& inst, const Matrix& X) {
  if (X.rows() != inst.n || X.cols() != inst.p())
    throw DimensionError("rsr_subgradient: shape mismatch");
  Matrix Z = X.transpose() * inst.data;  // p x m
  const double inv_m = 1.0 / inst.m();
  for (int j = 0; j < inst.m(); ++j) {
    const double r = Z.col(j).norm();
    Z.col(j) *= (r > kKinkEps) ? inv_m / r : 0.0;
  }
  return inst.data * Z.transpose();
}

Matrix rsr_partial_subgradient(const RsrInstance& inst, const Matrix& X,
                               const std::vector<int>& cols) {
  return gather_columns(rsr_subgradient(inst, X), cols);
}

StiefelPoint rsr_init(const RsrInstance& inst) {
  const Matrix gram = inst.data * inst.data.transpose();  // n x n
  Vector lam;
  Matrix V;
  detail::eigh(gram, lam, V);
  return StiefelPoint(V.leftCols(inst.p()), StiefelPoint::unchecked);
}

double rsr_error(const RsrInstance& inst, const Matrix& X) {
  const Matrix B = X - inst.basis * (inst.basis.transpose() * X);
  const double radicand = 2.0 * (inst.p() - nuclear_norm(B));
  return std::sqrt(std::max(0.0, radicand));
}

double rsr_lipschitz_bound(const RsrInstance& inst) {
  return inst.data.colwise().norm().sum() / inst.m();
}

OdlInstance gen_odl(int n, int m, double theta, Rng& rng) {
  if (n < 1 || m < 1) throw DimensionError("gen_odl: need n, m >= 1");
  if (!(theta > 0.0 && theta < 1.0))
    throw ConfigError("gen_odl: need theta in (0,1)");
  OdlInstance inst;
  inst.n = n;
  inst.m = m;
  inst.theta = theta;
  inst.dictionary = random_stiefel(n, n, rng).matrix();
  Matrix S(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i)
      S(i, j) = (rng.uniform() < theta) ? rng.gaussian() : 0.0;
  inst.data = inst.dictionary * S;
  return inst;
}

double odl_value(const OdlInstance& inst, const Matrix& X) {
  if (X.rows() != inst.n || X.cols() > inst.n || X.cols() < 1)
    throw DimensionError("odl_value: shape mismatch");
  return (inst.data.transpose() * X).cwiseAbs().sum();
}

Matrix odl_subgradient(const OdlInstance& inst, const Matrix& X) {
  if (X.rows() != inst.n || X.cols() > inst.n || X.cols() < 1)
    throw DimensionError("odl_subgradient: shape mismatch");
  const Matrix W = inst.data.transpose() * X;  // m x q
  const Matrix sgn =
      (W.array() > 0.0).cast<double>() - (W.array() < 0.0).cast<double>();
  return inst.data * sgn;
}

Matrix odl_partial_subgradient(const OdlInstance& inst, const Matrix& X,
                               const std::vector<int>& cols) {
  return gather_columns(odl_subgradient(inst, X), cols);
}

double odl_error(const OdlInstance& inst, const Matrix& X) {
  const Matrix overlaps = (X.transpose() * inst.dictionary).cwiseAbs();
  double err = 0.0;
  for (Eigen::Index i = 0; i < overlaps.rows(); ++i)
    err += std::abs(overlaps.row(i).maxCoeff() - 1.0);
  return err;
}

double odl_lipschitz_bound(const OdlInstance& inst) {
  return std::sqrt(static_cast<double>(inst.n)) *
         inst.data.colwise().norm().sum();
}

namespace {

/// Caches Z = Xᵀ Ỹ (p x m) and the residual norms r_j = ‖Z.col(j)‖ so a block
/// update costs O(n m p_ij) instead of O(n m p).
class RsrSession : public OracleSession {
 public:
  RsrSession(std::shared_ptr<const RsrInstance> inst, Matrix X0)
      : inst_(std::move(inst)), X_(std::move(X0)) {
    rebuild(nullptr);
  }

  double value() const override { return r_.sum() / inst_->m(); }

  Matrix partial_subgradient(const std::vector<int>& cols,
                             FlopCounter* flops) override {
    const auto m = static_cast<std::uint64_t>(inst_->m());
    const auto n = static_cast<std::uint64_t>(inst_->n);
    const auto q = static_cast<std::uint64_t>(cols.size());
    Matrix W(cols.size(), inst_->m());
    for (std::size_t k = 0; k < cols.size(); ++k) W.row(k) = Z_.row(cols[k]);
    const double inv_m = 1.0 / inst_->m();
    for (int j = 0; j < inst_->m(); ++j)
      W.col(j) *= (r_(j) > kKinkEps) ? inv_m / r_(j) : 0.0;
    detail::count_entrywise(flops, q, m);
    detail::count_gemm(flops, n, m, q);
    return inst_->data * W.transpose();
  }

  Matrix full_subgradient(FlopCounter* flops) override {
    std::vector<int> all(inst_->p());
    for (int c = 0; c < inst_->p(); ++c) all[c] = c;
    return partial_subgradient(all, flops);
  }

  void commit_block_update(const std::vector<int>& cols, const Matrix& X_full,
                           FlopCounter* flops) override {
    X_ = X_full;
    const auto m = static_cast<std::uint64_t>(inst_->m());
    const auto n = static_cast<std::uint64_t>(inst_->n);
    const auto q = static_cast<std::uint64_t>(cols.size());
    const Matrix Xcols = gather_columns(X_, cols);
    detail::count_gemm(flops, q, n, m);
    const Matrix Znew = Xcols.transpose() * inst_->data;
    for (std::size_t k = 0; k < cols.size(); ++k)
      Z_.row(cols[k]) = Znew.row(static_cast<Eigen::Index>(k));
    refresh_norms(flops);
  }

  void reset(const Matrix& X, FlopCounter* flops) override {
    X_ = X;
    rebuild(flops);
  }

  const Matrix& current_point() const override { return X_; }

 private:
  void rebuild(FlopCounter* flops) {
    detail::count_gemm(flops, static_cast<std::uint64_t>(inst_->p()),
                       static_cast<std::uint64_t>(inst_->n),
                       static_cast<std::uint64_t>(inst_->m()));
    Z_ = X_.transpose() * inst_->data;
    refresh_norms(flops);
  }
  void refresh_norms(FlopCounter* flops) {
    detail::count_entrywise(flops, static_cast<std::uint64_t>(inst_->p()),
                            static_cast<std::uint64_t>(2 * inst_->m()));
    r_ = Z_.colwise().norm();
  }

  std::shared_ptr<const RsrInstance> inst_;
  Matrix X_;
  Matrix Z_;  // p x m
  Eigen::RowVectorXd r_;
};

/// Caches W = Xᵀ Y (p x m); a block update refreshes only the touched rows.
class OdlSession : public OracleSession {
 public:
  OdlSession(std::shared_ptr<const OdlInstance> inst, Matrix X0)
      : inst_(std::move(inst)), X_(std::move(X0)) {
    rebuild(nullptr);
  }

  double value() const override { return W_.cwiseAbs().sum(); }

  Matrix partial_subgradient(const std::vector<int>& cols,
                             FlopCounter* flops) override {
    const auto m = static_cast<std::uint64_t>(inst_->m);
    const auto n = static_cast<std::uint64_t>(inst_->n);
    const auto q = static_cast<std::uint64_t>(cols.size());
    Matrix sgn(cols.size(), inst_->m);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto row = W_.row(cols[k]).array();
      sgn.row(static_cast<Eigen::Index>(k)) =
          (row > 0.0).cast<double>() - (row < 0.0).cast<double>();
    }
    detail::count_entrywise(flops, q, m);
    detail::count_gemm(flops, n, m, q);
    return inst_->data * sgn.transpose();
  }

  Matrix full_subgradient(FlopCounter* flops) override {
    std::vector<int> all(static_cast<std::size_t>(X_.cols()));
    for (std::size_t c = 0; c < all.size(); ++c) all[c] = static_cast<int>(c);
    return partial_subgradient(all, flops);
  }

  void commit_block_update(const std::vector<int>& cols, const Matrix& X_full,
                           FlopCounter* flops) override {
    X_ = X_full;
    const auto m = static_cast<std::uint64_t>(inst_->m);
    const auto n = static_cast<std::uint64_t>(inst_->n);
    const auto q = static_cast<std::uint64_t>(cols.size());
    const Matrix Xcols = gather_columns(X_, cols);
    detail::count_gemm(flops, q, n, m);
    const Matrix Wnew = Xcols.transpose() * inst_->data;
    for (std::size_t k = 0; k < cols.size(); ++k)
      W_.row(cols[k]) = Wnew.row(static_cast<Eigen::Index>(k));
  }

  void reset(const Matrix& X, FlopCounter* flops) override {
    X_ = X;
    rebuild(flops);
  }

  const Matrix& current_point() const override { return X_; }

 private:
  void rebuild(FlopCounter* flops) {
    detail::count_gemm(flops, static_cast<std::uint64_t>(X_.cols()),
                       static_cast<std::uint64_t>(inst_->n),
                       static_cast<std::uint64_t>(inst_->m));
    W_ = X_.transpose() * inst_->data;
  }

  std::shared_ptr<const OdlInstance> inst_;
  Matrix X_;
  Matrix W_;  // p x m
};

}  // namespace

RsrOracle::RsrOracle(std::shared_ptr<const RsrInstance> inst)
    : inst_(std::move(inst)) {}

Eigen::Index RsrOracle::rows() const { return inst_->n; }
Eigen::Index RsrOracle::cols() const { return inst_->p(); }
double RsrOracle::value(const Matrix& X) const { return rsr_value(*inst_, X); }
Matrix RsrOracle::subgradient(const Matrix& X) const {
  return rsr_subgradient(*inst_, X);
}
double RsrOracle::lipschitz_bound() const {
  return rsr_lipschitz_bound(*inst_);
}
double RsrOracle::error_metric(const Matrix& X) const {
  return rsr_error(*inst_, X);
}
std::unique_ptr<OracleSession> RsrOracle::make_session(const Matrix& X0) const {
  return std::make_unique<RsrSession>(inst_, X0);
}

OdlOracle::OdlOracle(std::shared_ptr<const OdlInstance> inst)
    : inst_(std::move(inst)) {}

Eigen::Index OdlOracle::rows() const { return inst_->n; }
Eigen::Index OdlOracle::cols() const { return inst_->n; }
double OdlOracle::value(const Matrix& X) const { return odl_value(*inst_, X); }
Matrix OdlOracle::subgradient(const Matrix& X) const {
  return odl_subgradient(*inst_, X);
}
double OdlOracle::lipschitz_bound() const {
  return odl_lipschitz_bound(*inst_);
}
double OdlOracle::error_metric(const Matrix& X) const {
  return odl_error(*inst_, X);
}
std::unique_ptr<OracleSession> OdlOracle::make_session(const Matrix& X0) const {
  return std::make_unique<OdlSession>(inst_, X0);
}

}  // namespace rssm
