#include "rssm/oracle.hpp"

#include "rssm/blocks.hpp"

namespace rssm {

Matrix ProblemOracle::partial_subgradient(const Matrix& X,
                                          const std::vector<int>& cols) const {
  return gather_columns(subgradient(X), cols);
}

namespace {

/// Cache-free session: forwards every call to the pure evaluators. Flops are
/// not counted here because the oracle's internals are opaque.
class GenericSession : public OracleSession {
 public:
  GenericSession(const ProblemOracle& oracle, Matrix X0)
      : oracle_(oracle), X_(std::move(X0)) {}

  double value() const override { return oracle_.value(X_); }

  Matrix partial_subgradient(const std::vector<int>& cols,
                             FlopCounter*) override {
    return oracle_.partial_subgradient(X_, cols);
  }

  Matrix full_subgradient(FlopCounter*) override {
    return oracle_.subgradient(X_);
  }

  void commit_block_update(const std::vector<int>& /*cols*/,
                           const Matrix& X_full, FlopCounter*) override {
    X_ = X_full;
  }

  void reset(const Matrix& X, FlopCounter*) override { X_ = X; }

  const Matrix& current_point() const override { return X_; }

 private:
  const ProblemOracle& oracle_;
  Matrix X_;
};

}  // namespace

std::unique_ptr<OracleSession> ProblemOracle::make_session(
    const Matrix& X0) const {
  return std::make_unique<GenericSession>(*this, X0);
}

}  // namespace rssm
