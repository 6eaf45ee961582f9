#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "rssm/matrix_kernels.hpp"

namespace rssm {

class OracleSession;

/// Objective value, Euclidean subgradient selection, and metadata for one
/// problem instance. Evaluations are pure; the certified Lipschitz bound L and
/// weak-convexity bound τ are upper bounds valid on a neighborhood of the
/// manifold. The partial subgradient with respect to a column set is exactly
/// those columns of the full subgradient (∂^C f = ∂f I_C), and the default
/// implementation takes it literally as a slice.
class ProblemOracle {
 public:
  virtual ~ProblemOracle() = default;

  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;

  virtual double value(const Matrix& X) const = 0;
  virtual Matrix subgradient(const Matrix& X) const = 0;
  virtual Matrix partial_subgradient(const Matrix& X,
                                     const std::vector<int>& cols) const;

  virtual double lipschitz_bound() const = 0;
  virtual double weak_convexity_bound() const { return 0.0; }

  virtual bool has_error_metric() const { return false; }
  virtual double error_metric(const Matrix& /*X*/) const {
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// Evaluation session bound to an evolving iterate. Sessions may cache
  /// work shared between consecutive evaluations (a solver run owns its
  /// session, so instance immutability and thread safety are preserved); the
  /// default session caches nothing and forwards to the pure evaluators.
  virtual std::unique_ptr<OracleSession> make_session(const Matrix& X0) const;
};

/// Stateful evaluation view used by the solvers. `commit_block_update` tells
/// the session which columns of the iterate just changed so incremental
/// caches stay exact. Flop counters are passed per call; telemetry passes
/// nullptr so diagnostics never pollute the algorithm's count.
class OracleSession {
 public:
  virtual ~OracleSession() = default;

  virtual double value() const = 0;
  virtual Matrix partial_subgradient(const std::vector<int>& cols,
                                     FlopCounter* flops) = 0;
  virtual Matrix full_subgradient(FlopCounter* flops) = 0;
  virtual void commit_block_update(const std::vector<int>& cols,
                                   const Matrix& X_full,
                                   FlopCounter* flops) = 0;
  virtual void reset(const Matrix& X, FlopCounter* flops) = 0;
  virtual const Matrix& current_point() const = 0;
};

}  // namespace rssm
