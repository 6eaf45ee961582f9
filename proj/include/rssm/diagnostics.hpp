#pragma once

#include <string>

#include "rssm/averaging.hpp"
#include "rssm/oracle.hpp"

namespace rssm {

/// Result of the adaptive proximal map evaluated by the inner solver.
/// `theta` is the surrogate stationarity measure (1/λ)‖prox - X‖_{A_X^{-1}};
/// `inner_residual` is the best stationarity proxy of the inner objective
/// over the trailing window; `converged` is false when the budget ran out
/// above tolerance (a flagged-approximate result, not an error).
struct ProxResult {
  Matrix prox_point;
  double envelope = 0.0;
  double theta = 0.0;
  long inner_iters = 0;
  double inner_residual = 0.0;
  bool converged = false;
  double lambda = 0.0;
};

struct ProxOptions {
  long budget = 50000;
  double tol = 1e-6;
  std::uint64_t seed = 0;  // inner restarts only; Y0 = X by default
  bool random_restart = false;
};

/// Upper edge of the single-valuedness window: ell / (2(τ + (2ell-1)L)).
double lambda_window_edge(const ProblemOracle& problem, int ell);

/// Approximately evaluates P^C_{λf}(X) at X = ctx.base() by Riemannian
/// subgradient descent on h_X(Y) = f(Y) + (1/2λ)‖Y-X‖²_{A_X^{-1}} with steps
/// c/√(k+1), c = λ ell / (ell + 2λ(τ + (2ell-1)L)). Desk-scale only: guarded
/// at n·p <= 200. λ outside the window raises ConfigError.
ProxResult adaptive_prox(const ProblemOracle& problem,
                         const AveragingContext& ctx, double lambda,
                         const ProxOptions& options = {});

/// Both inequalities of the surrogate-stationarity sandwich, with the
/// oracle-selected subgradient norm standing in for dist(0, ∂_St f(·)); the
/// substitution makes the lower check conservative and the upper check
/// inherit the inner solver's residual, which is added to the tolerance.
struct SandwichReport {
  double theta = 0.0;
  double upper_lhs = 0.0;  // proxy at the prox point
  double upper_rhs = 0.0;  // √C(ell,2) · Θ
  double lower_lhs = 0.0;  // ((ell/2 - λ(τ+L))/√(2 ell)) · Θ
  double lower_rhs = 0.0;  // proxy at X
  double inner_residual = 0.0;
  double tolerance = 0.0;  // 10 × inner residual
  bool upper_pass = false;
  bool lower_pass = false;
  std::string note;
};

SandwichReport check_stationarity_sandwich(const ProblemOracle& problem,
                                           const AveragingContext& ctx,
                                           double lambda,
                                           const ProxOptions& options = {});

/// Sufficient-decrease inequality at X = ctx.base() with the expectation over
/// block pairs evaluated exhaustively (all C(ell,2) updates, no sampling).
struct SufficientDecreaseReport {
  double lhs = 0.0;  // γ Θ(X)²
  double rhs = 0.0;
  double slack = 0.0;       // rhs - lhs
  double tol_budget = 0.0;  // inner-solver error allowance
  double mean_inner_residual = 0.0;
  bool pass = false;
  double gamma = 0.0, lambda = 0.0;
};

SufficientDecreaseReport check_recursion_decrease(const ProblemOracle& problem,
                                                  const AveragingContext& ctx,
                                                  double lambda, double gamma,
                                                  const ProxOptions& options = {});

/// Metric-comparison bound between the adaptive norms at X and at the updated
/// iterate, with the expectation over pairs evaluated exhaustively.
struct MetricComparisonReport {
  double lhs = 0.0;  // E‖Y-X⁺‖²_{A_{X⁺}^{-1}}
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
};

MetricComparisonReport check_metric_comparison(const ProblemOracle& problem,
                                               const AveragingContext& ctx,
                                               const Matrix& Y, double gamma);

std::string to_json(const ProxResult& r);
std::string to_json(const SandwichReport& r);
std::string to_json(const SufficientDecreaseReport& r);
std::string to_json(const MetricComparisonReport& r);
std::string to_json(const SpectrumReport& r);
std::string to_json(const CommutationReport& r);

}  // namespace rssm
