#include "rssm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "json.hpp"

#include "rssm/errors.hpp"
#include "rssm/rng.hpp"

namespace rssm {

namespace {

double h_value(const ProblemOracle& problem, const AveragingContext& ctx,
               double lambda, const Matrix& Y) {
  const Matrix diff = Y - ctx.base().matrix();
  return problem.value(Y) + mahalanobis_norm_sq(ctx, diff) / (2.0 * lambda);
}

Matrix h_subgradient(const ProblemOracle& problem, const AveragingContext& ctx,
                     double lambda, const Matrix& Y) {
  const Matrix diff = Y - ctx.base().matrix();
  return problem.subgradient(Y) +
         apply_averaging_inverse(ctx, diff) / lambda;
}

}  // namespace

double lambda_window_edge(const ProblemOracle& problem, int ell) {
  const double tau = problem.weak_convexity_bound();
  const double L = problem.lipschitz_bound();
  return ell / (2.0 * (tau + (2.0 * ell - 1.0) * L));
}

ProxResult adaptive_prox(const ProblemOracle& problem,
                         const AveragingContext& ctx, double lambda,
                         const ProxOptions& options) {
  const auto n = ctx.base().rows();
  const auto p = ctx.base().cols();
  if (n * p > 200)
    throw ConfigError("adaptive_prox: diagnostic guard n*p <= 200");
  const int ell = ctx.ell();
  const double edge = lambda_window_edge(problem, ell);
  if (!(lambda > 0.0 && lambda < edge))
    throw ConfigError("adaptive_prox: lambda outside (0, " +
                      std::to_string(edge) + ")");

  const double tau = problem.weak_convexity_bound();
  const double L = problem.lipschitz_bound();
  const double c =
      lambda * ell / (ell + 2.0 * lambda * (tau + (2.0 * ell - 1.0) * L));

  StiefelPoint Y = ctx.base();
  if (options.random_restart) {
    Rng rng(options.seed);
    Matrix G(n, p);
    for (Eigen::Index j = 0; j < p; ++j)
      for (Eigen::Index i = 0; i < n; ++i) G(i, j) = rng.gaussian();
    // Restart from a nearby feasible point; the window keeps h_X strongly
    // convex so all restarts should agree.
    Y = retract(Y, tangent_project(Y, Matrix(0.1 * G)));
  }

  ProxResult result;
  result.lambda = lambda;
  Matrix best = Y.matrix();
  double best_h = h_value(problem, ctx, lambda, best);

  const std::size_t window = 200;
  std::deque<double> recent;
  double window_min = std::numeric_limits<double>::infinity();

  long k = 0;
  for (; k < options.budget; ++k) {
    const Matrix g = h_subgradient(problem, ctx, lambda, Y.matrix());
    const Matrix g_r = tangent_project(Y, g);
    const double residual = g_r.norm();

    recent.push_back(residual);
    if (recent.size() > window) recent.pop_front();
    window_min = *std::min_element(recent.begin(), recent.end());

    const double hY = h_value(problem, ctx, lambda, Y.matrix());
    if (hY < best_h) {
      best_h = hY;
      best = Y.matrix();
    }
    if (residual <= options.tol) {
      ++k;
      break;
    }
    const double step = c / std::sqrt(static_cast<double>(k) + 1.0);
    Y = retract(Y, Matrix(-step * g_r));
  }

  result.prox_point = best;
  result.envelope = best_h;
  const Matrix diff = best - ctx.base().matrix();
  result.theta = std::sqrt(mahalanobis_norm_sq(ctx, diff)) / lambda;
  result.inner_iters = k;
  result.inner_residual = window_min;
  result.converged = window_min <= options.tol;
  return result;
}

SandwichReport check_stationarity_sandwich(const ProblemOracle& problem,
                                           const AveragingContext& ctx,
                                           double lambda,
                                           const ProxOptions& options) {
  const ProxResult prox = adaptive_prox(problem, ctx, lambda, options);
  const int ell = ctx.ell();
  const double tau = problem.weak_convexity_bound();
  const double L = problem.lipschitz_bound();

  SandwichReport report;
  report.theta = prox.theta;
  report.inner_residual = prox.inner_residual;
  report.tolerance = 10.0 * prox.inner_residual;

  const StiefelPoint Z(prox.prox_point, StiefelPoint::unchecked);
  report.upper_lhs = stationarity_proxy(Z, problem.subgradient(Z.matrix()));
  report.upper_rhs = std::sqrt(ctx.pair_count()) * prox.theta;
  report.upper_pass = report.upper_lhs <= report.upper_rhs + report.tolerance;

  report.lower_lhs =
      (0.5 * ell - lambda * (tau + L)) / std::sqrt(2.0 * ell) * prox.theta;
  report.lower_rhs = stationarity_proxy(
      ctx.base(), problem.subgradient(ctx.base().matrix()));
  report.lower_pass = report.lower_lhs <= report.lower_rhs + report.tolerance;

  report.note =
      "dist(0, ∂_St f) replaced by the norm of the oracle-selected "
      "Riemannian subgradient; lower check conservative, upper check "
      "carries the inner-solver residual";
  return report;
}

SufficientDecreaseReport check_recursion_decrease(const ProblemOracle& problem,
                                                  const AveragingContext& ctx,
                                                  double lambda, double gamma,
                                                  const ProxOptions& options) {
  const double L = problem.lipschitz_bound();
  const double tau = problem.weak_convexity_bound();
  if (!(gamma > 0.0 && gamma < 1.0 / L))
    throw ConfigError("check_recursion_decrease: need gamma in (0, 1/L)");
  const int ell = ctx.ell();
  const StiefelPoint& X = ctx.base();

  const ProxResult at_x = adaptive_prox(problem, ctx, lambda, options);
  const Matrix g_full = problem.subgradient(X.matrix());

  double mean_envelope_plus = 0.0;
  double residual_sum = at_x.inner_residual;
  int prox_calls = 1;
  for (int i = 0; i < ell; ++i) {
    for (int j = i + 1; j < ell; ++j) {
      const BlockPair pair = make_block_pair(ctx.partition(), i, j);
      const BlockTangent g =
          block_tangent_project(X, pair, gather_columns(g_full, pair.columns));
      const StiefelPoint Xplus = rssm_block_step(X, pair, g, gamma);
      const AveragingContext ctx_plus(Xplus, ctx.partition());
      const ProxResult at_plus = adaptive_prox(problem, ctx_plus, lambda, options);
      mean_envelope_plus += at_plus.envelope;
      residual_sum += at_plus.inner_residual;
      ++prox_calls;
    }
  }
  mean_envelope_plus /= ctx.pair_count();

  SufficientDecreaseReport report;
  report.gamma = gamma;
  report.lambda = lambda;
  report.lhs = gamma * at_x.theta * at_x.theta;
  const double numerator = at_x.envelope - mean_envelope_plus +
                           9.0 * gamma * gamma * L * L / (2.0 * lambda) +
                           2.0 * (ell - 2.0) * std::pow(gamma, 3) *
                               std::pow(L, 3) / lambda +
                           (ell - 2.0) * std::pow(gamma, 4) * std::pow(L, 4) /
                               (2.0 * lambda);
  const double denominator =
      (lambda / ell) * (ell / (2.0 * lambda) - (tau + (2.0 * ell - 3.0) * L));
  report.rhs = numerator / denominator;
  report.slack = report.rhs - report.lhs;
  report.mean_inner_residual = residual_sum / prox_calls;

  // Allowance for the inner solver's error: envelope gaps scale like
  // ρ·(displacement radius) + ρ², Θ² gaps like Θ·ρ·√C/(λμ) with the strong
  // convexity modulus μ of h_X over the window.
  const double mu = ell / (2.0 * lambda) - tau - (2.0 * ell - 1.0) * L;
  const double rho = report.mean_inner_residual;
  const double envelope_gap = rho * (8.0 * lambda * L / ell) + rho * rho;
  const double theta_gap = (at_x.theta + 1.0) *
                           std::sqrt(ctx.pair_count()) * rho /
                           (lambda * std::max(mu, 1e-12));
  report.tol_budget =
      2.0 * envelope_gap / denominator + gamma * theta_gap + 1e-12;
  report.pass = report.slack >= -report.tol_budget;
  return report;
}

MetricComparisonReport check_metric_comparison(const ProblemOracle& problem,
                                               const AveragingContext& ctx,
                                               const Matrix& Y, double gamma) {
  const StiefelPoint& X = ctx.base();
  const int ell = ctx.ell();
  const double L = problem.lipschitz_bound();
  const Matrix g_full = problem.subgradient(X.matrix());
  const double dist = (Y - X.matrix()).norm();

  double lhs = 0.0, mean_same_metric = 0.0;
  for (int i = 0; i < ell; ++i) {
    for (int j = i + 1; j < ell; ++j) {
      const BlockPair pair = make_block_pair(ctx.partition(), i, j);
      StiefelPoint Xplus = X;
      if (gamma > 0.0) {
        const BlockTangent g = block_tangent_project(
            X, pair, gather_columns(g_full, pair.columns));
        Xplus = rssm_block_step(X, pair, g, gamma);
      }
      const Matrix diff = Y - Xplus.matrix();
      const AveragingContext ctx_plus(Xplus, ctx.partition());
      lhs += mahalanobis_norm_sq(ctx_plus, diff);
      mean_same_metric += mahalanobis_norm_sq(ctx, diff);
    }
  }
  lhs /= ctx.pair_count();
  mean_same_metric /= ctx.pair_count();

  MetricComparisonReport report;
  report.lhs = lhs;
  report.rhs = mean_same_metric + 2.0 * (ell - 2.0) * gamma * L * dist * dist +
               (ell - 2.0) * gamma * gamma * L * L *
                   (dist * dist + 2.0 * dist) +
               (ell - 2.0) * std::pow(gamma, 3) * std::pow(L, 3) *
                   (dist * dist + 1.0);
  report.slack = report.rhs - report.lhs;
  report.pass = report.slack >= -1e-10;
  return report;
}

namespace {
nlohmann::json base_json(const char* kind) {
  nlohmann::json j;
  j["kind"] = kind;
  return j;
}
}  // namespace

std::string to_json(const ProxResult& r) {
  auto j = base_json("adaptive_prox");
  j["envelope"] = r.envelope;
  j["theta"] = r.theta;
  j["inner_iters"] = r.inner_iters;
  j["inner_residual"] = r.inner_residual;
  j["converged"] = r.converged;
  j["lambda"] = r.lambda;
  return j.dump();
}

std::string to_json(const SandwichReport& r) {
  auto j = base_json("stationarity_sandwich");
  j["theta"] = r.theta;
  j["upper"] = {{"lhs", r.upper_lhs}, {"rhs", r.upper_rhs}, {"pass", r.upper_pass}};
  j["lower"] = {{"lhs", r.lower_lhs}, {"rhs", r.lower_rhs}, {"pass", r.lower_pass}};
  j["inner_residual"] = r.inner_residual;
  j["tolerance"] = r.tolerance;
  j["note"] = r.note;
  return j.dump();
}

std::string to_json(const SufficientDecreaseReport& r) {
  auto j = base_json("sufficient_decrease");
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["slack"] = r.slack;
  j["tol_budget"] = r.tol_budget;
  j["mean_inner_residual"] = r.mean_inner_residual;
  j["gamma"] = r.gamma;
  j["lambda"] = r.lambda;
  j["pass"] = r.pass;
  return j.dump();
}

std::string to_json(const MetricComparisonReport& r) {
  auto j = base_json("metric_comparison");
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["slack"] = r.slack;
  j["pass"] = r.pass;
  return j.dump();
}

std::string to_json(const SpectrumReport& r) {
  auto j = base_json("averaging_spectrum");
  j["expected"] = {{"small", r.expected_small},
                   {"large", r.expected_large},
                   {"mult_small", r.expected_mult_small},
                   {"mult_large", r.expected_mult_large}};
  j["observed"] = {{"mult_small", r.observed_mult_small},
                   {"mult_large", r.observed_mult_large}};
  j["max_eigenvalue_error"] = r.max_eigenvalue_error;
  j["pass"] = r.pass;
  return j.dump();
}

std::string to_json(const CommutationReport& r) {
  auto j = base_json("commutation");
  j["max_discrepancy"] = r.max_discrepancy;
  j["pass"] = r.pass;
  return j.dump();
}

}  // namespace rssm
