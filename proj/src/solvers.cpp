#include "rssm/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "rssm/errors.hpp"

namespace rssm {

namespace {

double binom2(int ell) { return 0.5 * ell * (ell - 1.0); }

void validate_common(const SolverConfig& cfg) {
  if (cfg.max_iters < 1) throw ConfigError("solver: max_iters must be >= 1");
  if (cfg.stride < 1) throw ConfigError("solver: stride must be >= 1");
  if (!(cfg.schedule.base > 0.0))
    throw ConfigError("solver: schedule base must be positive");
}

using Clock = std::chrono::steady_clock;

struct Telemetry {
  RunTrace trace;
  Clock::time_point t0 = Clock::now();

  void record(const ProblemOracle& problem, OracleSession& session,
              const StiefelPoint& X, long iter, double gamma,
              const FlopCounter& total, const FlopCounter& update) {
    TraceRecord rec;
    rec.iter = iter;
    rec.flops = static_cast<double>(total.count() + update.count());
    rec.update_flops = static_cast<double>(update.count());
    rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    rec.f = session.value();
    rec.err = problem.has_error_metric()
                  ? problem.error_metric(X.matrix())
                  : std::numeric_limits<double>::quiet_NaN();
    // Telemetry work is uncounted: nullptr counters.
    rec.proxy = stationarity_proxy(X, session.full_subgradient(nullptr));
    rec.step = gamma;
    trace.records.push_back(rec);
    trace.max_feasibility_error =
        std::max(trace.max_feasibility_error, X.feasibility_error());
  }
};

void check_drift(const StiefelPoint& X, const SolverConfig& cfg,
                 RunTrace& trace, long iter) {
  const double drift = X.feasibility_error();
  trace.max_feasibility_error = std::max(trace.max_feasibility_error, drift);
  if (drift > cfg.feasibility_tol)
    throw FeasibilityError("iterate drifted off the manifold at iteration " +
                               std::to_string(iter) + ": ‖XᵀX-I‖_F = " +
                               std::to_string(drift),
                           drift);
}

}  // namespace

double step_size(const StepSchedule& schedule, long k) {
  if (k < 0) throw ConfigError("step_size: iteration index must be >= 0");
  double delta = schedule.base;
  if (schedule.exp_a > 0.0) {
    if (schedule.ell < 2)
      throw ConfigError("step_size: geometric exponent needs ell >= 2");
    delta *= std::pow(binom2(schedule.ell),
                      schedule.exp_a * std::pow(schedule.exp_rho,
                                                static_cast<double>(k)) -
                          1.0);
  }
  switch (schedule.kind) {
    case ScheduleKind::ConstantHorizon: {
      if (schedule.horizon < 0)
        throw ConfigError("step_size: constant-horizon schedule needs T >= 0");
      return delta /
             std::sqrt(schedule.ell * (static_cast<double>(schedule.horizon) + 1.0));
    }
    case ScheduleKind::Diminishing:
      return delta / std::sqrt(schedule.ell * (static_cast<double>(k) + 1.0));
    case ScheduleKind::LogDamped: {
      const double t = static_cast<double>(k) + 2.0;
      return delta / (std::sqrt(t) * std::log(t));
    }
  }
  throw ConfigError("step_size: unknown schedule kind");
}

RunTrace run_rssm(const ProblemOracle& problem, const StiefelPoint& X0,
                  const Partition& partition, const SolverConfig& config) {
  validate_common(config);
  if (partition.ell() < 2) throw ConfigError("run_rssm: need ell >= 2");
  if (partition.p() != X0.cols() || problem.rows() != X0.rows() ||
      problem.cols() != X0.cols())
    throw DimensionError("run_rssm: problem/initial point/partition mismatch");

  Rng rng(config.seed);
  FlopCounter total, update;
  auto session = problem.make_session(X0.matrix());
  const double gamma_cap = 0.999 / problem.lipschitz_bound();
  auto effective_gamma = [&](long k) {
    const double gamma = step_size(config.schedule, k);
    return (config.enforce_lipschitz && gamma > gamma_cap) ? gamma_cap : gamma;
  };

  StiefelPoint X = X0;
  Telemetry telemetry;
  telemetry.trace.seed = config.seed;
  telemetry.record(problem, *session, X, 0, effective_gamma(0), total, update);

  for (long k = 0; k < config.max_iters; ++k) {
    const double gamma = effective_gamma(k);

    const BlockPair pair = sample_pair(partition, rng);
    const Matrix g_cols = session->partial_subgradient(pair.columns, &total);
    const BlockTangent g = block_tangent_project(X, pair, g_cols, &update);
    X = rssm_block_step(X, pair, g, gamma, &update);
    session->commit_block_update(pair.columns, X.matrix(), &total);

    const long done = k + 1;
    if (done % config.feasibility_check_interval == 0)
      check_drift(X, config, telemetry.trace, done);
    const bool out_of_flops =
        config.max_flops > 0 && total.count() + update.count() >= config.max_flops;
    if (done % config.stride == 0 || done == config.max_iters || out_of_flops)
      telemetry.record(problem, *session, X, done, effective_gamma(done),
                       total, update);
    if (out_of_flops) break;
  }

  telemetry.trace.final_point = X.matrix();
  return telemetry.trace;
}

RunTrace run_rsm(const ProblemOracle& problem, const StiefelPoint& X0,
                 const SolverConfig& config) {
  validate_common(config);
  if (problem.rows() != X0.rows() || problem.cols() != X0.cols())
    throw DimensionError("run_rsm: problem/initial point mismatch");

  FlopCounter total, update;
  auto session = problem.make_session(X0.matrix());
  const double gamma_cap = 0.999 / problem.lipschitz_bound();
  auto effective_gamma = [&](long k) {
    const double gamma = step_size(config.schedule, k);
    return (config.enforce_lipschitz && gamma > gamma_cap) ? gamma_cap : gamma;
  };

  StiefelPoint X = X0;
  Telemetry telemetry;
  telemetry.trace.seed = config.seed;
  telemetry.record(problem, *session, X, 0, effective_gamma(0), total, update);

  for (long k = 0; k < config.max_iters; ++k) {
    const double gamma = effective_gamma(k);

    const Matrix g = session->full_subgradient(&total);
    const Matrix g_r = riemannian_subgradient(X, g, &update);
    X = retract(X, Matrix(-gamma * g_r), &update);
    session->reset(X.matrix(), &total);

    const long done = k + 1;
    if (done % config.feasibility_check_interval == 0)
      check_drift(X, config, telemetry.trace, done);
    const bool out_of_flops =
        config.max_flops > 0 && total.count() + update.count() >= config.max_flops;
    if (done % config.stride == 0 || done == config.max_iters || out_of_flops)
      telemetry.record(problem, *session, X, done, effective_gamma(done),
                       total, update);
    if (out_of_flops) break;
  }

  telemetry.trace.final_point = X.matrix();
  return telemetry.trace;
}

}  // namespace rssm
