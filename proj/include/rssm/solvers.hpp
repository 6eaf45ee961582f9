#pragma once

#include <cstdint>
#include <vector>

#include "rssm/blocks.hpp"
#include "rssm/oracle.hpp"

namespace rssm {

enum class ScheduleKind { ConstantHorizon, Diminishing, LogDamped };

/// Stepsize generator. The base magnitude Δ_k is the constant `base` when
/// exp_a == 0, and the geometric interpolation base·C(ell,2)^{exp_a·exp_rho^k - 1}
/// otherwise. The three kinds emit
///   constant-horizon:  Δ_k / √(ell (T+1))
///   diminishing:       Δ_k / √(ell (k+1))
///   log-damped:        Δ_k / (√(k+2) log(k+2))
struct StepSchedule {
  ScheduleKind kind = ScheduleKind::Diminishing;
  double base = 1.0;
  double exp_a = 0.0;
  double exp_rho = 0.991;
  long horizon = 0;  // T, constant-horizon only
  int ell = 1;       // block count entering the √(ell·) factors
};

double step_size(const StepSchedule& schedule, long k);

struct SolverConfig {
  StepSchedule schedule;
  long max_iters = 1000;
  std::uint64_t seed = 0;
  long stride = 10;  // telemetry stride
  bool enforce_lipschitz = false;  // clip γ_k at 0.999/L
  long feasibility_check_interval = 100;
  double feasibility_tol = 1e-8;  // hard failure threshold for drift
  std::uint64_t max_flops = 0;    // stop once total flops exceed; 0 = off
};

struct TraceRecord {
  long iter = 0;
  double flops = 0.0;         // total (oracle + update stage)
  double update_flops = 0.0;  // update stage only
  double seconds = 0.0;
  double f = 0.0;
  double err = 0.0;   // NaN when the oracle has no ground-truth metric
  double proxy = 0.0;  // ‖P_{T_X}(selected subgradient)‖_F
  double step = 0.0;   // γ at this iterate
};

struct RunTrace {
  std::vector<TraceRecord> records;
  Matrix final_point;
  std::uint64_t seed = 0;
  double max_feasibility_error = 0.0;
};

/// Randomized submanifold subgradient method: at each iteration draw a
/// uniform block pair, take the partial Riemannian subgradient step on the
/// submanifold block, and keep the other columns fixed. Deterministic given
/// the seed.
RunTrace run_rssm(const ProblemOracle& problem, const StiefelPoint& X0,
                  const Partition& partition, const SolverConfig& config);

/// Full Riemannian subgradient baseline: X⁺ = Retr_X(-γ P_{T_X}(∇f)).
RunTrace run_rsm(const ProblemOracle& problem, const StiefelPoint& X0,
                 const SolverConfig& config);

}  // namespace rssm
