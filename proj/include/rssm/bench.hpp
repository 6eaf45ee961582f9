#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rssm/io.hpp"
#include "rssm/solvers.hpp"

namespace rssm {

/// One experiment grid: a problem instance (generated or loaded) crossed with
/// methods, block counts, and seeds. Mirrors the CLI flags one to one.
struct ExperimentConfig {
  std::string problem = "rsr";  // "rsr" | "odl"

  // rsr dims
  int n = 100, d = 10, m1 = 1500, m2 = 3500;
  // odl dims (n is shared)
  int m = 4648;
  double theta = 0.3;

  std::vector<std::string> methods = {"rssm"};
  std::vector<int> ells = {3};
  std::vector<std::uint64_t> seeds = {0};

  std::string schedule = "logdamped";  // const | dimin | logdamped
  double c = 0.9;
  double a = 0.0;
  double rho = 0.991;
  double delta = 0.0;  // overrides c when > 0 (constant-horizon Δ)
  long horizon = 0;

  long iters = 20000;
  long stride = 10;
  bool enforce_lipschitz = false;
  bool shuffle_partition = false;
  int jobs = 1;
  std::uint64_t max_flops = 0;  // 0 = iteration-bounded only

  std::string out_dir = "out";
  std::string save_instance;
  std::string load_instance;
};

struct CellResult {
  std::string method;
  int ell = 0;  // 0 for rsm cells (no partition)
  std::uint64_t seed = 0;
  std::uint64_t cell_seed = 0;
  RunTrace trace;
  std::string csv_path;
};

/// Runs every (method, ell, seed) cell, writes one CSV per cell plus a
/// manifest JSON, and returns the per-cell traces. Cells run on `jobs` worker
/// threads; each owns its RNG and trace, seeded deterministically from the
/// listed seed and the cell's (method, ell) index.
std::vector<CellResult> run_grid(const ExperimentConfig& config);

/// Size-guarded diagnostic suite (spectrum, commutation, inverse round-trip,
/// difference identity, subgradient-average identities, prox smoke test).
/// Prints one JSON report line per check; returns true when all pass.
bool selftest(std::ostream& os);

std::string version_string();

}  // namespace rssm
