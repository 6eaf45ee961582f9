#include "rssm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "rssm/diagnostics.hpp"
#include "rssm/errors.hpp"
#include "rssm/log.hpp"

#ifndef RSSM_VERSION
#define RSSM_VERSION "0.0.0"
#endif

namespace rssm {

namespace {

StepSchedule build_schedule(const ExperimentConfig& cfg, int ell) {
  StepSchedule s;
  if (cfg.schedule == "const")
    s.kind = ScheduleKind::ConstantHorizon;
  else if (cfg.schedule == "dimin")
    s.kind = ScheduleKind::Diminishing;
  else if (cfg.schedule == "logdamped")
    s.kind = ScheduleKind::LogDamped;
  else
    throw ConfigError("unknown schedule: " + cfg.schedule);
  s.base = cfg.delta > 0.0 ? cfg.delta : cfg.c;
  // The geometric exponent rides on C(ell,2); rsm cells (ell = 1) use the
  // plain Delta_k = c, matching how the experiments configure the baseline.
  s.exp_a = ell >= 2 ? cfg.a : 0.0;
  s.exp_rho = cfg.rho;
  s.horizon = cfg.horizon > 0 ? cfg.horizon : cfg.iters;
  s.ell = ell;
  return s;
}

struct CellSpec {
  std::string method;
  int ell = 0;  // 0 = no partition (rsm)
  std::uint64_t seed = 0;
  std::uint64_t cell_seed = 0;
  std::size_t combo_index = 0;
};

std::string cell_csv_name(const ExperimentConfig& cfg, const CellSpec& cell) {
  std::string name = cfg.problem + "_" + cell.method;
  if (cell.ell > 0) name += "_ell" + std::to_string(cell.ell);
  name += "_seed" + std::to_string(cell.seed) + ".csv";
  return name;
}

nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["problem"] = cfg.problem;
  if (cfg.problem == "rsr")
    j["dims"] = {{"n", cfg.n}, {"d", cfg.d}, {"m1", cfg.m1}, {"m2", cfg.m2}};
  else
    j["dims"] = {{"n", cfg.n}, {"m", cfg.m}, {"theta", cfg.theta}};
  j["methods"] = cfg.methods;
  j["ells"] = cfg.ells;
  j["seeds"] = cfg.seeds;
  j["schedule"] = {{"kind", cfg.schedule}, {"c", cfg.c},     {"a", cfg.a},
                   {"rho", cfg.rho},       {"delta", cfg.delta},
                   {"horizon", cfg.horizon}};
  j["iters"] = cfg.iters;
  j["stride"] = cfg.stride;
  j["enforce_lipschitz"] = cfg.enforce_lipschitz;
  j["shuffle_partition"] = cfg.shuffle_partition;
  j["jobs"] = cfg.jobs;
  j["max_flops"] = cfg.max_flops;
  return j;
}

}  // namespace

std::string version_string() { return std::string("rssm ") + RSSM_VERSION; }

std::vector<CellResult> run_grid(const ExperimentConfig& cfg) {
  if (cfg.problem != "rsr" && cfg.problem != "odl")
    throw ConfigError("unknown problem: " + cfg.problem);
  if (cfg.methods.empty()) throw ConfigError("no methods selected");
  if (cfg.seeds.empty()) throw ConfigError("no seeds given");
  for (const auto& m : cfg.methods)
    if (m != "rssm" && m != "rsm") throw ConfigError("unknown method: " + m);

  // Instance: generated from the first listed seed, or loaded.
  std::shared_ptr<const RsrInstance> rsr;
  std::shared_ptr<const OdlInstance> odl;
  if (!cfg.load_instance.empty()) {
    if (cfg.problem == "rsr")
      rsr = std::make_shared<const RsrInstance>(load_rsr(cfg.load_instance));
    else
      odl = std::make_shared<const OdlInstance>(load_odl(cfg.load_instance));
  } else {
    Rng gen_rng = Rng(cfg.seeds.front()).split(0x9e0);
    if (cfg.problem == "rsr")
      rsr = std::make_shared<const RsrInstance>(
          gen_rsr(cfg.n, cfg.d, cfg.m1, cfg.m2, gen_rng));
    else
      odl = std::make_shared<const OdlInstance>(
          gen_odl(cfg.n, cfg.m, cfg.theta, gen_rng));
  }
  if (!cfg.save_instance.empty()) {
    if (rsr)
      save_rsr(*rsr, cfg.save_instance);
    else
      save_odl(*odl, cfg.save_instance);
    log_info("instance saved to " + cfg.save_instance);
  }

  std::unique_ptr<ProblemOracle> oracle;
  if (rsr)
    oracle = std::make_unique<RsrOracle>(rsr);
  else
    oracle = std::make_unique<OdlOracle>(odl);

  // Shared initial points: RSR uses the spectral init; ODL draws one uniform
  // orthogonal X0 per listed seed, shared by both methods.
  const int p = static_cast<int>(oracle->cols());
  const int n = static_cast<int>(oracle->rows());
  std::shared_ptr<const StiefelPoint> rsr_x0;
  if (rsr) rsr_x0 = std::make_shared<const StiefelPoint>(rsr_init(*rsr));
  auto odl_x0_for = [&](std::uint64_t seed) {
    Rng r = Rng(seed).split(0x1517);
    return random_stiefel(n, p, r);
  };

  // Cell list: rssm crosses ells x seeds; rsm has no partition and one cell
  // per seed. Cell seeds mix the listed seed with the (method, ell) combo
  // index so cells never share streams.
  std::vector<CellSpec> cells;
  std::size_t combo = 0;
  for (const auto& method : cfg.methods) {
    if (method == "rssm") {
      for (int ell : cfg.ells) {
        for (auto seed : cfg.seeds) {
          CellSpec cell{method, ell, seed, Rng(seed).split(combo).seed(), combo};
          cells.push_back(cell);
        }
        ++combo;
      }
    } else {
      for (auto seed : cfg.seeds) {
        CellSpec cell{method, 0, seed, Rng(seed).split(combo).seed(), combo};
        cells.push_back(cell);
      }
      ++combo;
    }
  }

  std::filesystem::create_directories(cfg.out_dir);
  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      const CellSpec& cell = cells[idx];
      try {
        SolverConfig sc;
        sc.schedule = build_schedule(cfg, cell.ell > 0 ? cell.ell : 1);
        sc.max_iters = cfg.iters;
        sc.seed = cell.cell_seed;
        sc.stride = cfg.stride;
        sc.enforce_lipschitz = cfg.enforce_lipschitz;
        sc.max_flops = cfg.max_flops;

        const StiefelPoint x0 =
            rsr ? *rsr_x0 : odl_x0_for(cell.seed);

        RunTrace trace;
        if (cell.method == "rssm") {
          Rng part_rng = Rng(cell.cell_seed).split(0x7a7);
          const Partition partition =
              cfg.shuffle_partition
                  ? make_shuffled_partition(p, cell.ell, part_rng)
                  : make_uniform_partition(p, cell.ell);
          trace = run_rssm(*oracle, x0, partition, sc);
        } else {
          trace = run_rsm(*oracle, x0, sc);
        }

        CellResult res;
        res.method = cell.method;
        res.ell = cell.ell;
        res.seed = cell.seed;
        res.cell_seed = cell.cell_seed;
        res.csv_path =
            (std::filesystem::path(cfg.out_dir) / cell_csv_name(cfg, cell))
                .string();
        emit_csv(trace, res.csv_path);
        res.trace = std::move(trace);
        results[idx] = std::move(res);
        log_info("cell done: " + results[idx].csv_path);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  nlohmann::json manifest = config_json(cfg);
  manifest["version"] = version_string();
  manifest["instance"] =
      cfg.load_instance.empty() ? std::string("generated") : cfg.load_instance;
  if (!cfg.save_instance.empty()) manifest["instance_saved_to"] = cfg.save_instance;
  manifest["runs"] = nlohmann::json::array();
  for (const auto& res : results)
    manifest["runs"].push_back({{"method", res.method},
                                {"ell", res.ell},
                                {"seed", res.seed},
                                {"cell_seed", res.cell_seed},
                                {"csv", res.csv_path}});
  const auto manifest_path =
      (std::filesystem::path(cfg.out_dir) / "manifest.json").string();
  std::ofstream os(manifest_path);
  if (!os) throw IoError("cannot write manifest: " + manifest_path);
  os << manifest.dump(2) << "\n";
  log_info("manifest written to " + manifest_path);
  return results;
}

bool selftest(std::ostream& os) {
  bool ok = true;
  Rng rng(20240901);

  // Averaging-operator spectrum on the small grid.
  for (const auto& [n, p, ell] :
       std::vector<std::tuple<int, int, int>>{{5, 3, 3}, {6, 4, 2}, {8, 6, 3}}) {
    const StiefelPoint X = random_stiefel(n, p, rng);
    const AveragingContext ctx(X, make_uniform_partition(p, ell));
    const SpectrumReport report = spectrum_check(ctx);
    os << to_json(report) << "\n";
    ok = ok && report.pass;
  }

  // Commutation, inverse round-trip, and the difference identity.
  for (int ell : {2, 3, 5}) {
    const int n = 7, p = 5;
    const StiefelPoint X = random_stiefel(n, p, rng);
    const AveragingContext ctx(X, make_uniform_partition(p, ell));
    Matrix xi(n, p);
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < n; ++i) xi(i, j) = rng.gaussian();

    const CommutationReport comm = commutation_check(ctx, xi);
    os << to_json(comm) << "\n";
    ok = ok && comm.pass;

    const Matrix round_trip = apply_averaging(ctx, apply_averaging_inverse(ctx, xi));
    const double rt_err = (round_trip - xi).norm();
    ok = ok && rt_err <= 1e-10;

    const StiefelPoint Y = random_stiefel(n, p, rng);
    const AveragingContext ctx_y(Y, ctx.partition());
    const Matrix lhs =
        apply_averaging_inverse(ctx_y, xi) - apply_averaging_inverse(ctx, xi);
    const Matrix J_minus_I = Matrix::Ones(ell, ell) - Matrix::Identity(ell, ell);
    auto psi = [&](const StiefelPoint& Z) {
      return Matrix(Z.matrix() *
                    block_hadamard(J_minus_I,
                                   Matrix(Z.matrix().transpose() * xi),
                                   ctx.partition()));
    };
    const Matrix rhs = 0.5 * ell * (ell - 2.0) * (psi(Y) - psi(X));
    const double diff_err = (lhs - rhs).norm();
    ok = ok && diff_err <= 1e-10;
    os << "{\"kind\":\"inverse_identities\",\"ell\":" << ell
       << ",\"round_trip_error\":" << rt_err
       << ",\"difference_identity_error\":" << diff_err << "}\n";
  }

  // Averaged-subgradient identities on both problem oracles.
  {
    Rng gen = rng.split(11);
    auto rsr = std::make_shared<const RsrInstance>(gen_rsr(8, 2, 30, 40, gen));
    RsrOracle rsr_oracle(rsr);
    const StiefelPoint X = random_stiefel(8, 6, gen);
    const AveragingContext ctx(X, make_uniform_partition(6, 3));
    Matrix eta(8, 6);
    for (int j = 0; j < 6; ++j)
      for (int i = 0; i < 8; ++i) eta(i, j) = gen.gaussian();
    const auto rep =
        subgradient_average_check(ctx, rsr_oracle.subgradient(X.matrix()), eta);
    os << "{\"kind\":\"subgradient_average\",\"problem\":\"rsr\",\"inner_error\":"
       << rep.inner_error << ",\"norm_error\":" << rep.norm_error
       << ",\"pass\":" << (rep.pass ? "true" : "false") << "}\n";
    ok = ok && rep.pass;

    auto odl = std::make_shared<const OdlInstance>(gen_odl(8, 40, 0.3, gen));
    OdlOracle odl_oracle(odl);
    const auto rep2 =
        subgradient_average_check(ctx, odl_oracle.subgradient(X.matrix()), eta);
    os << "{\"kind\":\"subgradient_average\",\"problem\":\"odl\",\"inner_error\":"
       << rep2.inner_error << ",\"norm_error\":" << rep2.norm_error
       << ",\"pass\":" << (rep2.pass ? "true" : "false") << "}\n";
    ok = ok && rep2.pass;
  }

  // Adaptive prox smoke test on a 5x2 toy.
  {
    Rng gen = rng.split(12);
    auto inst = std::make_shared<const RsrInstance>(gen_rsr(5, 3, 12, 12, gen));
    RsrOracle oracle(inst);
    const StiefelPoint X = random_stiefel(5, 2, gen);
    const AveragingContext ctx(X, make_uniform_partition(2, 2));
    const double lambda = 0.5 * lambda_window_edge(oracle, 2);
    ProxOptions opts;
    opts.budget = 20000;
    const ProxResult prox = adaptive_prox(oracle, ctx, lambda, opts);
    os << to_json(prox) << "\n";
    const double L = oracle.lipschitz_bound();
    const double displacement = (prox.prox_point - X.matrix()).norm();
    const bool prox_ok =
        prox.envelope <= oracle.value(X.matrix()) + 1e-9 &&
        displacement <= 4.0 * lambda * L / 2.0 + 10.0 * prox.inner_residual + 1e-6;
    ok = ok && prox_ok;
  }

  os << (ok ? "selftest: all checks passed\n" : "selftest: FAILURES\n");
  return ok;
}

}  // namespace rssm
