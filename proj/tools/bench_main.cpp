#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rssm/bench.hpp"
#include "rssm/errors.hpp"
#include "rssm/log.hpp"

int main(int argc, char** argv) {
  CLI::App app{"RSSM / RSM benchmark runner for nonsmooth optimization over "
               "the Stiefel manifold"};
  app.set_version_flag("--version", rssm::version_string());

  rssm::ExperimentConfig cfg;
  bool run_selftest = false;

  app.add_option("--problem", cfg.problem, "Problem family")
      ->check(CLI::IsMember({"rsr", "odl"}));
  app.add_option("--n", cfg.n, "Ambient dimension");
  app.add_option("--d", cfg.d, "Inlier subspace dimension (rsr)");
  app.add_option("--m1", cfg.m1, "Inlier count (rsr)");
  app.add_option("--m2", cfg.m2, "Outlier count (rsr)");
  app.add_option("--m", cfg.m, "Sample count (odl)");
  app.add_option("--theta", cfg.theta, "Sparsity level (odl)");
  app.add_option("--ell", cfg.ells, "Block count(s) for rssm, repeatable");
  app.add_option("--method", cfg.methods, "Method(s): rssm, rsm; repeatable")
      ->check(CLI::IsMember({"rssm", "rsm"}));
  app.add_option("--schedule", cfg.schedule, "Stepsize schedule")
      ->check(CLI::IsMember({"const", "dimin", "logdamped"}));
  app.add_option("--c", cfg.c, "Base magnitude c of Delta_k");
  app.add_option("--a", cfg.a,
                 "Geometric exponent a in c*C(ell,2)^(a*rho^k - 1); 0 keeps "
                 "Delta_k = c");
  app.add_option("--rho", cfg.rho, "Geometric decay rho");
  app.add_option("--delta", cfg.delta,
                 "Constant Delta (overrides --c when positive)");
  app.add_option("--horizon", cfg.horizon, "Horizon T (const schedule)");
  app.add_option("--iters", cfg.iters, "Iteration budget per run");
  app.add_option("--seed", cfg.seeds, "Seed(s), repeatable");
  app.add_option("--stride", cfg.stride, "Telemetry stride");
  app.add_flag("--enforce-lipschitz", cfg.enforce_lipschitz,
               "Clip steps at 0.999/L");
  app.add_flag("--shuffle-partition", cfg.shuffle_partition,
               "Permute columns before forming blocks (seeded)");
  app.add_option("--jobs", cfg.jobs, "Worker threads across grid cells");
  app.add_option("--out", cfg.out_dir, "Output directory");
  app.add_option("--save-instance", cfg.save_instance,
                 "Write the generated instance to PATH");
  app.add_option("--load-instance", cfg.load_instance,
                 "Load the instance from PATH instead of generating");
  app.add_flag("--selftest", run_selftest,
               "Run the size-guarded diagnostic suite and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_selftest) return rssm::selftest(std::cout) ? 0 : 1;
    const auto results = rssm::run_grid(cfg);
    for (const auto& res : results) {
      const auto& last = res.trace.records.back();
      std::cout << res.method
                << (res.ell > 0 ? " ell=" + std::to_string(res.ell) : "")
                << " seed=" << res.seed << ": f=" << last.f
                << " err=" << last.err << " flops=" << last.flops
                << " -> " << res.csv_path << "\n";
    }
  } catch (const rssm::ConfigError& e) {
    rssm::log_error(e.what());
    return 2;
  } catch (const rssm::DimensionError& e) {
    rssm::log_error(e.what());
    return 2;
  } catch (const std::exception& e) {
    rssm::log_error(e.what());
    return 1;
  }
  return 0;
}
