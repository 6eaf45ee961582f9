#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "rssm/bench.hpp"
#include "rssm/diagnostics.hpp"
#include "rssm/errors.hpp"
#include "rssm/io.hpp"

namespace py = pybind11;
using namespace rssm;

namespace {

StepSchedule make_schedule(const std::string& kind, double base, double a,
                           double rho, long horizon, int ell) {
  StepSchedule s;
  if (kind == "const")
    s.kind = ScheduleKind::ConstantHorizon;
  else if (kind == "dimin")
    s.kind = ScheduleKind::Diminishing;
  else if (kind == "logdamped")
    s.kind = ScheduleKind::LogDamped;
  else
    throw ConfigError("unknown schedule kind: " + kind);
  s.base = base;
  s.exp_a = a;
  s.exp_rho = rho;
  s.horizon = horizon;
  s.ell = ell;
  return s;
}

py::dict trace_to_dict(const RunTrace& trace) {
  std::vector<long> iters;
  std::vector<double> flops, update_flops, seconds, f, err, proxy, step;
  for (const auto& r : trace.records) {
    iters.push_back(r.iter);
    flops.push_back(r.flops);
    update_flops.push_back(r.update_flops);
    seconds.push_back(r.seconds);
    f.push_back(r.f);
    err.push_back(r.err);
    proxy.push_back(r.proxy);
    step.push_back(r.step);
  }
  py::dict d;
  d["iter"] = iters;
  d["flops"] = flops;
  d["update_flops"] = update_flops;
  d["seconds"] = seconds;
  d["f"] = f;
  d["err"] = err;
  d["proxy"] = proxy;
  d["step"] = step;
  d["final_point"] = trace.final_point;
  d["seed"] = trace.seed;
  d["max_feasibility_error"] = trace.max_feasibility_error;
  return d;
}

template <typename Oracle, typename InstancePtr>
py::dict run_rssm_py(InstancePtr inst, const Matrix& X0, int ell,
                     const std::string& schedule, double c, double a,
                     double rho, long horizon, long iters, std::uint64_t seed,
                     long stride, bool enforce_lipschitz,
                     std::uint64_t max_flops, bool shuffle_partition) {
  Oracle oracle(std::move(inst));
  const int p = static_cast<int>(X0.cols());
  SolverConfig cfg;
  cfg.schedule = make_schedule(schedule, c, a, rho, horizon, ell);
  cfg.max_iters = iters;
  cfg.seed = seed;
  cfg.stride = stride;
  cfg.enforce_lipschitz = enforce_lipschitz;
  cfg.max_flops = max_flops;
  Rng part_rng = Rng(seed).split(0x7a7);
  const Partition partition = shuffle_partition
                                  ? make_shuffled_partition(p, ell, part_rng)
                                  : make_uniform_partition(p, ell);
  return trace_to_dict(run_rssm(oracle, StiefelPoint(X0), partition, cfg));
}

template <typename Oracle, typename InstancePtr>
py::dict run_rsm_py(InstancePtr inst, const Matrix& X0,
                    const std::string& schedule, double c, double a,
                    double rho, long horizon, long iters, std::uint64_t seed,
                    long stride, bool enforce_lipschitz,
                    std::uint64_t max_flops) {
  Oracle oracle(std::move(inst));
  SolverConfig cfg;
  cfg.schedule = make_schedule(schedule, c, a, rho, horizon, 1);
  cfg.max_iters = iters;
  cfg.seed = seed;
  cfg.stride = stride;
  cfg.enforce_lipschitz = enforce_lipschitz;
  cfg.max_flops = max_flops;
  return trace_to_dict(run_rsm(oracle, StiefelPoint(X0), cfg));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Randomized submanifold subgradient method on the Stiefel "
            "manifold: geometric kernels, solvers, and the two benchmark "
            "problems.";
  m.attr("__version__") = version_string();

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<SingularityError>(m, "SingularityError",
                                           PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  // Matrix kernels.
  m.def("sym", &sym, py::arg("M"));
  m.def("skew", &skew, py::arg("M"));
  m.def("inv_sqrt", [](const Matrix& S) { return inv_sqrt(S); }, py::arg("S"));
  m.def("polar_project", [](const Matrix& A) { return polar_project(A); },
        py::arg("A"));
  m.def("nuclear_norm", &nuclear_norm, py::arg("M"));
  m.def("operator_norm", &operator_norm, py::arg("M"));

  // Stiefel geometry; points cross the boundary as plain numpy arrays.
  m.def("random_stiefel",
        [](int n, int p, std::uint64_t seed) {
          Rng rng(seed);
          return random_stiefel(n, p, rng).matrix();
        },
        py::arg("n"), py::arg("p"), py::arg("seed") = 0);
  m.def("feasibility_error",
        [](const Matrix& X) {
          return StiefelPoint(X, StiefelPoint::unchecked).feasibility_error();
        },
        py::arg("X"));
  m.def("tangent_project",
        [](const Matrix& X, const Matrix& xi) {
          return tangent_project(StiefelPoint(X), xi);
        },
        py::arg("X"), py::arg("xi"));
  m.def("retract",
        [](const Matrix& X, const Matrix& xi) {
          return retract(StiefelPoint(X), xi).matrix();
        },
        py::arg("X"), py::arg("xi"));
  m.def("riemannian_subgradient",
        [](const Matrix& X, const Matrix& g) {
          return riemannian_subgradient(StiefelPoint(X), g);
        },
        py::arg("X"), py::arg("g"));
  m.def("stationarity_proxy",
        [](const Matrix& X, const Matrix& g) {
          return stationarity_proxy(StiefelPoint(X), g);
        },
        py::arg("X"), py::arg("g"));

  m.def("make_uniform_partition",
        [](int p, int ell) { return make_uniform_partition(p, ell).blocks(); },
        py::arg("p"), py::arg("ell"));

  // Problems.
  py::class_<RsrInstance, std::shared_ptr<RsrInstance>>(m, "RsrInstance")
      .def_readonly("data", &RsrInstance::data)
      .def_readonly("basis", &RsrInstance::basis)
      .def_readonly("n", &RsrInstance::n)
      .def_readonly("d", &RsrInstance::d)
      .def_readonly("m1", &RsrInstance::m1)
      .def_readonly("m2", &RsrInstance::m2)
      .def_property_readonly("p", &RsrInstance::p)
      .def_property_readonly("m", &RsrInstance::m);
  py::class_<OdlInstance, std::shared_ptr<OdlInstance>>(m, "OdlInstance")
      .def_readonly("data", &OdlInstance::data)
      .def_readonly("dictionary", &OdlInstance::dictionary)
      .def_readonly("theta", &OdlInstance::theta)
      .def_readonly("n", &OdlInstance::n)
      .def_readonly("m", &OdlInstance::m);

  m.def("gen_rsr",
        [](int n, int d, int m1, int m2, std::uint64_t seed) {
          Rng rng(seed);
          return std::make_shared<RsrInstance>(gen_rsr(n, d, m1, m2, rng));
        },
        py::arg("n"), py::arg("d"), py::arg("m1"), py::arg("m2"),
        py::arg("seed") = 0);
  m.def("gen_odl",
        [](int n, int m_, double theta, std::uint64_t seed) {
          Rng rng(seed);
          return std::make_shared<OdlInstance>(gen_odl(n, m_, theta, rng));
        },
        py::arg("n"), py::arg("m"), py::arg("theta") = 0.3, py::arg("seed") = 0);

  m.def("rsr_value", &rsr_value);
  m.def("rsr_subgradient", &rsr_subgradient);
  m.def("rsr_init",
        [](const RsrInstance& inst) { return rsr_init(inst).matrix(); });
  m.def("rsr_error", &rsr_error);
  m.def("odl_value", &odl_value);
  m.def("odl_subgradient", &odl_subgradient);
  m.def("odl_error", &odl_error);

  m.def("save_rsr", &save_rsr);
  m.def("load_rsr", [](const std::string& path) {
    return std::make_shared<RsrInstance>(load_rsr(path));
  });
  m.def("save_odl", &save_odl);
  m.def("load_odl", [](const std::string& path) {
    return std::make_shared<OdlInstance>(load_odl(path));
  });

  // Solvers (overloaded on the instance type).
  m.def("run_rssm", &run_rssm_py<RsrOracle, std::shared_ptr<const RsrInstance>>,
        py::arg("instance"), py::arg("X0"), py::arg("ell") = 3,
        py::arg("schedule") = "logdamped", py::arg("c") = 0.9,
        py::arg("a") = 0.0, py::arg("rho") = 0.991, py::arg("horizon") = 0,
        py::arg("iters") = 1000, py::arg("seed") = 0, py::arg("stride") = 10,
        py::arg("enforce_lipschitz") = false, py::arg("max_flops") = 0,
        py::arg("shuffle_partition") = false);
  m.def("run_rssm", &run_rssm_py<OdlOracle, std::shared_ptr<const OdlInstance>>,
        py::arg("instance"), py::arg("X0"), py::arg("ell") = 3,
        py::arg("schedule") = "logdamped", py::arg("c") = 0.9,
        py::arg("a") = 0.0, py::arg("rho") = 0.991, py::arg("horizon") = 0,
        py::arg("iters") = 1000, py::arg("seed") = 0, py::arg("stride") = 10,
        py::arg("enforce_lipschitz") = false, py::arg("max_flops") = 0,
        py::arg("shuffle_partition") = false);
  m.def("run_rsm", &run_rsm_py<RsrOracle, std::shared_ptr<const RsrInstance>>,
        py::arg("instance"), py::arg("X0"), py::arg("schedule") = "logdamped",
        py::arg("c") = 0.9, py::arg("a") = 0.0, py::arg("rho") = 0.991,
        py::arg("horizon") = 0, py::arg("iters") = 1000, py::arg("seed") = 0,
        py::arg("stride") = 10, py::arg("enforce_lipschitz") = false,
        py::arg("max_flops") = 0);
  m.def("run_rsm", &run_rsm_py<OdlOracle, std::shared_ptr<const OdlInstance>>,
        py::arg("instance"), py::arg("X0"), py::arg("schedule") = "logdamped",
        py::arg("c") = 0.9, py::arg("a") = 0.0, py::arg("rho") = 0.991,
        py::arg("horizon") = 0, py::arg("iters") = 1000, py::arg("seed") = 0,
        py::arg("stride") = 10, py::arg("enforce_lipschitz") = false,
        py::arg("max_flops") = 0);

  m.def("step_size",
        [](const std::string& schedule, double c, double a, double rho,
           long horizon, int ell, long k) {
          return step_size(make_schedule(schedule, c, a, rho, horizon, ell), k);
        },
        py::arg("schedule"), py::arg("c"), py::arg("a") = 0.0,
        py::arg("rho") = 0.991, py::arg("horizon") = 0, py::arg("ell") = 1,
        py::arg("k") = 0);
}
