#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "locstat/io.hpp"

namespace py = pybind11;
using namespace locstat;

namespace {

std::pair<VecD, VecD> simulate_from_json(const std::string& config, int n, std::uint64_t seed) {
    const RunConfig cfg = parse_config_text(config);
    const Trajectory traj = simulate(cfg.require_model(), n, seed);
    return {traj.values, traj.aux.value_or(VecD{})};
}

std::string estimate_from_json(const std::string& config, const VecD& series) {
    const RunConfig cfg = parse_config_text(config);
    const ModelSpec model = cfg.require_model();
    const EstimatorConfig est = cfg.estimator_config(model);
    Trajectory traj;
    traj.n = static_cast<int>(series.size());
    traj.values = series;
    const EstimateCurve curve = estimate_curve(traj, est);
    return curve_to_json(curve, contrast_name(est.contrast.kind), est.kernel.name(), std::nullopt);
}

std::string run_mc_from_json(const std::string& config, int threads) {
    const RunConfig cfg = parse_config_text(config);
    McScenario sc = cfg.mc_scenario();
    sc.threads = threads;
    return rmise_report_to_json(run_mc(sc));
}

std::string check_from_json(const std::string& config) {
    const RunConfig cfg = parse_config_text(config);
    return check_report_to_json(check_admissible(cfg.require_model()));
}

std::tuple<std::vector<int>, VecD, VecD> tau_from_json(const std::string& config) {
    const RunConfig cfg = parse_config_text(config);
    const TauEstimate tau = estimate_tau(cfg.require_model(), cfg.tau_u, cfg.tau_smax, cfg.tau_p,
                                         cfg.tau_reps, cfg.tau_burn, cfg.tau_seed);
    return {tau.lags, tau.tau_hat, tau.lambda};
}

VecD scenario_path_eval(const std::string& scenario, double u) {
    return builtin_scenario(scenario_from_name(scenario)).path.eval(u);
}

}  // namespace

PYBIND11_MODULE(locstat, m) {
    m.doc() = "Simulation and kernel-localized contrast estimation of locally stationary time series";

    m.def("kernel_eval",
          [](const std::string& name, double x) { return kernel_eval(KernelSpec::from_name(name), x); },
          py::arg("kernel"), py::arg("x"));
    m.def("kernel_l2_squared",
          [](const std::string& name) { return kernel_l2_squared(KernelSpec::from_name(name)); },
          py::arg("kernel"));
    m.def("bandwidth", &bandwidth, py::arg("n"), py::arg("lam"));
    m.def("scenario_path", &scenario_path_eval, py::arg("scenario"), py::arg("u"),
          "True parameter curve of a builtin scenario at u");
    m.def("simulate_scenario",
          [](const std::string& scenario, int n, std::uint64_t seed) {
              const Trajectory t = simulate(builtin_scenario(scenario_from_name(scenario)), n, seed);
              return std::make_pair(t.values, t.aux.value_or(VecD{}));
          },
          py::arg("scenario"), py::arg("n"), py::arg("seed"),
          "Returns (values, aux) for a builtin scenario");
    m.def("simulate", &simulate_from_json, py::arg("config_json"), py::arg("n"), py::arg("seed"),
          "Simulate a model described by a JSON config string");
    m.def("estimate_curve", &estimate_from_json, py::arg("config_json"), py::arg("series"),
          "Estimate parameter curves; returns the curve as a JSON string");
    m.def("run_mc", &run_mc_from_json, py::arg("config_json"), py::arg("threads") = 1,
          "Run a Monte Carlo RSMISE study; returns the report as a JSON string");
    m.def("check_admissible", &check_from_json, py::arg("config_json"),
          "Admissibility verdict for the configured model, as a JSON string");
    m.def("estimate_tau", &tau_from_json, py::arg("config_json"),
          "Coupling tau diagnostic; returns (lags, tau_hat, lambda_bound)");
    m.def("ar1_asymptotic_sd",
          [](double theta, const std::string& kernel, int n, double lam) {
              return ar1_asymptotic_sd(theta, KernelSpec::from_name(kernel), n, lam);
          },
          py::arg("theta"), py::arg("kernel"), py::arg("n"), py::arg("lam"));
}
