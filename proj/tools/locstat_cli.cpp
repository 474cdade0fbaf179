#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "locstat/io.hpp"

namespace {

using namespace locstat;

constexpr int kExitOk = 0;
constexpr int kExitDegraded = 2;
constexpr int kExitModelFailure = 3;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

struct CommonArgs {
    std::string config_path;
    std::string scenario;
    int threads = 0;
};

RunConfig load_config(const CommonArgs& args) {
    if (!args.scenario.empty()) {
        RunConfig cfg;
        cfg.model = builtin_scenario(scenario_from_name(args.scenario));
        // Scenario defaults pair each model with its section-5 contrast.
        cfg.contrast_kind = cfg.model->family == Family::TvIngarch ? ContrastKind::PoissonQmle
                                                                   : ContrastKind::GaussianQmle;
        return cfg;
    }
    if (args.config_path.empty())
        throw config_error("either --config or --scenario is required");
    return parse_config_file(args.config_path);
}

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    return thread_count_from_env(1);
}

int cmd_simulate(const CommonArgs& common, const std::string& out, std::optional<int> n_override,
                 std::optional<std::uint64_t> seed_override) {
    RunConfig cfg = load_config(common);
    const ModelSpec model = cfg.require_model();
    const int n = n_override.value_or(cfg.sim_n);
    const std::uint64_t seed = seed_override.value_or(cfg.sim_seed);
    const Trajectory traj = simulate(model, n, seed);
    write_trajectory_csv(out, traj);
    std::cerr << "simulate: wrote " << n << " points to " << out << "\n";
    return kExitOk;
}

int run_estimation(const RunConfig& cfg, const VecD& series, const std::string& out_csv,
                   const std::string& out_json, bool svg, const std::string& prefix) {
    const ModelSpec model = cfg.require_model();
    const EstimatorConfig est = cfg.estimator_config(model);

    Trajectory traj;
    traj.n = static_cast<int>(series.size());
    traj.values = series;

    const EstimateCurve curve = estimate_curve(traj, est);

    // Advisory admissibility of the fitted curve (reported, never enforced).
    std::optional<AdmissibilityReport> advisory;
    {
        ModelSpec fitted = model;
        const EstimateCurve* cp = &curve;
        std::vector<VecD> thetas;
        VecD us;
        for (const auto& pt : cp->points) {
            us.push_back(pt.u);
            thetas.push_back(pt.theta);
        }
        if (!thetas.empty()) {
            const int dim = static_cast<int>(thetas.front().size());
            ParameterPath path;
            path.dim = dim;
            path.eval_into = [us, thetas, dim](double u, double* out) {
                // Piecewise-constant interpolation of the fitted curve.
                std::size_t idx = 0;
                while (idx + 1 < us.size() && us[idx + 1] <= u) ++idx;
                for (int k = 0; k < dim; ++k) out[k] = thetas[idx][static_cast<std::size_t>(k)];
            };
            fitted.path = path;
            advisory = check_admissible(fitted);
        }
    }

    if (!out_csv.empty()) write_curve_csv(out_csv, curve);
    if (!out_json.empty()) {
        std::ofstream jf(out_json, std::ios::binary);
        jf << curve_to_json(curve, contrast_name(est.contrast.kind), est.kernel.name(), advisory);
    }

    if (svg) {
        VecD us;
        for (const auto& pt : curve.points) us.push_back(pt.u);
        for (std::size_t c = 0; c < curve.components.size(); ++c) {
            VecD ys;
            for (const auto& pt : curve.points) ys.push_back(pt.theta[c]);
            write_svg_lines(prefix + "." + curve.components[c] + ".svg",
                            curve.components[c] + "(u)", us, {{curve.components[c], ys}});
        }
        // Persistence curve c1 + d1 for GARCH(1,1) fits.
        if (model.family == Family::TvGarch && model.p == 1 && model.q == 1) {
            VecD ys;
            for (const auto& pt : curve.points) ys.push_back(pt.theta[1] + pt.theta[2]);
            write_svg_lines(prefix + ".c1_plus_d1.svg", "c1(u) + d1(u)", us, {{"c1+d1", ys}});
        }
    }

    bool any_converged = false, all_degenerate = true;
    for (const auto& pt : curve.points) {
        any_converged = any_converged || pt.converged;
        all_degenerate = all_degenerate && pt.degenerate;
    }
    if (!any_converged || all_degenerate) {
        std::cerr << "estimate: degraded result (converged=" << any_converged
                  << ", degenerate=" << all_degenerate << ")\n";
        return kExitDegraded;
    }
    return kExitOk;
}

int cmd_estimate(const CommonArgs& common, const std::string& data, int column,
                 const std::string& out_csv, const std::string& out_json) {
    RunConfig cfg = load_config(common);
    const VecD series = load_series_csv(data, column, false);
    if (series.size() < 2) throw data_error("estimate: series too short", 0);
    return run_estimation(cfg, series, out_csv, out_json, false, "");
}

int cmd_fit(const CommonArgs& common, const std::string& data, int column, bool log_returns,
            const std::string& family, int p, int q, const std::string& contrast,
            const std::string& kernel, double lambda, const std::string& prefix, bool plot) {
    RunConfig cfg;
    if (!common.config_path.empty() || !common.scenario.empty()) {
        cfg = load_config(common);
    } else {
        ModelSpec m;
        m.family = family_from_name(family);
        m.p = p;
        m.q = q;
        // Placeholder truth path: fit only needs the family layout.
        std::vector<PathExpr> exprs;
        const auto box = ThetaBox::default_for(ContrastSpec::make(contrast_from_name(contrast),
                                                                  m.family, p, q));
        for (int i = 0; i < family_param_dim(m.family, p, q, 0, 0); ++i)
            exprs.push_back(PathExpr::constant(
                0.5 * (box.lower[static_cast<std::size_t>(i)] + box.upper[static_cast<std::size_t>(i)])));
        m.path = ParameterPath::from_exprs(std::move(exprs));
        cfg.model = m;
        cfg.contrast_kind = contrast_from_name(contrast);
        cfg.kernel = KernelSpec::from_name(kernel);
        cfg.lambda = lambda;
    }
    const VecD series = load_series_csv(data, column, log_returns);
    if (series.size() < 200)
        throw data_error("fit: need at least 200 observations (kernel windows degenerate); got " +
                             std::to_string(series.size()),
                         0);
    return run_estimation(cfg, series, prefix + ".curve.csv", prefix + ".curve.json", plot, prefix);
}

int cmd_mc(const CommonArgs& common, std::vector<int> ns, std::optional<int> reps,
           std::vector<std::string> kernel_names, std::optional<std::uint64_t> seed,
           const std::string& out, const std::string& table_out, int threads) {
    RunConfig cfg = load_config(common);
    McScenario sc = cfg.mc_scenario();
    if (!ns.empty()) sc.ns = ns;
    if (reps) sc.reps = *reps;
    if (!kernel_names.empty()) {
        sc.kernels.clear();
        for (const auto& k : kernel_names) sc.kernels.push_back(KernelSpec::from_name(k));
    }
    if (seed) sc.master_seed = *seed;
    sc.threads = threads;

    const RmiseReport report = run_mc(sc);
    if (!out.empty()) {
        std::ofstream f(out, std::ios::binary);
        f << rmise_report_to_json(report);
    } else {
        std::cout << rmise_report_to_json(report);
    }
    if (!table_out.empty()) {
        std::ofstream f(table_out, std::ios::binary);
        f << table_report(report, "csv");
    }
    std::cerr << "mc: " << sc.reps << " replications, wall " << report.wall_seconds << " s\n";
    if (report.any_unreliable()) {
        std::cerr << "mc: unreliable report (more than 5% exclusions)\n";
        return kExitDegraded;
    }
    return kExitOk;
}

int cmd_check(const CommonArgs& common, const std::string& out) {
    RunConfig cfg = load_config(common);
    const AdmissibilityReport report = check_admissible(cfg.require_model());
    const std::string text = check_report_to_json(report);
    if (!out.empty()) {
        std::ofstream f(out, std::ios::binary);
        f << text;
    } else {
        std::cout << text;
    }
    return kExitOk;
}

int cmd_tau(const CommonArgs& common, std::optional<double> u, std::optional<int> smax,
            std::optional<int> p, std::optional<int> reps, std::optional<int> burnin,
            std::optional<std::uint64_t> seed, const std::string& out) {
    RunConfig cfg = load_config(common);
    const ModelSpec model = cfg.require_model();
    const TauEstimate tau =
        estimate_tau(model, u.value_or(cfg.tau_u), smax.value_or(cfg.tau_smax),
                     p.value_or(cfg.tau_p), reps.value_or(cfg.tau_reps),
                     burnin.value_or(cfg.tau_burn), seed.value_or(cfg.tau_seed));
    write_tau_csv(out, tau);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"locstat: simulation and kernel-localized estimation of locally stationary time series"};
    app.require_subcommand(1);

    int threads_flag = 0;
    app.add_option("--threads", threads_flag, "worker threads (default: LOCSTAT_THREADS or 1)");

    CommonArgs common;
    auto add_common = [&common](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "JSON config file");
        sub->add_option("--scenario", common.scenario,
                        "builtin scenario: garch11_sec5 | archinf_sec5 | ingarch10_sec5");
    };

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate a trajectory to CSV");
    add_common(sim);
    std::string sim_out;
    std::optional<int> sim_n;
    std::optional<std::uint64_t> sim_seed;
    sim->add_option("--out", sim_out, "output CSV")->required();
    sim->add_option("--n", sim_n, "sample size override");
    sim->add_option("--seed", sim_seed, "seed override");

    // estimate
    auto* est = app.add_subcommand("estimate", "estimate parameter curves from a data CSV");
    add_common(est);
    std::string est_data, est_out, est_json;
    int est_column = -1;
    est->add_option("--data", est_data, "input CSV")->required();
    est->add_option("--column", est_column, "0-based column (default: last)");
    est->add_option("--out", est_out, "curve CSV output")->required();
    est->add_option("--json", est_json, "curve JSON output");

    // fit
    auto* fit = app.add_subcommand("fit", "fit a real series (optionally log-returns)");
    add_common(fit);
    std::string fit_data, fit_prefix = "fit", fit_family = "garch", fit_contrast = "gqmle",
                fit_kernel = "epanechnikov";
    int fit_column = -1, fit_p = 1, fit_q = 1;
    double fit_lambda = 0.35;
    bool fit_logret = false, fit_noplot = false;
    fit->add_option("--data", fit_data, "input CSV")->required();
    fit->add_option("--column", fit_column, "0-based column (default: last)");
    fit->add_flag("--log-returns", fit_logret, "transform to log-returns first");
    fit->add_option("--family", fit_family, "model family (default garch)");
    fit->add_option("--p", fit_p, "family order p");
    fit->add_option("--q", fit_q, "family order q");
    fit->add_option("--contrast", fit_contrast, "contrast (default gqmle)");
    fit->add_option("--kernel", fit_kernel, "kernel (default epanechnikov)");
    fit->add_option("--lambda", fit_lambda, "bandwidth exponent (default 0.35)");
    fit->add_option("--out", fit_prefix, "output prefix (default 'fit')");
    fit->add_flag("--no-plot", fit_noplot, "skip SVG emission");

    // mc
    auto* mc = app.add_subcommand("mc", "Monte Carlo RSMISE study");
    add_common(mc);
    std::vector<int> mc_ns;
    std::optional<int> mc_reps;
    std::vector<std::string> mc_kernels;
    std::optional<std::uint64_t> mc_seed;
    std::string mc_out, mc_table;
    mc->add_option("--n", mc_ns, "sample sizes (repeatable)");
    mc->add_option("--reps", mc_reps, "replications");
    mc->add_option("--kernel", mc_kernels, "kernels (repeatable)");
    mc->add_option("--seed", mc_seed, "master seed");
    mc->add_option("--out", mc_out, "report JSON output");
    mc->add_option("--table", mc_table, "table CSV output");

    // check
    auto* chk = app.add_subcommand("check", "admissibility check for a model/path");
    add_common(chk);
    std::string chk_out;
    chk->add_option("--out", chk_out, "JSON output (default stdout)");

    // tau
    auto* tau = app.add_subcommand("tau", "coupling-based tau dependence diagnostic");
    add_common(tau);
    std::optional<double> tau_u;
    std::optional<int> tau_smax, tau_p, tau_reps, tau_burn;
    std::optional<std::uint64_t> tau_seed;
    std::string tau_out;
    tau->add_option("--u", tau_u, "rescaled time point");
    tau->add_option("--smax", tau_smax, "maximum lag");
    tau->add_option("--p", tau_p, "moment order (1 or 2)");
    tau->add_option("--reps", tau_reps, "replications");
    tau->add_option("--burnin", tau_burn, "burn-in length");
    tau->add_option("--seed", tau_seed, "seed");
    tau->add_option("--out", tau_out, "CSV output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    const int threads = resolve_threads(threads_flag);
    try {
        if (sim->parsed()) return cmd_simulate(common, sim_out, sim_n, sim_seed);
        if (est->parsed()) return cmd_estimate(common, est_data, est_column, est_out, est_json);
        if (fit->parsed())
            return cmd_fit(common, fit_data, fit_column, fit_logret, fit_family, fit_p, fit_q,
                           fit_contrast, fit_kernel, fit_lambda, fit_prefix, !fit_noplot);
        if (mc->parsed())
            return cmd_mc(common, mc_ns, mc_reps, mc_kernels, mc_seed, mc_out, mc_table, threads);
        if (chk->parsed()) return cmd_check(common, chk_out);
        if (tau->parsed())
            return cmd_tau(common, tau_u, tau_smax, tau_p, tau_reps, tau_burn, tau_seed, tau_out);
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const explosion_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModelFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
