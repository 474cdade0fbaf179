#include "locstat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "locstat/rng.hpp"

namespace locstat {

void McScenario::validate() const {
    if (reps < 1) throw std::invalid_argument("mc scenario: reps must be >= 1");
    if (ns.empty()) throw std::invalid_argument("mc scenario: ns must be nonempty");
    if (kernels.empty()) throw std::invalid_argument("mc scenario: kernels must be nonempty");
    if (u_grid.empty()) throw std::invalid_argument("mc scenario: u grid must be nonempty");
    model.validate();
}

namespace {

struct RepOutcome {
    bool exploded = false;
    // Per kernel: grid-average squared error per component; empty if the
    // kernel's curve never converged at any u.
    std::vector<VecD> sq_err;
    std::vector<bool> usable;
};

}  // namespace

RmiseReport run_mc(const McScenario& scenario) {
    scenario.validate();
    const auto t0 = std::chrono::steady_clock::now();

    RmiseReport report;
    report.components = scenario.model.param_names();
    report.master_seed = scenario.master_seed;
    report.reps = scenario.reps;
    const int d = scenario.model.param_dim();
    const int n_kernels = static_cast<int>(scenario.kernels.size());
    const int grid_size = static_cast<int>(scenario.u_grid.size());

    // True curves on the grid.
    std::vector<VecD> truth(static_cast<std::size_t>(grid_size));
    for (int k = 0; k < grid_size; ++k)
        truth[static_cast<std::size_t>(k)] = scenario.model.path.eval(scenario.u_grid[static_cast<std::size_t>(k)]);

    for (int n : scenario.ns) {
        std::vector<RepOutcome> outcomes(static_cast<std::size_t>(scenario.reps));
        auto run_rep = [&](int r) {
            RepOutcome& out = outcomes[static_cast<std::size_t>(r)];
            out.sq_err.assign(static_cast<std::size_t>(n_kernels), VecD(static_cast<std::size_t>(d), 0.0));
            out.usable.assign(static_cast<std::size_t>(n_kernels), false);
            Trajectory traj;
            try {
                traj = simulate(scenario.model, n, derive_stream(scenario.master_seed, static_cast<std::uint64_t>(r)));
            } catch (const explosion_error&) {
                out.exploded = true;
                return;
            }
            for (int kk = 0; kk < n_kernels; ++kk) {
                EstimatorConfig cfg;
                cfg.contrast = scenario.contrast;
                cfg.theta_box = scenario.theta_box;
                cfg.kernel = scenario.kernels[static_cast<std::size_t>(kk)];
                cfg.lambda = scenario.lambda;
                cfg.u_grid = scenario.u_grid;
                cfg.optimizer = scenario.optimizer;
                cfg.fill_defaults();

                VecD acc(static_cast<std::size_t>(d), 0.0);
                int converged_points = 0;
                if (scenario.truth_oracle) {
                    converged_points = grid_size;  // zero error by construction
                } else {
                    const EstimateCurve curve = estimate_curve(traj, cfg);
                    for (int g = 0; g < grid_size; ++g) {
                        const EstimatePoint& pt = curve.points[static_cast<std::size_t>(g)];
                        if (pt.converged) ++converged_points;
                        for (int c = 0; c < d; ++c) {
                            const double e = scenario.error_scale *
                                             (pt.theta[static_cast<std::size_t>(c)] -
                                              truth[static_cast<std::size_t>(g)][static_cast<std::size_t>(c)]);
                            acc[static_cast<std::size_t>(c)] += e * e;
                        }
                    }
                }
                if (converged_points == 0) continue;  // fully failed: excluded
                for (int c = 0; c < d; ++c)
                    out.sq_err[static_cast<std::size_t>(kk)][static_cast<std::size_t>(c)] =
                        acc[static_cast<std::size_t>(c)] / grid_size;
                out.usable[static_cast<std::size_t>(kk)] = true;
            }
        };
        parallel_for(scenario.reps, scenario.threads, run_rep);

        // Deterministic reduction in replication order.
        for (int kk = 0; kk < n_kernels; ++kk) {
            RmiseCell cell;
            cell.n = n;
            cell.kernel = scenario.kernels[static_cast<std::size_t>(kk)].name();
            cell.rsmise.assign(static_cast<std::size_t>(d), 0.0);
            int included = 0;
            for (int r = 0; r < scenario.reps; ++r) {
                const RepOutcome& out = outcomes[static_cast<std::size_t>(r)];
                if (out.exploded || !out.usable[static_cast<std::size_t>(kk)]) {
                    ++cell.excluded;
                    continue;
                }
                ++included;
                for (int c = 0; c < d; ++c)
                    cell.rsmise[static_cast<std::size_t>(c)] +=
                        out.sq_err[static_cast<std::size_t>(kk)][static_cast<std::size_t>(c)];
            }
            if (included > 0)
                for (int c = 0; c < d; ++c)
                    cell.rsmise[static_cast<std::size_t>(c)] =
                        std::sqrt(cell.rsmise[static_cast<std::size_t>(c)] / included);
            cell.unreliable = cell.excluded > scenario.reps / 20;
            report.cells.push_back(std::move(cell));
        }
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

std::string table_report(const RmiseReport& report, const std::string& format) {
    if (format != "csv" && format != "text")
        throw std::invalid_argument("table_report: format must be csv or text");
    std::vector<int> ns;
    std::vector<std::string> kernels;
    for (const auto& cell : report.cells) {
        if (std::find(ns.begin(), ns.end(), cell.n) == ns.end()) ns.push_back(cell.n);
        if (std::find(kernels.begin(), kernels.end(), cell.kernel) == kernels.end())
            kernels.push_back(cell.kernel);
    }
    std::ostringstream os;
    os.precision(6);
    const char sep = format == "csv" ? ',' : ' ';
    os << "n";
    for (const auto& comp : report.components)
        for (const auto& k : kernels) os << sep << comp << "_" << k.substr(0, 1);
    os << "\n";
    for (int n : ns) {
        os << n;
        for (std::size_t c = 0; c < report.components.size(); ++c)
            for (const auto& k : kernels) {
                const RmiseCell* cell = report.find(n, k);
                os << sep;
                if (cell != nullptr && c < cell->rsmise.size()) os << cell->rsmise[c];
            }
        os << "\n";
    }
    return os.str();
}

double anderson_darling_pvalue(VecD sample) {
    const int n = static_cast<int>(sample.size());
    if (n < 8) return 1.0;  // too few points to reject anything
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : sample) var += (v - mean) * (v - mean);
    var /= (n - 1);
    const double sd = std::sqrt(var);
    for (double& v : sample) v = (v - mean) / sd;
    std::sort(sample.begin(), sample.end());

    double a2 = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double fi = std::clamp(normal_cdf(sample[static_cast<std::size_t>(i - 1)]), 1e-300, 1.0 - 1e-16);
        const double fr = std::clamp(normal_cdf(sample[static_cast<std::size_t>(n - i)]), 1e-300, 1.0 - 1e-16);
        a2 += (2.0 * i - 1.0) * (std::log(fi) + std::log1p(-fr));
    }
    a2 = -n - a2 / n;
    // D'Agostino-Stephens correction and p-value bands for estimated
    // mean/variance.
    const double astar = a2 * (1.0 + 0.75 / n + 2.25 / (static_cast<double>(n) * n));
    if (astar >= 0.6) return std::exp(1.2937 - 5.709 * astar + 0.0186 * astar * astar);
    if (astar > 0.34) return std::exp(0.9177 - 4.279 * astar - 1.38 * astar * astar);
    if (astar > 0.2) return 1.0 - std::exp(-8.318 + 42.796 * astar - 59.938 * astar * astar);
    return 1.0 - std::exp(-13.436 + 101.14 * astar - 223.73 * astar * astar);
}

CltCheck clt_check(double theta_star, int n, int R, const KernelSpec& kernel, double u,
                   double lambda, std::uint64_t seed, int threads) {
    if (!(std::fabs(theta_star) < 1.0)) throw std::invalid_argument("clt_check: |theta*| must be < 1");
    if (R < 2) throw std::invalid_argument("clt_check: R must be >= 2");

    ModelSpec model;
    model.family = Family::TvAr1;
    model.path = ParameterPath::constant({theta_star});
    model.innovations = InnovationSpec::gaussian(1.0);

    EstimatorConfig cfg;
    cfg.contrast = ContrastSpec::make(ContrastKind::LeastSquares, Family::TvAr1);
    cfg.kernel = kernel;
    cfg.lambda = lambda;
    cfg.fill_defaults();

    const double h = bandwidth(n, lambda);
    VecD z(static_cast<std::size_t>(R), 0.0);
    parallel_for(R, threads, [&](int r) {
        const Trajectory traj = simulate(model, n, derive_stream(seed, static_cast<std::uint64_t>(r)));
        const EstimatePoint pt = estimate_at(traj, cfg, u);
        z[static_cast<std::size_t>(r)] = std::sqrt(n * h) * (pt.theta[0] - theta_star);
    });

    CltCheck out;
    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= R;
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    out.empirical_var = var / (R - 1);
    out.theoretical_var = (1.0 - theta_star * theta_star) * kernel_l2_squared(kernel);
    out.ratio = out.empirical_var / out.theoretical_var;
    out.normality_pvalue = anderson_darling_pvalue(z);
    out.low_power = R < 8;
    return out;
}

}  // namespace locstat
