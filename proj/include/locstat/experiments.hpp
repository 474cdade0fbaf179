#pragma once

#include "locstat/estimator.hpp"
#include "locstat/models.hpp"

namespace locstat {

struct McScenario {
    ModelSpec model;
    ContrastSpec contrast;
    std::vector<int> ns = {1000};
    int reps = 100;
    std::vector<KernelSpec> kernels = {KernelSpec::epanechnikov()};
    VecD u_grid = EstimatorConfig::default_u_grid();
    std::uint64_t master_seed = 1;
    double lambda = 0.35;
    // Desk-scale Monte Carlo defaults: warm starts along the grid carry most
    // of the optimization, so two fresh restarts at a looser tolerance keep
    // R=100 sweeps tractable.
    OptimizerOpts optimizer{2, 1e-6, 500};
    ThetaBox theta_box;  // empty -> family default
    int threads = 1;
    bool truth_oracle = false;  // test hook: estimator returns theta*(u)
    double error_scale = 1.0;   // test hook: scales every error curve

    void validate() const;
};

struct RmiseCell {
    int n = 0;
    std::string kernel;
    VecD rsmise;  // one per component
    int excluded = 0;
    bool unreliable = false;
};

struct RmiseReport {
    std::vector<std::string> components;
    std::vector<RmiseCell> cells;
    std::uint64_t master_seed = 0;
    int reps = 0;
    double wall_seconds = 0.0;  // informational; never serialized

    bool any_unreliable() const {
        for (const auto& c : cells)
            if (c.unreliable) return true;
        return false;
    }
    const RmiseCell* find(int n, const std::string& kernel) const {
        for (const auto& c : cells)
            if (c.n == n && c.kernel == kernel) return &c;
        return nullptr;
    }
};

/// Replicates simulate -> estimate_curve, accumulating per-component squared
/// errors against theta*(u_k). RSMISE per component is
/// sqrt(mean over replications of the grid-average squared error).
/// Replications that explode (or never converge at any u) are excluded and
/// counted; more than 5% exclusions marks the cell unreliable. Replication r
/// always simulates from derive_stream(master_seed, r), so results are
/// identical for any thread count.
RmiseReport run_mc(const McScenario& scenario);

/// Rows = n, columns = component x kernel. format: "csv" | "text".
std::string table_report(const RmiseReport& report, const std::string& format);

struct CltCheck {
    double empirical_var = 0.0;
    double theoretical_var = 0.0;
    double ratio = 0.0;
    double normality_pvalue = 0.0;
    bool low_power = false;
};

/// Simulates R constant-parameter tvAR(1) trajectories, estimates at u with
/// the LS contrast and compares the sample variance of sqrt(n h)(theta_hat -
/// theta*) with (1 - theta*^2) Int K^2. The p-value is an Anderson-Darling
/// normality test with estimated mean and variance.
CltCheck clt_check(double theta_star, int n, int R, const KernelSpec& kernel, double u,
                   double lambda, std::uint64_t seed, int threads = 1);

/// Anderson-Darling normality test (case: mean and variance estimated).
double anderson_darling_pvalue(VecD sample);

}  // namespace locstat
