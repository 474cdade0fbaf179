#pragma once

#include <optional>
#include <string>

#include "locstat/estimator.hpp"
#include "locstat/experiments.hpp"
#include "locstat/theory.hpp"

namespace locstat {

inline constexpr int kSchemaVersion = 1;

/// Malformed config files / unknown keys (CLI exit 64).
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data (CLI exit 65). Carries the offending 1-based row
/// when known (0 otherwise).
class data_error : public std::runtime_error {
public:
    data_error(const std::string& msg, int row) : std::runtime_error(msg), row(row) {}
    int row;
};

// --- series / trajectory files -------------------------------------------

/// Reads one numeric column from a CSV file (comma-separated, optional
/// header row, '.' decimal). column < 0 selects the last column. With
/// log_return, requires strictly positive values and returns the n-1
/// log-differences.
VecD load_series_csv(const std::string& path, int column, bool log_return);

void write_trajectory_csv(const std::string& path, const Trajectory& traj);

// --- reports ---------------------------------------------------------------

void write_curve_csv(const std::string& path, const EstimateCurve& curve);
EstimateCurve read_curve_csv(const std::string& path);
std::string curve_to_json(const EstimateCurve& curve, const std::string& contrast,
                          const std::string& kernel,
                          const std::optional<AdmissibilityReport>& advisory);

/// Deterministic payload: excludes wall-clock.
std::string rmise_report_to_json(const RmiseReport& report);
RmiseReport rmise_report_from_json(const std::string& text);

void write_tau_csv(const std::string& path, const TauEstimate& tau);
std::string check_report_to_json(const AdmissibilityReport& report);
std::string clt_check_to_json(const CltCheck& check);

// --- plots -------------------------------------------------------------

/// Minimal static SVG line chart; one polyline per series.
void write_svg_lines(const std::string& path, const std::string& title, const VecD& xs,
                     const std::vector<std::pair<std::string, VecD>>& series);

// --- config ---------------------------------------------------------------

/// Merged view of the JSON config file. Unknown keys are rejected.
struct RunConfig {
    std::optional<ModelSpec> model;
    std::optional<ContrastKind> contrast_kind;
    KernelSpec kernel = KernelSpec::epanechnikov();
    double lambda = 0.35;
    VecD u_grid;  // empty -> default
    OptimizerOpts optimizer;
    bool optimizer_set = false;
    ThetaBox theta_box;  // empty -> family default

    int sim_n = 1000;
    std::uint64_t sim_seed = 1;

    std::vector<int> mc_ns = {1000};
    int mc_reps = 100;
    std::vector<KernelSpec> mc_kernels;
    std::uint64_t mc_seed = 1;

    double tau_u = 0.5;
    int tau_smax = 20;
    int tau_p = 2;
    int tau_reps = 1000;
    int tau_burn = 200;
    std::uint64_t tau_seed = 1;

    ModelSpec require_model() const {
        if (!model) throw config_error("config: a model section is required");
        return *model;
    }
    EstimatorConfig estimator_config(const ModelSpec& m) const;
    McScenario mc_scenario() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace locstat
