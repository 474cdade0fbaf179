#pragma once

#include <functional>
#include <optional>

#include "locstat/contrasts.hpp"
#include "locstat/kernel.hpp"
#include "locstat/models.hpp"

namespace locstat {

/// Compact parameter box Theta. Admissibility predicates named in `advisory`
/// are reported by the CLI, never enforced.
struct ThetaBox {
    VecD lower, upper;
    std::vector<std::string> advisory;

    int dim() const { return static_cast<int>(lower.size()); }
    void validate() const;
    bool contains(std::span<const double> theta) const;
    VecD clamp(VecD theta) const;
    /// Componentwise projection of 0 onto the box (the tie-break point).
    VecD min_norm_point() const;
    double diameter() const;

    /// The family's natural constraint shrunk by a small margin.
    static ThetaBox default_for(const ContrastSpec& contrast);
};

struct OptimizerOpts {
    int restarts = 8;        // quasi-random interior starts (warm start is extra)
    double tol = 1e-8;       // simplex-size tolerance
    int max_iter_per_dim = 500;
};

struct EstimatorConfig {
    ContrastSpec contrast;
    ThetaBox theta_box;
    KernelSpec kernel = KernelSpec::epanechnikov();
    double lambda = 0.35;
    VecD u_grid = default_u_grid();
    OptimizerOpts optimizer;

    static VecD default_u_grid();  // k/50, k = 1..49
    void fill_defaults();          // empty box -> default_for(contrast)
};

struct EstimatePoint {
    double u = 0.0;
    VecD theta;
    double objective = 0.0;
    bool converged = false;
    bool boundary = false;    // localization window was clamped at 1 or n
    bool degenerate = false;  // flat objective or empty window
    int floor_count = 0;
    int restarts_used = 0;
};

struct EstimateCurve {
    std::vector<std::string> components;
    std::vector<EstimatePoint> points;
};

/// Kernel-weighted empirical contrast at (u, theta):
///   (1/(n h)) sum_{t in window} Phi((x_{t-i})_i, theta) K((t/n - u)/h).
/// Throws degenerate_window_error when the window holds no sample point.
double localized_objective(const Trajectory& traj, const EstimatorConfig& cfg, double u,
                           std::span<const double> theta);

/// Reusable objective bound to one (trajectory, u); prepares latent
/// recursions once per theta.
class LocalObjective {
public:
    LocalObjective(const Trajectory& traj, const EstimatorConfig& cfg, double u);
    double operator()(std::span<const double> theta);
    const Window& window() const { return window_; }
    bool boundary() const { return boundary_; }
    int last_floor_count() const { return last_floor_count_; }

private:
    ContrastEvaluator eval_;
    Window window_;
    VecD weights_;  // K((t/n - u)/h) for t in window
    double scale_ = 0.0;
    bool boundary_ = false;
    int last_floor_count_ = 0;
};

struct NmResult {
    VecD x;
    double f = 0.0;
    int evals = 0;
    bool converged = false;
};

/// Derivative-free simplex descent with projection onto the box.
NmResult nelder_mead(const std::function<double(std::span<const double>)>& f, VecD start,
                     const ThetaBox& box, double tol, int max_iter);

EstimatePoint estimate_at(const Trajectory& traj, const EstimatorConfig& cfg, double u,
                          const VecD* warm_start = nullptr);

struct WywEstimate {
    double theta = 0.0;
    bool degenerate = false;
};

/// Closed-form minimizer of the LS contrast for tvAR(1), clipped to the box.
/// Optimizer oracle.
WywEstimate weighted_yule_walker(const Trajectory& traj, const EstimatorConfig& cfg, double u);

EstimateCurve estimate_curve(const Trajectory& traj, const EstimatorConfig& cfg);

}  // namespace locstat
