#pragma once

#include <limits>
#include <string>

#include "locstat/common.hpp"
#include "locstat/models.hpp"

namespace locstat {

struct XiNorms {
    double l1 = 0.0, l2 = 1.0, l4 = 1.0, l8 = 1.0;
    static XiNorms from(const InnovationSpec& innov) {
        return {innov.norm_l1(), innov.norm_l2(), innov.norm_l4(), innov.norm_l8()};
    }
};

struct AdmissibilityReport {
    bool ok = false;
    /// Margin of the family constraint evaluated on the parameter hull: for a
    /// path, the componentwise supremum of the coefficients over u (the
    /// smallest box Theta containing the path). Positive means admissible.
    double margin = 0.0;
    /// Pointwise diagnostics along the path (equal to `margin` for a point).
    double worst_margin = 0.0;
    double worst_u = std::numeric_limits<double>::quiet_NaN();
    std::string detail;
};

/// Evaluates the family's stationarity/moment constraint at a single theta.
AdmissibilityReport check_admissible_point(Family family, int p, int q, int p2, int q2,
                                           const VecD& theta, const XiNorms& xi);

/// Path version: scans a 1000-point u grid; the headline margin uses the
/// coefficient envelope, `worst_margin`/`worst_u` the worst grid point.
AdmissibilityReport check_admissible(const ModelSpec& model);

struct LipschitzProfile {
    VecD b;            // b_1..b_J
    double B0 = 0.0;   // sum of b plus the certified tail bound
    double C0 = 0.0;   // ||F_theta(0, xi_0)||_p for the family's working norm
    int horizon = 0;
    enum class Tail { Geometric, PowerLaw } tail_kind = Tail::Geometric;
    double power_mu = 0.0, power_kappa = 0.0;
    double geometric_residual = 0.0;
    VecD suffix;  // suffix[r] = sum_{t > r, t <= J} b_t

    /// Certified bound on sum_{t > r} b_t.
    double tail(int r) const;
};

/// Closed-form Lipschitz coefficients of the recursion map at a fixed theta.
/// GARCH/ARCH families contract the squared process (norms of xi^2); see the
/// per-family notes in the implementation. Throws inadmissible_profile_error
/// when the tail diverges (kappa <= 1) and std::invalid_argument for
/// arma-garch (no closed-form map is implemented for it).
LipschitzProfile lipschitz_profile_point(Family family, int p, int q, const VecD& theta,
                                         const XiNorms& xi, int horizon);

/// Path version: profile at the componentwise envelope of the path.
LipschitzProfile lipschitz_profile(const ModelSpec& model, int horizon);

/// lambda_s = min over integer r in [1, s] of B0^{s/r} + tail(r).
/// Requires B0 < 1.
double lambda_bound(const LipschitzProfile& profile, int s);

struct TauEstimate {
    std::vector<int> lags;
    VecD tau_hat;
    VecD lambda;  // lambda_s when a profile with B0 < 1 exists, else NaN
    int p = 2;
    int replications = 0;
};

/// Monte Carlo tau-coefficient estimate for the stationary version at u:
/// R chain pairs share innovations for t > 0 and use independent ones for
/// t <= 0; tau_hat(s) = (mean |X_s - X*_s|^p)^{1/p}. Integer-valued families
/// couple through shared uniforms and inversion sampling.
TauEstimate estimate_tau(const ModelSpec& model, double u, int s_max, int p, int R, int burn_in,
                         std::uint64_t seed);

/// Plug-in standard deviation of the localized LS estimator for tvAR(1):
/// sqrt((1 - theta*^2) Int K^2 / (n h_n)).
double ar1_asymptotic_sd(double theta_star, const struct KernelSpec& kernel, int n, double lambda);

/// Minimum modulus over the roots of 1 + c_1 z + ... + c_m z^m, via companion
/// matrix eigenvalues. Returns +inf for a constant polynomial.
double min_root_modulus(const VecD& coeffs);

}  // namespace locstat
