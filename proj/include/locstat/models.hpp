#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locstat/common.hpp"
#include "locstat/rng.hpp"

namespace locstat {

/// One coefficient path from the config grammar:
///   const a | a + b*u | a + b*sin(k*u) | a + b*cos2(k*u)
struct PathExpr {
    enum class Kind { Const, Linear, Sin, Cos2 };
    Kind kind = Kind::Const;
    double a = 0.0;
    double b = 0.0;
    double k = 0.0;

    double eval(double u) const;
    /// Lipschitz constant (sup of |d/du|).
    double lipschitz() const;
    std::string to_string() const;

    static PathExpr constant(double a) { return {Kind::Const, a, 0.0, 0.0}; }
    static PathExpr linear(double a, double b) { return {Kind::Linear, a, b, 0.0}; }
    static PathExpr sine(double a, double b, double k) { return {Kind::Sin, a, b, k}; }
    static PathExpr cos2(double a, double b, double k) { return {Kind::Cos2, a, b, k}; }
    /// Parses the grammar above; throws std::invalid_argument on anything else.
    static PathExpr parse(const std::string& text);
};

/// Deterministic map u in [0,1] -> theta in R^d, with Holder metadata.
struct ParameterPath {
    int dim = 0;
    std::function<void(double, double*)> eval_into;
    double holder_rho = 1.0;
    double holder_K = 0.0;
    std::vector<PathExpr> exprs;  // kept when built from the grammar

    VecD eval(double u) const {
        VecD out(static_cast<std::size_t>(dim));
        eval_into(u, out.data());
        return out;
    }

    static ParameterPath from_exprs(std::vector<PathExpr> exprs);
    static ParameterPath constant(VecD theta);
};

struct InnovationSpec {
    enum class Family { Gaussian, UniformSym, Custom };
    Family family = Family::Gaussian;
    double sigma = 1.0;                 // Gaussian standard deviation
    double half_width = 1.7320508075688772;  // UniformSym: sqrt(3) gives unit variance
    VecD custom_u, custom_x;            // Custom: inverse-CDF table (u ascending)

    /// ||xi||_p for p = 1, 2, 4, 8 (closed form for built-ins, Monte Carlo
    /// with 1e6 draws for Custom).
    std::array<double, 4> moment_norms{};

    static InnovationSpec gaussian(double sigma = 1.0);
    static InnovationSpec uniform_sym(double half_width = 1.7320508075688772);
    static InnovationSpec custom(VecD u, VecD x);

    /// Inverse-CDF transform of a uniform draw; one uniform per variate.
    double from_uniform(double u) const;
    double sample(CounterRng& rng) const { return from_uniform(rng.uniform()); }

    double norm_l1() const { return moment_norms[0]; }
    double norm_l2() const { return moment_norms[1]; }
    double norm_l4() const { return moment_norms[2]; }
    double norm_l8() const { return moment_norms[3]; }
};

enum class Family {
    TvAr1,
    TvArInfPowerLaw,   // theta = (mu, kappa, sigma), a_j = mu j^{-kappa}
    TvArma,            // theta = (phi_1..p, psi_1..q, sigma)
    TvArchInfPowerLaw, // theta = (c0, c1, p), a_j = c1 j^{-p}
    TvGarch,           // theta = (c0, c_1..p, d_1..q)
    TvArmaGarch,       // theta = (phi.., psi.., c0, c.., d..)
    TvGlarch,          // theta = (a0, c_1..p, d_1..q)
    TvIngarch,         // theta = (a0, a_1..p, b_1..q)
    TvIngarchThreshold // theta = (a0, a_1..p, b_1..q, c_1..q)
};

std::string family_name(Family f);
Family family_from_name(const std::string& name);
bool family_is_integer_valued(Family f);

/// Parameter dimension implied by a family and its orders.
int family_param_dim(Family f, int p, int q, int p2, int q2);
/// Component labels, e.g. {"c0","c1","d1"} for tvGARCH(1,1).
std::vector<std::string> family_param_names(Family f, int p, int q, int p2, int q2);

struct ModelSpec {
    Family family = Family::TvAr1;
    int p = 0, q = 0;
    int p2 = 0, q2 = 0;       // GARCH orders of ARMA-GARCH
    int threshold_ell = 1;    // INGARCH threshold level
    ParameterPath path;
    InnovationSpec innovations;
    std::optional<int> truncation_lag;  // infinite-memory families; default n
    double intercept_floor = 1e-8;

    int param_dim() const { return family_param_dim(family, p, q, p2, q2); }
    std::vector<std::string> param_names() const { return family_param_names(family, p, q, p2, q2); }

    /// Checks path dimension and the sign constraints the family requires,
    /// on a 1000-point u grid. Throws std::invalid_argument on violation.
    void validate() const;
};

struct Trajectory {
    int n = 0;
    VecD values;
    std::optional<VecD> aux;  // sigma_t (GARCH-type), lambda_t (INGARCH), eps_t (ARMA-GARCH)
    std::uint64_t seed = 0;
};

/// Simulates the triangular array with theta_t = path(t/n), zero initial
/// conditions, and per-family recursion. Infinite sums truncate at
/// min(t-1, truncation_lag). Bit-identical for identical (model, n, seed).
Trajectory simulate(const ModelSpec& model, int n, std::uint64_t seed);

/// Test hook: same recursions, innovations taken from `xi` instead of the
/// RNG. Not valid for INGARCH families (their noise is the Poisson draw).
Trajectory simulate_driven(const ModelSpec& model, int n, std::span<const double> xi);

/// Coupling hook: runs the recursion with one caller-supplied uniform per
/// time step (1-based). Affine families map it through the innovation
/// inverse CDF; integer-valued families draw Poisson counts by inversion, so
/// two chains sharing uniforms stay coupled. The model is assumed valid.
Trajectory simulate_with_uniforms(const ModelSpec& model, int n,
                                  const std::function<double(int)>& uniform_at);

/// Simulates burn_in + n steps at the frozen parameter theta*(u) and returns
/// the last n: the Monte Carlo stand-in for the stationary version.
Trajectory stationary_version(const ModelSpec& model, double u, int n, int burn_in,
                              std::uint64_t seed);

enum class Scenario { Garch11_Sec5, ArchInf_Sec5, Ingarch10_Sec5 };
Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario s);
ModelSpec builtin_scenario(Scenario s);

}  // namespace locstat
