#include "locstat/theory.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "locstat/kernel.hpp"

namespace locstat {

namespace {

// Partial zeta sum with certified integral tail: sum_{j>=1} j^{-kappa}.
double zeta_sum(double kappa, int terms = 10000) {
    if (kappa <= 1.0) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (int j = terms; j >= 1; --j) s += std::pow(static_cast<double>(j), -kappa);
    s += std::pow(static_cast<double>(terms), 1.0 - kappa) / (kappa - 1.0);
    return s;
}

// Coefficients a_1..a_J of c(z) / (1 - d(z)) with absolute-valued inputs:
// a_j = |c_j| + sum_k |d_k| a_{j-k}. An upper envelope for the signed
// expansion; exact for nonnegative GARCH/INGARCH coefficients. Stops early
// once increments fall below 1e-14. Returns empty when the d-polynomial mass
// is >= 1 (non-summable).
VecD abs_ratio_expansion(std::span<const double> c, std::span<const double> d, int J) {
    double dsum = 0.0;
    for (double v : d) dsum += std::fabs(v);
    if (dsum >= 1.0) return {};
    VecD a;
    a.reserve(64);
    for (int j = 1; j <= J; ++j) {
        double v = j <= static_cast<int>(c.size()) ? std::fabs(c[static_cast<std::size_t>(j - 1)]) : 0.0;
        for (int k = 1; k <= static_cast<int>(d.size()) && k < j; ++k)
            v += std::fabs(d[static_cast<std::size_t>(k - 1)]) * a[static_cast<std::size_t>(j - k - 1)];
        a.push_back(v);
        if (j > static_cast<int>(c.size()) && v < 1e-14) break;
    }
    return a;
}

double vec_sum(const VecD& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

struct FamilyOrders {
    Family family;
    int p, q, p2, q2;
};

// Componentwise sup of |theta_i(u)| over a 1001-point grid: the smallest
// coefficient box containing the path.
VecD path_envelope(const ParameterPath& path) {
    const int grid = 1000;
    VecD th(static_cast<std::size_t>(path.dim));
    VecD env(static_cast<std::size_t>(path.dim), 0.0);
    for (int g = 0; g <= grid; ++g) {
        path.eval_into(static_cast<double>(g) / grid, th.data());
        for (std::size_t i = 0; i < th.size(); ++i) env[i] = std::max(env[i], std::fabs(th[i]));
    }
    return env;
}

}  // namespace

double min_root_modulus(const VecD& coeffs) {
    // Roots of P(z) = 1 + c_1 z + ... + c_m z^m.
    int m = static_cast<int>(coeffs.size());
    while (m > 0 && std::fabs(coeffs[static_cast<std::size_t>(m - 1)]) <= 1e-14) --m;
    if (m == 0) return std::numeric_limits<double>::infinity();
    const double lead = coeffs[static_cast<std::size_t>(m - 1)];
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    // Monic form z^m + (c_{m-1}/c_m) z^{m-1} + ... + (c_0/c_m), c_0 = 1.
    companion(0, m - 1) = -1.0 / lead;
    for (int k = 1; k < m; ++k)
        companion(k, m - 1) = -coeffs[static_cast<std::size_t>(k - 1)] / lead;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) best = std::min(best, std::abs(solver.eigenvalues()(i)));
    return best;
}

namespace {

AdmissibilityReport point_report(const FamilyOrders& fo, const VecD& theta, const XiNorms& xi) {
    AdmissibilityReport r;
    const int p = fo.p, q = fo.q;
    switch (fo.family) {
        case Family::TvAr1: {
            r.margin = 1.0 - std::fabs(theta[0]);
            r.detail = "|theta| = " + fmt(std::fabs(theta[0]));
            r.ok = r.margin > 0.0;
            break;
        }
        case Family::TvArInfPowerLaw: {
            const double sum = std::fabs(theta[0]) * zeta_sum(theta[1]);
            r.margin = 1.0 - sum;
            r.detail = "sum_j |a_j| = " + fmt(sum);
            r.ok = r.margin > 0.0;
            break;
        }
        case Family::TvArma: {
            const VecD phi(theta.begin(), theta.begin() + p);
            const VecD psi(theta.begin() + p, theta.begin() + p + q);
            const double m1 = min_root_modulus(phi);
            const double m2 = min_root_modulus(psi);
            r.margin = std::min(m1, m2) - 1.0;
            r.detail = "min root moduli (phi, psi) = (" + fmt(m1) + ", " + fmt(m2) + ")";
            r.ok = r.margin > 1e-9;
            break;
        }
        case Family::TvArchInfPowerLaw: {
            const double sum = xi.l4 * xi.l4 * std::fabs(theta[1]) * zeta_sum(theta[2]);
            r.margin = 1.0 - sum;
            r.detail = "||xi||_4^2 sum_j a_j = " + fmt(sum);
            r.ok = r.margin > 0.0;
            break;
        }
        case Family::TvGarch: {
            double csum = 0.0, dsum = 0.0;
            for (int i = 1; i <= p; ++i) csum += theta[static_cast<std::size_t>(i)];
            for (int j = 1; j <= q; ++j) dsum += theta[static_cast<std::size_t>(p + j)];
            const double value = dsum + xi.l4 * xi.l4 * csum;
            r.margin = 1.0 - value;
            r.detail = "sum_d + ||xi||_4^2 sum_c = " + fmt(value);
            r.ok = r.margin > 0.0;
            break;
        }
        case Family::TvArmaGarch: {
            const VecD phi(theta.begin(), theta.begin() + p);
            const VecD psi(theta.begin() + p, theta.begin() + p + q);
            double csum = 0.0, dsum = 0.0;
            const int off = p + q;
            for (int i = 1; i <= fo.p2; ++i) csum += theta[static_cast<std::size_t>(off + i)];
            for (int j = 1; j <= fo.q2; ++j) dsum += theta[static_cast<std::size_t>(off + fo.p2 + j)];
            const double garch_margin = 1.0 - (dsum + xi.l4 * xi.l4 * csum);
            const double root_margin = std::min(min_root_modulus(phi), min_root_modulus(psi)) - 1.0;
            r.margin = std::min(garch_margin, root_margin);
            r.detail = "garch margin = " + fmt(garch_margin) + ", arma root margin = " + fmt(root_margin);
            r.ok = garch_margin > 0.0 && root_margin > 1e-9;
            break;
        }
        case Family::TvGlarch: {
            const std::span<const double> c(theta.data() + 1, static_cast<std::size_t>(p));
            const std::span<const double> d(theta.data() + 1 + p, static_cast<std::size_t>(q));
            const VecD a = abs_ratio_expansion(c, d, 10000);
            if (a.empty() && p > 0) {
                r.margin = -std::numeric_limits<double>::infinity();
                r.detail = "d-polynomial mass >= 1: LARCH expansion diverges";
                r.ok = false;
                break;
            }
            const double sum = xi.l8 * vec_sum(a);
            r.margin = 1.0 - sum;
            r.detail = "||xi||_8 sum_j |a_j| = " + fmt(sum);
            r.ok = r.margin > 0.0;
            break;
        }
        case Family::TvIngarch: {
            double s = 0.0;
            for (int i = 1; i <= p + q; ++i) s += theta[static_cast<std::size_t>(i)];
            r.margin = 1.0 - s;
            r.detail = "sum_a + sum_b = " + fmt(s);
            r.ok = r.margin > 0.0;
            break;
        }
        case Family::TvIngarchThreshold: {
            double s = 0.0;
            for (int i = 1; i <= p; ++i) s += theta[static_cast<std::size_t>(i)];
            for (int i = 1; i <= q; ++i)
                s += std::max(theta[static_cast<std::size_t>(p + i)],
                              theta[static_cast<std::size_t>(p + q + i)]);
            r.margin = 1.0 - s;
            r.detail = "sum_a + sum_max(b,c) = " + fmt(s);
            r.ok = r.margin > 0.0;
            break;
        }
    }
    r.worst_margin = r.margin;
    return r;
}

}  // namespace

AdmissibilityReport check_admissible_point(Family family, int p, int q, int p2, int q2,
                                           const VecD& theta, const XiNorms& xi) {
    const FamilyOrders fo{family, p, q, p2, q2};
    if (static_cast<int>(theta.size()) != family_param_dim(family, p, q, p2, q2))
        throw std::invalid_argument("check_admissible: theta dimension mismatch");
    return point_report(fo, theta, xi);
}

AdmissibilityReport check_admissible(const ModelSpec& model) {
    const FamilyOrders fo{model.family, model.p, model.q, model.p2, model.q2};
    const XiNorms xi = XiNorms::from(model.innovations);

    // Pointwise scan for the worst grid point.
    const int grid = 1000;
    VecD th(static_cast<std::size_t>(model.path.dim));
    AdmissibilityReport worst;
    bool first = true;
    for (int g = 0; g <= grid; ++g) {
        const double u = static_cast<double>(g) / grid;
        model.path.eval_into(u, th.data());
        AdmissibilityReport r = point_report(fo, th, xi);
        if (first || r.margin < worst.worst_margin) {
            worst = r;
            worst.worst_margin = r.margin;
            worst.worst_u = u;
            first = false;
        }
    }

    // Headline margin: the constraint on the coefficient envelope (the
    // smallest box containing the path). ARMA root conditions do not reduce
    // to an envelope, so they keep the pointwise worst.
    if (fo.family == Family::TvArma) {
        worst.margin = worst.worst_margin;
        worst.ok = worst.margin > 1e-9;
        return worst;
    }
    const VecD env = path_envelope(model.path);
    AdmissibilityReport headline = point_report(fo, env, xi);
    if (fo.family == Family::TvArmaGarch) {
        // GARCH block from the envelope, ARMA block from the pointwise scan.
        headline.margin = std::min(headline.margin, worst.worst_margin);
        headline.ok = headline.margin > 0.0;
    }
    headline.worst_margin = worst.worst_margin;
    headline.worst_u = worst.worst_u;
    return headline;
}

double LipschitzProfile::tail(int r) const {
    if (r < 0) r = 0;
    double t = 0.0;
    if (r < horizon) t += suffix[static_cast<std::size_t>(r)];
    if (tail_kind == Tail::PowerLaw) {
        const int from = std::max(r, horizon);
        t += power_mu * std::pow(static_cast<double>(from), 1.0 - power_kappa) / (power_kappa - 1.0);
    } else {
        t += geometric_residual;
    }
    return t;
}

namespace {

LipschitzProfile finish_profile(VecD b, double C0, LipschitzProfile::Tail kind, double mu,
                                double kappa) {
    LipschitzProfile pr;
    pr.b = std::move(b);
    pr.horizon = static_cast<int>(pr.b.size());
    pr.C0 = C0;
    pr.tail_kind = kind;
    pr.power_mu = mu;
    pr.power_kappa = kappa;
    pr.geometric_residual = kind == LipschitzProfile::Tail::Geometric ? 1e-12 : 0.0;
    pr.suffix.assign(static_cast<std::size_t>(pr.horizon) + 1, 0.0);
    for (int r = pr.horizon - 1; r >= 0; --r)
        pr.suffix[static_cast<std::size_t>(r)] =
            pr.suffix[static_cast<std::size_t>(r) + 1] + pr.b[static_cast<std::size_t>(r)];
    pr.B0 = pr.suffix[0] + (kind == LipschitzProfile::Tail::PowerLaw
                                ? mu * std::pow(static_cast<double>(pr.horizon), 1.0 - kappa) / (kappa - 1.0)
                                : pr.geometric_residual);
    return pr;
}

}  // namespace

LipschitzProfile lipschitz_profile_point(Family family, int p, int q, const VecD& theta,
                                         const XiNorms& xi, int horizon) {
    if (horizon < 1) throw std::invalid_argument("lipschitz_profile: horizon must be >= 1");
    switch (family) {
        case Family::TvAr1:
            return finish_profile({std::fabs(theta[0])}, xi.l2, LipschitzProfile::Tail::Geometric,
                                  0.0, 0.0);
        case Family::TvArInfPowerLaw: {
            const double mu = std::fabs(theta[0]), kappa = theta[1], sigma = theta[2];
            if (kappa <= 1.0)
                throw inadmissible_profile_error("power-law tail diverges: kappa <= 1");
            VecD b(static_cast<std::size_t>(horizon));
            for (int j = 1; j <= horizon; ++j)
                b[static_cast<std::size_t>(j - 1)] = mu * std::pow(static_cast<double>(j), -kappa);
            return finish_profile(std::move(b), sigma * xi.l2, LipschitzProfile::Tail::PowerLaw,
                                  mu, kappa);
        }
        case Family::TvArma: {
            const double sigma = theta[static_cast<std::size_t>(p + q)];
            // AR(inf) coefficients pi_j of phi(z)/psi(z) obey
            // |pi_j| <= |phi_j| + |psi_j| + sum_k |psi_k| |pi_{j-k}| (pi_0 = 1),
            // i.e. the expansion of (|phi| + |psi|) / (1 - |psi|). Requires
            // sum |psi_k| < 1 (a conservative invertibility envelope).
            VecD num(static_cast<std::size_t>(std::max(p, q)), 0.0);
            for (int j = 1; j <= p; ++j)
                num[static_cast<std::size_t>(j - 1)] += std::fabs(theta[static_cast<std::size_t>(j - 1)]);
            for (int j = 1; j <= q; ++j)
                num[static_cast<std::size_t>(j - 1)] += std::fabs(theta[static_cast<std::size_t>(p + j - 1)]);
            const std::span<const double> psi(theta.data() + p, static_cast<std::size_t>(q));
            VecD b = abs_ratio_expansion(num, psi, horizon);
            if (b.empty() && p + q > 0)
                throw inadmissible_profile_error("ARMA psi polynomial mass >= 1");
            return finish_profile(std::move(b), sigma * xi.l2, LipschitzProfile::Tail::Geometric,
                                  0.0, 0.0);
        }
        case Family::TvArchInfPowerLaw: {
            // Contraction of the squared process, so norms of xi^2 apply.
            const double c0 = theta[0], c1 = std::fabs(theta[1]), kappa = theta[2];
            if (kappa <= 1.0)
                throw inadmissible_profile_error("power-law tail diverges: kappa <= 1");
            const double l4sq = xi.l4 * xi.l4;
            VecD b(static_cast<std::size_t>(horizon));
            for (int j = 1; j <= horizon; ++j)
                b[static_cast<std::size_t>(j - 1)] =
                    l4sq * c1 * std::pow(static_cast<double>(j), -kappa);
            return finish_profile(std::move(b), c0 * l4sq, LipschitzProfile::Tail::PowerLaw,
                                  l4sq * c1, kappa);
        }
        case Family::TvGarch: {
            const std::span<const double> c(theta.data() + 1, static_cast<std::size_t>(p));
            const std::span<const double> d(theta.data() + 1 + p, static_cast<std::size_t>(q));
            VecD a = abs_ratio_expansion(c, d, horizon);
            if (a.empty() && p > 0)
                throw inadmissible_profile_error("GARCH d-polynomial mass >= 1");
            const double l4sq = xi.l4 * xi.l4;
            for (double& v : a) v *= l4sq;
            return finish_profile(std::move(a), theta[0] * l4sq,
                                  LipschitzProfile::Tail::Geometric, 0.0, 0.0);
        }
        case Family::TvGlarch: {
            const std::span<const double> c(theta.data() + 1, static_cast<std::size_t>(p));
            const std::span<const double> d(theta.data() + 1 + p, static_cast<std::size_t>(q));
            VecD a = abs_ratio_expansion(c, d, horizon);
            if (a.empty() && p > 0)
                throw inadmissible_profile_error("GLARCH d-polynomial mass >= 1");
            for (double& v : a) v *= xi.l2;
            return finish_profile(std::move(a), std::fabs(theta[0]) * xi.l2,
                                  LipschitzProfile::Tail::Geometric, 0.0, 0.0);
        }
        case Family::TvIngarch: {
            const std::span<const double> a(theta.data() + 1, static_cast<std::size_t>(p));
            const std::span<const double> bb(theta.data() + 1 + p, static_cast<std::size_t>(q));
            double bsum = 0.0;
            for (double v : bb) bsum += std::fabs(v);
            if (bsum >= 1.0) throw inadmissible_profile_error("INGARCH b-polynomial mass >= 1");
            VecD beta = abs_ratio_expansion(a, bb, horizon);
            const double lam0 = theta[0] / (1.0 - bsum);
            return finish_profile(std::move(beta), std::sqrt(lam0 + lam0 * lam0),
                                  LipschitzProfile::Tail::Geometric, 0.0, 0.0);
        }
        case Family::TvIngarchThreshold: {
            // lambda-lags carry the a-coefficients; X-lags the max(b, c).
            const std::span<const double> a(theta.data() + 1, static_cast<std::size_t>(p));
            double asum = 0.0;
            for (double v : a) asum += std::fabs(v);
            if (asum >= 1.0) throw inadmissible_profile_error("threshold a-polynomial mass >= 1");
            VecD m(static_cast<std::size_t>(q));
            for (int i = 1; i <= q; ++i)
                m[static_cast<std::size_t>(i - 1)] = std::max(theta[static_cast<std::size_t>(p + i)],
                                                              theta[static_cast<std::size_t>(p + q + i)]);
            VecD beta = abs_ratio_expansion(m, a, horizon);
            const double lam0 = theta[0] / (1.0 - asum);
            return finish_profile(std::move(beta), std::sqrt(lam0 + lam0 * lam0),
                                  LipschitzProfile::Tail::Geometric, 0.0, 0.0);
        }
        case Family::TvArmaGarch:
            throw std::invalid_argument("lipschitz profile not implemented for arma-garch");
    }
    throw std::invalid_argument("lipschitz profile: unsupported family");
}

LipschitzProfile lipschitz_profile(const ModelSpec& model, int horizon) {
    return lipschitz_profile_point(model.family, model.p, model.q, path_envelope(model.path),
                                   XiNorms::from(model.innovations), horizon);
}

double lambda_bound(const LipschitzProfile& profile, int s) {
    if (s < 1) throw std::invalid_argument("lambda_bound: s must be >= 1");
    if (!(profile.B0 < 1.0))
        throw inadmissible_profile_error("lambda_bound requires B0 < 1 (got " + fmt(profile.B0) + ")");
    double best = std::numeric_limits<double>::infinity();
    for (int r = 1; r <= s; ++r) {
        const double v = std::pow(profile.B0, static_cast<double>(s) / r) + profile.tail(r);
        best = std::min(best, v);
    }
    return best;
}

TauEstimate estimate_tau(const ModelSpec& model, double u, int s_max, int p, int R, int burn_in,
                         std::uint64_t seed) {
    if (p != 1 && p != 2) throw std::invalid_argument("estimate_tau: p must be 1 or 2");
    if (R < 100) throw std::invalid_argument("estimate_tau: R must be >= 100");
    if (s_max < 1) throw std::invalid_argument("estimate_tau: s_max must be >= 1");
    if (burn_in < 0) throw std::invalid_argument("estimate_tau: burn_in must be >= 0");
    model.validate();

    ModelSpec frozen = model;
    frozen.path = ParameterPath::constant(model.path.eval(u));

    TauEstimate out;
    out.p = p;
    out.replications = R;
    out.lags.resize(static_cast<std::size_t>(s_max));
    out.tau_hat.assign(static_cast<std::size_t>(s_max), 0.0);
    out.lambda.assign(static_cast<std::size_t>(s_max), std::numeric_limits<double>::quiet_NaN());
    for (int s = 1; s <= s_max; ++s) out.lags[static_cast<std::size_t>(s - 1)] = s;

    try {
        const LipschitzProfile profile = lipschitz_profile_point(
            frozen.family, frozen.p, frozen.q, frozen.path.eval(0.5),
            XiNorms::from(frozen.innovations), 10000);
        if (profile.B0 < 1.0)
            for (int s = 1; s <= s_max; ++s)
                out.lambda[static_cast<std::size_t>(s - 1)] = lambda_bound(profile, s);
    } catch (const std::exception&) {
        // No closed-form profile: lambda column stays NaN.
    }

    const int total = burn_in + s_max;
    VecD acc(static_cast<std::size_t>(s_max), 0.0);
    for (int r = 0; r < R; ++r) {
        const CounterRng shared(derive_stream(seed, 2 * static_cast<std::uint64_t>(r)));
        const CounterRng pre(derive_stream(seed, 2 * static_cast<std::uint64_t>(r) + 1));
        // Chain A sees the shared innovations everywhere; chain B gets
        // independent draws up to time 0 and the shared ones after.
        const std::function<double(int)> fa = [&shared](int t) {
            return shared.uniform_at(static_cast<std::uint64_t>(t - 1));
        };
        const std::function<double(int)> fb = [&shared, &pre, burn_in](int t) {
            return t <= burn_in ? pre.uniform_at(static_cast<std::uint64_t>(t - 1))
                                : shared.uniform_at(static_cast<std::uint64_t>(t - 1));
        };
        const Trajectory a = simulate_with_uniforms(frozen, total, fa);
        const Trajectory b = simulate_with_uniforms(frozen, total, fb);
        for (int s = 1; s <= s_max; ++s) {
            const double diff = std::fabs(a.values[static_cast<std::size_t>(burn_in + s - 1)] -
                                          b.values[static_cast<std::size_t>(burn_in + s - 1)]);
            acc[static_cast<std::size_t>(s - 1)] += p == 1 ? diff : diff * diff;
        }
    }
    for (int s = 1; s <= s_max; ++s) {
        const double mean = acc[static_cast<std::size_t>(s - 1)] / R;
        out.tau_hat[static_cast<std::size_t>(s - 1)] = p == 1 ? mean : std::sqrt(mean);
    }
    return out;
}

double ar1_asymptotic_sd(double theta_star, const KernelSpec& kernel, int n, double lambda) {
    if (!(std::fabs(theta_star) < 1.0))
        throw std::invalid_argument("ar1_asymptotic_sd: |theta*| must be < 1");
    const double h = bandwidth(n, lambda);
    return std::sqrt((1.0 - theta_star * theta_star) * kernel_l2_squared(kernel) /
                     (static_cast<double>(n) * h));
}

}  // namespace locstat
