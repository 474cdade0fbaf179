#include "locstat/contrasts.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace locstat {

std::string contrast_name(ContrastKind k) {
    switch (k) {
        case ContrastKind::LeastSquares: return "ls";
        case ContrastKind::LeastAbsoluteValue: return "lav";
        case ContrastKind::GaussianQmle: return "gqmle";
        case ContrastKind::LarchLs: return "larch-ls";
        case ContrastKind::PoissonQmle: return "poisson-qmle";
    }
    return "?";
}

ContrastKind contrast_from_name(const std::string& name) {
    if (name == "ls") return ContrastKind::LeastSquares;
    if (name == "lav") return ContrastKind::LeastAbsoluteValue;
    if (name == "gqmle") return ContrastKind::GaussianQmle;
    if (name == "larch-ls") return ContrastKind::LarchLs;
    if (name == "poisson-qmle") return ContrastKind::PoissonQmle;
    throw std::invalid_argument("unknown contrast: " + name);
}

ContrastSpec ContrastSpec::make(ContrastKind kind, Family family, int p, int q, int p2, int q2,
                                int threshold_ell) {
    ContrastSpec s;
    s.kind = kind;
    s.family = family;
    s.p = p;
    s.q = q;
    s.p2 = p2;
    s.q2 = q2;
    s.threshold_ell = threshold_ell;
    switch (kind) {
        case ContrastKind::LeastSquares:
        case ContrastKind::LeastAbsoluteValue:
            if (family != Family::TvAr1)
                throw std::invalid_argument("ls/lav contrasts score tvAR(1) only");
            s.moment_order = kind == ContrastKind::LeastSquares ? 2 : 1;
            break;
        case ContrastKind::GaussianQmle:
            if (family != Family::TvArInfPowerLaw && family != Family::TvArma &&
                family != Family::TvArchInfPowerLaw && family != Family::TvGarch &&
                family != Family::TvArmaGarch)
                throw std::invalid_argument("gqmle requires a causal affine family");
            s.moment_order = 3;
            break;
        case ContrastKind::LarchLs:
            if (family != Family::TvGlarch)
                throw std::invalid_argument("larch-ls scores LARCH/GLARCH families only");
            s.moment_order = 4;
            break;
        case ContrastKind::PoissonQmle:
            if (family != Family::TvIngarch && family != Family::TvIngarchThreshold)
                throw std::invalid_argument("poisson-qmle scores INGARCH families only");
            s.moment_order = 2;
            break;
    }
    return s;
}

ContrastSpec ContrastSpec::for_model(ContrastKind kind, const ModelSpec& model) {
    return make(kind, model.family, model.p, model.q, model.p2, model.q2, model.threshold_ell);
}

ContrastEvaluator::ContrastEvaluator(ContrastSpec spec, std::span<const double> x)
    : spec_(spec), x_(x), n_(static_cast<int>(x.size())) {
    if (spec_.kind == ContrastKind::GaussianQmle && spec_.family == Family::TvArchInfPowerLaw) {
        xsq_.resize(x_.size());
        for (std::size_t i = 0; i < x_.size(); ++i) xsq_[i] = x_[i] * x_[i];
    }
}

double ContrastEvaluator::floored_m2(double m2) {
    if (m2 < spec_.variance_floor) {
        ++floor_count_;
        return spec_.variance_floor;
    }
    return m2;
}

double ContrastEvaluator::floored_lambda(double lam) {
    if (lam < spec_.variance_floor) {
        ++floor_count_;
        return spec_.variance_floor;
    }
    return lam;
}

void ContrastEvaluator::prepare(std::span<const double> theta, int t_max) {
    n_ = static_cast<int>(x_.size());
    t_max = std::min(t_max, n_);
    theta_.assign(theta.begin(), theta.end());
    prepared_to_ = t_max;
    const double* th = theta_.data();
    const int p = spec_.p, q = spec_.q;
    const auto sz = static_cast<std::size_t>(t_max) + 1;

    switch (spec_.kind) {
        case ContrastKind::LeastSquares:
        case ContrastKind::LeastAbsoluteValue:
            return;  // finite memory, nothing latent
        case ContrastKind::GaussianQmle:
            switch (spec_.family) {
                case Family::TvArInfPowerLaw:
                case Family::TvArchInfPowerLaw: {
                    // Lag weights j^{-kappa} for the current theta.
                    const double expo = spec_.family == Family::TvArInfPowerLaw ? th[1] : th[2];
                    if (logj_.size() < sz) {
                        const std::size_t old = logj_.size();
                        logj_.resize(sz);
                        for (std::size_t j = std::max<std::size_t>(old, 1); j < sz; ++j)
                            logj_[j] = std::log(static_cast<double>(j));
                    }
                    weights_.resize(sz);
                    for (std::size_t j = 1; j < sz; ++j) weights_[j] = std::exp(-expo * logj_[j]);
                    return;
                }
                case Family::TvArma: {
                    // The MA part weights the unit-scale innovations: only
                    // the contemporaneous term carries sigma, so the
                    // recursion feeds back xi_hat = (x - f) / sigma.
                    const double sigma = th[p + q];
                    eps_.assign(sz, 0.0);
                    fmean_.assign(sz, 0.0);
                    for (int t = 1; t <= t_max; ++t) {
                        double f = 0.0;
                        for (int i = 1; i <= p; ++i) f -= th[i - 1] * x_at(t - i);
                        for (int j = 1; j <= q; ++j)
                            f += th[p + j - 1] * (t - j >= 1 ? eps_[static_cast<std::size_t>(t - j)] : 0.0);
                        fmean_[static_cast<std::size_t>(t)] = f;
                        eps_[static_cast<std::size_t>(t)] = (x_at(t) - f) / sigma;
                    }
                    return;
                }
                case Family::TvGarch: {
                    m2_.assign(sz, 0.0);
                    for (int t = 1; t <= t_max; ++t) {
                        double s2 = th[0];
                        for (int i = 1; i <= p; ++i) {
                            const double xv = x_at(t - i);
                            s2 += th[i] * xv * xv;
                        }
                        for (int j = 1; j <= q; ++j)
                            s2 += th[p + j] * (t - j >= 1 ? m2_[static_cast<std::size_t>(t - j)] : 0.0);
                        m2_[static_cast<std::size_t>(t)] = s2;
                    }
                    return;
                }
                case Family::TvArmaGarch: {
                    const int p2 = spec_.p2, q2 = spec_.q2;
                    const double* garch = th + p + q;
                    eps_.assign(sz, 0.0);
                    fmean_.assign(sz, 0.0);
                    m2_.assign(sz, 0.0);
                    for (int t = 1; t <= t_max; ++t) {
                        double f = 0.0;
                        for (int i = 1; i <= p; ++i) f -= th[i - 1] * x_at(t - i);
                        for (int j = 1; j <= q; ++j)
                            f += th[p + j - 1] * (t - j >= 1 ? eps_[static_cast<std::size_t>(t - j)] : 0.0);
                        fmean_[static_cast<std::size_t>(t)] = f;
                        eps_[static_cast<std::size_t>(t)] = x_at(t) - f;
                        double s2 = garch[0];
                        for (int i = 1; i <= p2; ++i) {
                            const double ev = t - i >= 1 ? eps_[static_cast<std::size_t>(t - i)] : 0.0;
                            s2 += garch[i] * ev * ev;
                        }
                        for (int j = 1; j <= q2; ++j)
                            s2 += garch[p2 + j] * (t - j >= 1 ? m2_[static_cast<std::size_t>(t - j)] : 0.0);
                        m2_[static_cast<std::size_t>(t)] = s2;
                    }
                    return;
                }
                default:
                    throw std::logic_error("gqmle: unsupported family");
            }
        case ContrastKind::LarchLs: {
            lin_.assign(sz, 0.0);
            for (int t = 1; t <= t_max; ++t) {
                double s = th[0];
                for (int i = 1; i <= p; ++i) s += th[i] * x_at(t - i);
                for (int j = 1; j <= q; ++j)
                    s += th[p + j] * (t - j >= 1 ? lin_[static_cast<std::size_t>(t - j)] : 0.0);
                lin_[static_cast<std::size_t>(t)] = s;
            }
            return;
        }
        case ContrastKind::PoissonQmle: {
            lam_.assign(sz, 0.0);
            const double lam0 = th[0];  // pre-sample intensities sit at the intercept
            if (spec_.family == Family::TvIngarch) {
                for (int t = 1; t <= t_max; ++t) {
                    double l = th[0];
                    for (int i = 1; i <= p; ++i) l += th[i] * x_at(t - i);
                    for (int j = 1; j <= q; ++j)
                        l += th[p + j] * (t - j >= 1 ? lam_[static_cast<std::size_t>(t - j)] : lam0);
                    lam_[static_cast<std::size_t>(t)] = l;
                }
            } else {
                const double ell = static_cast<double>(spec_.threshold_ell);
                for (int t = 1; t <= t_max; ++t) {
                    double l = th[0];
                    for (int i = 1; i <= p; ++i)
                        l += th[i] * (t - i >= 1 ? lam_[static_cast<std::size_t>(t - i)] : lam0);
                    for (int i = 1; i <= q; ++i) {
                        const double xv = x_at(t - i);
                        l += th[p + i] * std::max(xv - ell, 0.0) - th[p + q + i] * std::min(xv, ell);
                    }
                    lam_[static_cast<std::size_t>(t)] = l;
                }
            }
            return;
        }
    }
}

double ContrastEvaluator::power_dot(int t, bool squared) const {
    // sum_{j=1}^{t-1} w_j x_{t-j} over the observed, zero-extended past
    const double* src = squared ? xsq_.data() : x_.data();
    const int lags = std::min(t - 1, n_);
    double s = 0.0;
    const double* w = weights_.data();
    for (int j = 1; j <= lags; ++j) s += w[j] * src[t - j - 1];
    return s;
}

double ContrastEvaluator::value(int t) {
    const double* th = theta_.data();
    switch (spec_.kind) {
        case ContrastKind::LeastSquares:
            return contrast_ls(x_at(t), x_at(t - 1), th[0]);
        case ContrastKind::LeastAbsoluteValue:
            return contrast_lav(x_at(t), x_at(t - 1), th[0]);
        case ContrastKind::GaussianQmle: {
            double f, m2;
            switch (spec_.family) {
                case Family::TvArInfPowerLaw:
                    f = th[0] * power_dot(t, false);
                    m2 = th[2] * th[2];
                    break;
                case Family::TvArchInfPowerLaw:
                    f = 0.0;
                    m2 = th[0] + th[1] * power_dot(t, true);
                    break;
                case Family::TvArma:
                    f = fmean_[static_cast<std::size_t>(t)];
                    m2 = th[spec_.p + spec_.q] * th[spec_.p + spec_.q];
                    break;
                case Family::TvGarch:
                    f = 0.0;
                    m2 = m2_[static_cast<std::size_t>(t)];
                    break;
                case Family::TvArmaGarch:
                    f = fmean_[static_cast<std::size_t>(t)];
                    m2 = m2_[static_cast<std::size_t>(t)];
                    break;
                default:
                    return 0.0;
            }
            m2 = floored_m2(m2);
            const double r = x_at(t) - f;
            return std::log(m2) + r * r / m2;
        }
        case ContrastKind::LarchLs: {
            const double l = lin_[static_cast<std::size_t>(t)];
            const double d = x_at(t) * x_at(t) - l * l;
            return d * d;
        }
        case ContrastKind::PoissonQmle: {
            const double lam = floored_lambda(lam_[static_cast<std::size_t>(t)]);
            return -x_at(t) * std::log(lam) + lam;
        }
    }
    return 0.0;
}

ConditionalMoments ContrastEvaluator::moments(int t) {
    ConditionalMoments m;
    const double* th = theta_.data();
    switch (spec_.kind) {
        case ContrastKind::LeastSquares:
        case ContrastKind::LeastAbsoluteValue:
            m.mean = th[0] * x_at(t - 1);
            m.scale = 1.0;
            return m;
        case ContrastKind::GaussianQmle: {
            double f = 0.0, m2 = 0.0;
            switch (spec_.family) {
                case Family::TvArInfPowerLaw:
                    f = th[0] * power_dot(t, false);
                    m2 = th[2] * th[2];
                    break;
                case Family::TvArchInfPowerLaw:
                    m2 = th[0] + th[1] * power_dot(t, true);
                    break;
                case Family::TvArma:
                    f = fmean_[static_cast<std::size_t>(t)];
                    m2 = th[spec_.p + spec_.q] * th[spec_.p + spec_.q];
                    break;
                case Family::TvGarch:
                    m2 = m2_[static_cast<std::size_t>(t)];
                    break;
                case Family::TvArmaGarch:
                    f = fmean_[static_cast<std::size_t>(t)];
                    m2 = m2_[static_cast<std::size_t>(t)];
                    break;
                default:
                    break;
            }
            const int before = floor_count_;
            m2 = floored_m2(m2);
            m.mean = f;
            m.scale = std::sqrt(m2);
            m.floored = floor_count_ > before;
            return m;
        }
        case ContrastKind::LarchLs:
            m.mean = 0.0;
            m.scale = lin_[static_cast<std::size_t>(t)];
            return m;
        case ContrastKind::PoissonQmle: {
            const int before = floor_count_;
            m.intensity = floored_lambda(lam_[static_cast<std::size_t>(t)]);
            m.mean = m.intensity;
            m.floored = floor_count_ > before;
            return m;
        }
    }
    return m;
}

double contrast_ls(double x1, double x2, double theta) {
    const double r = x1 - theta * x2;
    return r * r;
}

double contrast_lav(double x1, double x2, double theta) { return std::fabs(x1 - theta * x2); }

namespace {

// Builds the chronological series (x_1 .. x_{t-1}[, x_t]) from a newest-first
// past and hands back an evaluator prepared at t.
struct PastContext {
    VecD series;
    int t;
};

PastContext context_from_past(std::span<const double> past, std::optional<double> x_t) {
    PastContext ctx;
    ctx.t = static_cast<int>(past.size()) + 1;
    ctx.series.assign(past.rbegin(), past.rend());
    ctx.series.push_back(x_t.value_or(0.0));
    return ctx;
}

}  // namespace

ConditionalMoments cond_moments(const ContrastSpec& spec, std::span<const double> theta,
                                std::span<const double> past) {
    PastContext ctx = context_from_past(past, std::nullopt);
    ContrastEvaluator ev(spec, ctx.series);
    ev.prepare(theta, ctx.t);
    return ev.moments(ctx.t);
}

double contrast_gqmle(const ContrastSpec& spec, std::span<const double> theta, double x_t,
                      std::span<const double> past) {
    if (spec.kind != ContrastKind::GaussianQmle)
        throw std::invalid_argument("contrast_gqmle: spec is not gqmle");
    PastContext ctx = context_from_past(past, x_t);
    ContrastEvaluator ev(spec, ctx.series);
    ev.prepare(theta, ctx.t);
    return ev.value(ctx.t);
}

double contrast_larch(const ContrastSpec& spec, std::span<const double> theta, double x_t,
                      std::span<const double> past) {
    if (spec.kind != ContrastKind::LarchLs)
        throw std::invalid_argument("contrast_larch: spec is not larch-ls");
    PastContext ctx = context_from_past(past, x_t);
    ContrastEvaluator ev(spec, ctx.series);
    ev.prepare(theta, ctx.t);
    return ev.value(ctx.t);
}

double contrast_poisson(const ContrastSpec& spec, std::span<const double> theta, double x_t,
                        std::span<const double> past) {
    if (spec.kind != ContrastKind::PoissonQmle)
        throw std::invalid_argument("contrast_poisson: spec is not poisson-qmle");
    if (x_t < 0.0) throw std::invalid_argument("contrast_poisson: x_t must be a nonnegative count");
    PastContext ctx = context_from_past(past, x_t);
    ContrastEvaluator ev(spec, ctx.series);
    ev.prepare(theta, ctx.t);
    return ev.value(ctx.t);
}

}  // namespace locstat
