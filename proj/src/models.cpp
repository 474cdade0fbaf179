#include "locstat/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace locstat {

namespace {

constexpr double kPi = 3.14159265358979323846;

void guard_value(int t, double x) {
    if (!std::isfinite(x) || std::fabs(x) > kExplosionValueLimit) throw explosion_error(t, x);
}

void guard_variance(int t, double s2) {
    if (!std::isfinite(s2) || s2 > kExplosionVarianceLimit || s2 < 0.0) throw explosion_error(t, s2);
}

}  // namespace

double PathExpr::eval(double u) const {
    switch (kind) {
        case Kind::Const: return a;
        case Kind::Linear: return a + b * u;
        case Kind::Sin: return a + b * std::sin(k * u);
        case Kind::Cos2: {
            const double c = std::cos(k * u);
            return a + b * c * c;
        }
    }
    return a;
}

double PathExpr::lipschitz() const {
    switch (kind) {
        case Kind::Const: return 0.0;
        case Kind::Linear: return std::fabs(b);
        case Kind::Sin: return std::fabs(b * k);
        case Kind::Cos2: return std::fabs(b * k);  // |d/du b cos^2(ku)| = |b k sin(2ku)|
    }
    return 0.0;
}

std::string PathExpr::to_string() const {
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    switch (kind) {
        case Kind::Const: return num(a);
        case Kind::Linear: return num(a) + "+" + num(b) + "*u";
        case Kind::Sin: return num(a) + "+" + num(b) + "*sin(" + num(k) + "*u)";
        case Kind::Cos2: return num(a) + "+" + num(b) + "*cos2(" + num(k) + "*u)";
    }
    return num(a);
}

namespace {

struct ExprParser {
    const std::string& s;
    std::size_t pos = 0;

    explicit ExprParser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool eat_word(const char* w) {
        skip_ws();
        const std::size_t len = std::char_traits<char>::length(w);
        if (s.compare(pos, len, w) == 0) {
            pos += len;
            return true;
        }
        return false;
    }
    double number() {
        skip_ws();
        std::size_t consumed = 0;
        double v;
        try {
            v = std::stod(s.substr(pos), &consumed);
        } catch (const std::exception&) {
            throw std::invalid_argument("path expression: expected a number in '" + s + "'");
        }
        pos += consumed;
        return v;
    }
    void expect_end() {
        skip_ws();
        if (pos != s.size())
            throw std::invalid_argument("path expression: trailing input in '" + s + "'");
    }
};

}  // namespace

PathExpr PathExpr::parse(const std::string& text) {
    ExprParser p(text);
    const double a = p.number();
    p.skip_ws();
    if (p.pos == p.s.size()) return PathExpr::constant(a);

    double sign = 1.0;
    if (p.eat('+')) {
        sign = 1.0;
    } else if (p.eat('-')) {
        sign = -1.0;
    } else {
        throw std::invalid_argument("path expression: expected '+' or '-' in '" + text + "'");
    }
    const double b = sign * p.number();
    if (!p.eat('*'))
        throw std::invalid_argument("path expression: expected '*' in '" + text + "'");

    if (p.eat_word("u")) {
        p.expect_end();
        return PathExpr::linear(a, b);
    }
    const bool is_sin = p.eat_word("sin(");
    const bool is_cos2 = !is_sin && p.eat_word("cos2(");
    if (!is_sin && !is_cos2)
        throw std::invalid_argument("path expression: expected u, sin(..) or cos2(..) in '" + text + "'");
    const double k = p.number();
    if (!p.eat('*') || !p.eat_word("u") || !p.eat(')'))
        throw std::invalid_argument("path expression: expected 'k*u)' in '" + text + "'");
    p.expect_end();
    return is_sin ? PathExpr::sine(a, b, k) : PathExpr::cos2(a, b, k);
}

ParameterPath ParameterPath::from_exprs(std::vector<PathExpr> exprs) {
    ParameterPath path;
    path.dim = static_cast<int>(exprs.size());
    path.exprs = std::move(exprs);
    double K = 0.0;
    for (const auto& e : path.exprs) K = std::max(K, e.lipschitz());
    path.holder_K = K;
    path.holder_rho = 1.0;
    const auto exprs_copy = path.exprs;
    path.eval_into = [exprs_copy](double u, double* out) {
        for (std::size_t i = 0; i < exprs_copy.size(); ++i) out[i] = exprs_copy[i].eval(u);
    };
    return path;
}

ParameterPath ParameterPath::constant(VecD theta) {
    std::vector<PathExpr> exprs;
    exprs.reserve(theta.size());
    for (double v : theta) exprs.push_back(PathExpr::constant(v));
    return from_exprs(std::move(exprs));
}

InnovationSpec InnovationSpec::gaussian(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian innovations need sigma > 0");
    InnovationSpec s;
    s.family = Family::Gaussian;
    s.sigma = sigma;
    // E|Z| = sqrt(2/pi), E Z^4 = 3, E Z^8 = 105.
    s.moment_norms = {sigma * std::sqrt(2.0 / kPi), sigma, sigma * std::pow(3.0, 0.25),
                      sigma * std::pow(105.0, 0.125)};
    return s;
}

InnovationSpec InnovationSpec::uniform_sym(double half_width) {
    if (!(half_width > 0.0)) throw std::invalid_argument("uniform innovations need half_width > 0");
    InnovationSpec s;
    s.family = Family::UniformSym;
    s.half_width = half_width;
    // E|xi|^p = a^p / (p+1).
    const double a = half_width;
    s.moment_norms = {a / 2.0, a / std::sqrt(3.0), a / std::pow(5.0, 0.25), a / std::pow(9.0, 0.125)};
    return s;
}

InnovationSpec InnovationSpec::custom(VecD u, VecD x) {
    if (u.size() != x.size() || u.size() < 2)
        throw std::invalid_argument("custom innovations need matching u/x tables of size >= 2");
    if (!std::is_sorted(u.begin(), u.end()))
        throw std::invalid_argument("custom innovations: u table must be ascending");
    InnovationSpec s;
    s.family = Family::Custom;
    s.custom_u = std::move(u);
    s.custom_x = std::move(x);
    // Moment norms estimated from 1e6 draws of a fixed internal stream.
    CounterRng rng(derive_stream(0xC0FFEEULL, s.custom_u.size()));
    const int draws = 1000000;
    double m1 = 0, m2 = 0, m4 = 0, m8 = 0;
    for (int i = 0; i < draws; ++i) {
        const double v = s.from_uniform(rng.uniform());
        const double v2 = v * v;
        m1 += std::fabs(v);
        m2 += v2;
        m4 += v2 * v2;
        m8 += v2 * v2 * v2 * v2;
    }
    const double inv = 1.0 / draws;
    s.moment_norms = {m1 * inv, std::sqrt(m2 * inv), std::pow(m4 * inv, 0.25),
                      std::pow(m8 * inv, 0.125)};
    return s;
}

double InnovationSpec::from_uniform(double u) const {
    switch (family) {
        case Family::Gaussian: return sigma * inverse_normal_cdf(u);
        case Family::UniformSym: return half_width * (2.0 * u - 1.0);
        case Family::Custom: {
            if (u <= custom_u.front()) return custom_x.front();
            if (u >= custom_u.back()) return custom_x.back();
            const auto it = std::upper_bound(custom_u.begin(), custom_u.end(), u);
            const auto hi = static_cast<std::size_t>(it - custom_u.begin());
            const std::size_t lo = hi - 1;
            const double w = (u - custom_u[lo]) / (custom_u[hi] - custom_u[lo]);
            return custom_x[lo] + w * (custom_x[hi] - custom_x[lo]);
        }
    }
    return 0.0;
}

std::string family_name(Family f) {
    switch (f) {
        case Family::TvAr1: return "ar1";
        case Family::TvArInfPowerLaw: return "ar-inf-power";
        case Family::TvArma: return "arma";
        case Family::TvArchInfPowerLaw: return "arch-inf-power";
        case Family::TvGarch: return "garch";
        case Family::TvArmaGarch: return "arma-garch";
        case Family::TvGlarch: return "glarch";
        case Family::TvIngarch: return "ingarch";
        case Family::TvIngarchThreshold: return "ingarch-threshold";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "ar1") return Family::TvAr1;
    if (name == "ar-inf-power") return Family::TvArInfPowerLaw;
    if (name == "arma") return Family::TvArma;
    if (name == "arch-inf-power") return Family::TvArchInfPowerLaw;
    if (name == "garch") return Family::TvGarch;
    if (name == "arma-garch") return Family::TvArmaGarch;
    if (name == "glarch") return Family::TvGlarch;
    if (name == "ingarch") return Family::TvIngarch;
    if (name == "ingarch-threshold") return Family::TvIngarchThreshold;
    throw std::invalid_argument("unknown model family: " + name);
}

bool family_is_integer_valued(Family f) {
    return f == Family::TvIngarch || f == Family::TvIngarchThreshold;
}

int family_param_dim(Family f, int p, int q, int p2, int q2) {
    switch (f) {
        case Family::TvAr1: return 1;
        case Family::TvArInfPowerLaw: return 3;
        case Family::TvArma: return p + q + 1;
        case Family::TvArchInfPowerLaw: return 3;
        case Family::TvGarch: return 1 + p + q;
        case Family::TvArmaGarch: return p + q + 1 + p2 + q2;
        case Family::TvGlarch: return 1 + p + q;
        case Family::TvIngarch: return 1 + p + q;
        case Family::TvIngarchThreshold: return 1 + p + 2 * q;
    }
    return 0;
}

std::vector<std::string> family_param_names(Family f, int p, int q, int p2, int q2) {
    std::vector<std::string> out;
    auto add = [&out](const std::string& base, int from, int to) {
        for (int i = from; i <= to; ++i) out.push_back(base + std::to_string(i));
    };
    switch (f) {
        case Family::TvAr1: out = {"theta"}; break;
        case Family::TvArInfPowerLaw: out = {"mu", "kappa", "sigma"}; break;
        case Family::TvArma:
            add("phi", 1, p);
            add("psi", 1, q);
            out.push_back("sigma");
            break;
        case Family::TvArchInfPowerLaw: out = {"c0", "c1", "p"}; break;
        case Family::TvGarch:
            out.push_back("c0");
            add("c", 1, p);
            add("d", 1, q);
            break;
        case Family::TvArmaGarch:
            add("phi", 1, p);
            add("psi", 1, q);
            out.push_back("c0");
            add("c", 1, p2);
            add("d", 1, q2);
            break;
        case Family::TvGlarch:
            out.push_back("a0");
            add("c", 1, p);
            add("d", 1, q);
            break;
        case Family::TvIngarch:
            out.push_back("a0");
            add("a", 1, p);
            add("b", 1, q);
            break;
        case Family::TvIngarchThreshold:
            out.push_back("a0");
            add("a", 1, p);
            add("b", 1, q);
            add("c", 1, q);
            break;
    }
    return out;
}

void ModelSpec::validate() const {
    if (path.dim != param_dim())
        throw std::invalid_argument("model: path dimension " + std::to_string(path.dim) +
                                    " does not match family parameter count " +
                                    std::to_string(param_dim()));
    if (truncation_lag && *truncation_lag < 1)
        throw std::invalid_argument("model: truncation_lag must be >= 1");

    const int grid = 1000;
    VecD th(static_cast<std::size_t>(path.dim));
    auto fail = [this](const std::string& what, double u) {
        throw std::invalid_argument("model " + family_name(family) + ": " + what + " at u=" +
                                    std::to_string(u));
    };
    for (int g = 0; g <= grid; ++g) {
        const double u = static_cast<double>(g) / grid;
        path.eval_into(u, th.data());
        for (double v : th)
            if (!std::isfinite(v)) fail("non-finite parameter", u);
        switch (family) {
            case Family::TvAr1:
                break;
            case Family::TvArInfPowerLaw:
                if (th[1] <= 1.0) fail("kappa must exceed 1", u);
                if (th[2] <= 0.0) fail("sigma must be positive", u);
                break;
            case Family::TvArma:
                if (th[static_cast<std::size_t>(p + q)] <= 0.0) fail("sigma must be positive", u);
                break;
            case Family::TvArchInfPowerLaw:
                if (th[0] < intercept_floor) fail("c0 below intercept floor", u);
                if (th[1] < 0.0) fail("c1 must be nonnegative", u);
                if (th[2] <= 1.0) fail("p must exceed 1", u);
                break;
            case Family::TvGarch:
                if (th[0] < intercept_floor) fail("c0 below intercept floor", u);
                for (int i = 1; i <= p + q; ++i)
                    if (th[static_cast<std::size_t>(i)] < 0.0) fail("GARCH coefficients must be nonnegative", u);
                break;
            case Family::TvArmaGarch: {
                const int off = p + q;
                if (th[static_cast<std::size_t>(off)] < intercept_floor) fail("c0 below intercept floor", u);
                for (int i = 1; i <= p2 + q2; ++i)
                    if (th[static_cast<std::size_t>(off + i)] < 0.0)
                        fail("GARCH coefficients must be nonnegative", u);
                break;
            }
            case Family::TvGlarch:
                if (th[0] < 0.0) fail("a0 must be nonnegative", u);
                break;
            case Family::TvIngarch:
                if (th[0] < intercept_floor) fail("a0 below intercept floor", u);
                for (int i = 1; i <= p + q; ++i)
                    if (th[static_cast<std::size_t>(i)] < 0.0) fail("INGARCH coefficients must be nonnegative", u);
                break;
            case Family::TvIngarchThreshold:
                if (th[0] < intercept_floor) fail("a0 below intercept floor", u);
                for (int i = 1; i <= p + 2 * q; ++i)
                    if (th[static_cast<std::size_t>(i)] < 0.0) fail("threshold coefficients must be nonnegative", u);
                break;
        }
    }
}

namespace {

// Innovation source: RNG-backed, a fixed series (test hook), or
// caller-supplied uniforms (coupling).
struct NoiseSource {
    CounterRng* rng = nullptr;
    std::span<const double> driven;
    const std::function<double(int)>* uniform_at = nullptr;
    const InnovationSpec* innov = nullptr;

    double xi(int t) {
        if (rng != nullptr) return innov->sample(*rng);
        if (uniform_at != nullptr) return innov->from_uniform((*uniform_at)(t));
        return driven[static_cast<std::size_t>(t - 1)];
    }
    long count(int t, double lambda) {
        if (rng != nullptr) return rng->poisson(lambda);
        if (uniform_at != nullptr) return poisson_inversion((*uniform_at)(t), lambda);
        throw std::invalid_argument("simulate_driven is not defined for integer-valued families");
    }
};

// Runs the family recursion for t = 1..total with zero initial conditions.
// theta(t) must return the parameter vector for time t.
Trajectory run_recursion(const ModelSpec& m, int total,
                         const std::function<const double*(int)>& theta, NoiseSource& noise) {
    Trajectory out;
    out.n = total;
    out.values.assign(static_cast<std::size_t>(total) + 1, 0.0);  // 1-based, [0] unused
    VecD& x = out.values;

    const int trunc = m.truncation_lag.value_or(total);
    const int p = m.p, q = m.q;

    auto lag_x = [&x](int s) { return s >= 1 ? x[static_cast<std::size_t>(s)] : 0.0; };

    switch (m.family) {
        case Family::TvAr1: {
            for (int t = 1; t <= total; ++t) {
                x[static_cast<std::size_t>(t)] = theta(t)[0] * lag_x(t - 1) + noise.xi(t);
                guard_value(t, x[static_cast<std::size_t>(t)]);
            }
            break;
        }
        case Family::TvArInfPowerLaw: {
            VecD logj(static_cast<std::size_t>(total) + 1, 0.0);
            for (int j = 1; j <= total; ++j) logj[static_cast<std::size_t>(j)] = std::log(static_cast<double>(j));
            for (int t = 1; t <= total; ++t) {
                const double* th = theta(t);
                const double mu = th[0], kappa = th[1], sig = th[2];
                const int L = std::min(t - 1, trunc);
                double s = 0.0;
                for (int j = 1; j <= L; ++j)
                    s += std::exp(-kappa * logj[static_cast<std::size_t>(j)]) * x[static_cast<std::size_t>(t - j)];
                x[static_cast<std::size_t>(t)] = mu * s + sig * noise.xi(t);
                guard_value(t, x[static_cast<std::size_t>(t)]);
            }
            break;
        }
        case Family::TvArma: {
            VecD xi_hist(static_cast<std::size_t>(total) + 1, 0.0);
            for (int t = 1; t <= total; ++t) {
                const double* th = theta(t);
                const double sig = th[p + q];
                const double e = noise.xi(t);
                xi_hist[static_cast<std::size_t>(t)] = e;
                double v = sig * e;
                for (int i = 1; i <= p; ++i) v -= th[i - 1] * lag_x(t - i);
                for (int j = 1; j <= q; ++j)
                    v += th[p + j - 1] * (t - j >= 1 ? xi_hist[static_cast<std::size_t>(t - j)] : 0.0);
                x[static_cast<std::size_t>(t)] = v;
                guard_value(t, v);
            }
            break;
        }
        case Family::TvArchInfPowerLaw: {
            out.aux.emplace(static_cast<std::size_t>(total) + 1, 0.0);
            VecD& sig = *out.aux;
            VecD logj(static_cast<std::size_t>(total) + 1, 0.0);
            for (int j = 1; j <= total; ++j) logj[static_cast<std::size_t>(j)] = std::log(static_cast<double>(j));
            for (int t = 1; t <= total; ++t) {
                const double* th = theta(t);
                const double c0 = th[0], c1 = th[1], pw = th[2];
                const int L = std::min(t - 1, trunc);
                double s2 = c0;
                for (int j = 1; j <= L; ++j) {
                    const double xv = x[static_cast<std::size_t>(t - j)];
                    s2 += c1 * std::exp(-pw * logj[static_cast<std::size_t>(j)]) * xv * xv;
                }
                guard_variance(t, s2);
                sig[static_cast<std::size_t>(t)] = std::sqrt(s2);
                x[static_cast<std::size_t>(t)] = sig[static_cast<std::size_t>(t)] * noise.xi(t);
                guard_value(t, x[static_cast<std::size_t>(t)]);
            }
            break;
        }
        case Family::TvGarch: {
            out.aux.emplace(static_cast<std::size_t>(total) + 1, 0.0);
            VecD& sig = *out.aux;
            VecD s2hist(static_cast<std::size_t>(total) + 1, 0.0);
            for (int t = 1; t <= total; ++t) {
                const double* th = theta(t);
                double s2 = th[0];
                for (int i = 1; i <= p; ++i) {
                    const double xv = lag_x(t - i);
                    s2 += th[i] * xv * xv;
                }
                for (int j = 1; j <= q; ++j)
                    s2 += th[p + j] * (t - j >= 1 ? s2hist[static_cast<std::size_t>(t - j)] : 0.0);
                guard_variance(t, s2);
                s2hist[static_cast<std::size_t>(t)] = s2;
                sig[static_cast<std::size_t>(t)] = std::sqrt(s2);
                x[static_cast<std::size_t>(t)] = sig[static_cast<std::size_t>(t)] * noise.xi(t);
                guard_value(t, x[static_cast<std::size_t>(t)]);
            }
            break;
        }
        case Family::TvArmaGarch: {
            const int p2 = m.p2, q2 = m.q2;
            out.aux.emplace(static_cast<std::size_t>(total) + 1, 0.0);
            VecD& eps = *out.aux;
            VecD s2hist(static_cast<std::size_t>(total) + 1, 0.0);
            for (int t = 1; t <= total; ++t) {
                const double* th = theta(t);
                const double* garch = th + p + q;  // c0, c_1..p2, d_1..q2
                double s2 = garch[0];
                for (int i = 1; i <= p2; ++i) {
                    const double ev = t - i >= 1 ? eps[static_cast<std::size_t>(t - i)] : 0.0;
                    s2 += garch[i] * ev * ev;
                }
                for (int j = 1; j <= q2; ++j)
                    s2 += garch[p2 + j] * (t - j >= 1 ? s2hist[static_cast<std::size_t>(t - j)] : 0.0);
                guard_variance(t, s2);
                s2hist[static_cast<std::size_t>(t)] = s2;
                const double e = std::sqrt(s2) * noise.xi(t);
                eps[static_cast<std::size_t>(t)] = e;
                double v = e;
                for (int i = 1; i <= p; ++i) v -= th[i - 1] * lag_x(t - i);
                for (int j = 1; j <= q; ++j)
                    v += th[p + j - 1] * (t - j >= 1 ? eps[static_cast<std::size_t>(t - j)] : 0.0);
                x[static_cast<std::size_t>(t)] = v;
                guard_value(t, v);
            }
            break;
        }
        case Family::TvGlarch: {
            out.aux.emplace(static_cast<std::size_t>(total) + 1, 0.0);
            VecD& sig = *out.aux;
            for (int t = 1; t <= total; ++t) {
                const double* th = theta(t);
                double s = th[0];
                for (int i = 1; i <= p; ++i) s += th[i] * lag_x(t - i);
                for (int j = 1; j <= q; ++j)
                    s += th[p + j] * (t - j >= 1 ? sig[static_cast<std::size_t>(t - j)] : 0.0);
                guard_value(t, s);
                sig[static_cast<std::size_t>(t)] = s;
                x[static_cast<std::size_t>(t)] = s * noise.xi(t);
                guard_value(t, x[static_cast<std::size_t>(t)]);
            }
            break;
        }
        case Family::TvIngarch: {
            out.aux.emplace(static_cast<std::size_t>(total) + 1, 0.0);
            VecD& lam = *out.aux;
            // Pre-sample intensities sit at the first intercept.
            const double lam0 = theta(1)[0];
            for (int t = 1; t <= total; ++t) {
                const double* th = theta(t);
                double l = th[0];
                for (int i = 1; i <= p; ++i) l += th[i] * lag_x(t - i);
                for (int j = 1; j <= q; ++j)
                    l += th[p + j] * (t - j >= 1 ? lam[static_cast<std::size_t>(t - j)] : lam0);
                guard_variance(t, l);
                lam[static_cast<std::size_t>(t)] = l;
                x[static_cast<std::size_t>(t)] = static_cast<double>(noise.count(t, l));
            }
            break;
        }
        case Family::TvIngarchThreshold: {
            out.aux.emplace(static_cast<std::size_t>(total) + 1, 0.0);
            VecD& lam = *out.aux;
            const double ell = static_cast<double>(m.threshold_ell);
            const double lam0 = theta(1)[0];
            for (int t = 1; t <= total; ++t) {
                const double* th = theta(t);
                double l = th[0];
                for (int i = 1; i <= p; ++i)
                    l += th[i] * (t - i >= 1 ? lam[static_cast<std::size_t>(t - i)] : lam0);
                for (int i = 1; i <= q; ++i) {
                    const double xv = lag_x(t - i);
                    l += th[p + i] * std::max(xv - ell, 0.0) - th[p + q + i] * std::min(xv, ell);
                }
                l = std::max(l, 0.0);
                guard_variance(t, l);
                lam[static_cast<std::size_t>(t)] = l;
                x[static_cast<std::size_t>(t)] = static_cast<double>(noise.count(t, l));
            }
            break;
        }
    }

    // Drop the unused slot 0 so values[k] is x_{k+1}.
    out.values.erase(out.values.begin());
    if (out.aux) out.aux->erase(out.aux->begin());
    return out;
}

Trajectory simulate_impl(const ModelSpec& model, int n, NoiseSource& noise) {
    model.validate();
    if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
    // theta_t = path(t/n), cached column-wise.
    const int d = model.param_dim();
    VecD table(static_cast<std::size_t>(n) * d);
    for (int t = 1; t <= n; ++t)
        model.path.eval_into(static_cast<double>(t) / n, table.data() + static_cast<std::size_t>(t - 1) * d);
    auto theta = [&table, d](int t) { return table.data() + static_cast<std::size_t>(t - 1) * d; };
    return run_recursion(model, n, theta, noise);
}

}  // namespace

Trajectory simulate(const ModelSpec& model, int n, std::uint64_t seed) {
    CounterRng rng(derive_stream(seed, 0));
    NoiseSource noise;
    noise.rng = &rng;
    noise.innov = &model.innovations;
    Trajectory out = simulate_impl(model, n, noise);
    out.seed = seed;
    return out;
}

Trajectory simulate_driven(const ModelSpec& model, int n, std::span<const double> xi) {
    if (static_cast<int>(xi.size()) < n)
        throw std::invalid_argument("simulate_driven: innovation series shorter than n");
    NoiseSource noise;
    noise.driven = xi;
    noise.innov = &model.innovations;
    return simulate_impl(model, n, noise);
}

Trajectory simulate_with_uniforms(const ModelSpec& model, int n,
                                  const std::function<double(int)>& uniform_at) {
    if (n < 1) throw std::invalid_argument("simulate_with_uniforms: n must be >= 1");
    NoiseSource noise;
    noise.uniform_at = &uniform_at;
    noise.innov = &model.innovations;
    const int d = model.param_dim();
    VecD table(static_cast<std::size_t>(n) * d);
    for (int t = 1; t <= n; ++t)
        model.path.eval_into(static_cast<double>(t) / n, table.data() + static_cast<std::size_t>(t - 1) * d);
    auto theta = [&table, d](int t) { return table.data() + static_cast<std::size_t>(t - 1) * d; };
    return run_recursion(model, n, theta, noise);
}

Trajectory stationary_version(const ModelSpec& model, double u, int n, int burn_in,
                              std::uint64_t seed) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("stationary_version: u must be in (0,1)");
    if (burn_in < 0) throw std::invalid_argument("stationary_version: burn_in must be >= 0");
    if (n < 1) throw std::invalid_argument("stationary_version: n must be >= 1");
    model.validate();
    const VecD frozen = model.path.eval(u);
    ModelSpec constant = model;
    constant.path = ParameterPath::constant(frozen);
    const int total = burn_in + n;
    CounterRng rng(derive_stream(seed, 0));
    NoiseSource noise;
    noise.rng = &rng;
    noise.innov = &model.innovations;
    auto theta = [&frozen](int) { return frozen.data(); };
    constant.truncation_lag = model.truncation_lag;
    Trajectory full = run_recursion(constant, total, theta, noise);
    Trajectory out;
    out.n = n;
    out.seed = seed;
    out.values.assign(full.values.end() - n, full.values.end());
    if (full.aux) out.aux.emplace(full.aux->end() - n, full.aux->end());
    return out;
}

Scenario scenario_from_name(const std::string& name) {
    if (name == "garch11_sec5") return Scenario::Garch11_Sec5;
    if (name == "archinf_sec5") return Scenario::ArchInf_Sec5;
    if (name == "ingarch10_sec5") return Scenario::Ingarch10_Sec5;
    throw std::invalid_argument("unknown scenario: " + name);
}

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Garch11_Sec5: return "garch11_sec5";
        case Scenario::ArchInf_Sec5: return "archinf_sec5";
        case Scenario::Ingarch10_Sec5: return "ingarch10_sec5";
    }
    return "?";
}

ModelSpec builtin_scenario(Scenario s) {
    ModelSpec m;
    switch (s) {
        case Scenario::Garch11_Sec5:
            m.family = Family::TvGarch;
            m.p = 1;
            m.q = 1;
            m.path = ParameterPath::from_exprs({PathExpr::sine(1.0, 0.5, 5.0),
                                                PathExpr::cos2(0.1, 0.4, 4.0),
                                                PathExpr::linear(0.1, 0.4)});
            m.innovations = InnovationSpec::gaussian(1.0);
            break;
        case Scenario::ArchInf_Sec5:
            m.family = Family::TvArchInfPowerLaw;
            m.path = ParameterPath::from_exprs({PathExpr::sine(1.0, 0.5, 5.0),
                                                PathExpr::cos2(0.1, 0.5, 4.0),
                                                PathExpr::linear(2.1, 1.0)});
            m.innovations = InnovationSpec::uniform_sym();
            break;
        case Scenario::Ingarch10_Sec5:
            m.family = Family::TvIngarch;
            m.p = 1;
            m.q = 0;
            m.path = ParameterPath::from_exprs({PathExpr::sine(1.0, 0.5, 5.0),
                                                PathExpr::linear(0.3, 0.5)});
            m.innovations = InnovationSpec::gaussian(1.0);  // unused: counts are Poisson
            break;
    }
    m.validate();
    return m;
}

}  // namespace locstat
