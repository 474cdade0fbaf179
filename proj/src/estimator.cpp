#include "locstat/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace locstat {

namespace {

constexpr double kTieTolerance = 1e-12;

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    int i = index;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23};

}  // namespace

void ThetaBox::validate() const {
    if (lower.size() != upper.size() || lower.empty())
        throw std::invalid_argument("theta box: lower/upper must be nonempty and match");
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (!(lower[i] < upper[i]))
            throw std::invalid_argument("theta box: lower must be strictly below upper");
}

bool ThetaBox::contains(std::span<const double> theta) const {
    if (theta.size() != lower.size()) return false;
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (theta[i] < lower[i] || theta[i] > upper[i]) return false;
    return true;
}

VecD ThetaBox::clamp(VecD theta) const {
    for (std::size_t i = 0; i < theta.size(); ++i)
        theta[i] = std::clamp(theta[i], lower[i], upper[i]);
    return theta;
}

VecD ThetaBox::min_norm_point() const {
    VecD z(lower.size(), 0.0);
    return clamp(std::move(z));
}

double ThetaBox::diameter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        const double w = upper[i] - lower[i];
        s += w * w;
    }
    return std::sqrt(s);
}

ThetaBox ThetaBox::default_for(const ContrastSpec& contrast) {
    ThetaBox box;
    auto add = [&box](double lo, double hi, int count = 1) {
        for (int i = 0; i < count; ++i) {
            box.lower.push_back(lo);
            box.upper.push_back(hi);
        }
    };
    switch (contrast.family) {
        case Family::TvAr1:
            add(-0.99, 0.99);
            box.advisory = {"theta_ar"};
            break;
        case Family::TvArInfPowerLaw:
            add(-0.95, 0.95);   // mu
            add(1.5, 6.0);      // kappa
            add(1e-4, 10.0);    // sigma
            box.advisory = {"theta_ar"};
            break;
        case Family::TvArma:
            add(-0.99, 0.99, contrast.p + contrast.q);
            add(1e-4, 10.0);  // sigma
            box.advisory = {"theta_arma"};
            break;
        case Family::TvArchInfPowerLaw:
            add(1e-6, 5.0);  // c0
            add(0.0, 3.0);   // c1
            add(1.2, 6.0);   // p
            box.advisory = {"theta_arch"};
            break;
        case Family::TvGarch:
            add(1e-6, 5.0);
            add(0.0, 0.999, contrast.p + contrast.q);
            box.advisory = {"theta_garch"};
            break;
        case Family::TvArmaGarch:
            add(-0.99, 0.99, contrast.p + contrast.q);
            add(1e-6, 5.0);
            add(0.0, 0.999, contrast.p2 + contrast.q2);
            box.advisory = {"theta_arma_garch"};
            break;
        case Family::TvGlarch:
            add(0.0, 5.0);  // a0
            add(-0.99, 0.99, contrast.p + contrast.q);
            box.advisory = {"theta_larch"};
            break;
        case Family::TvIngarch:
            add(1e-6, 10.0);
            add(0.0, 0.999, contrast.p + contrast.q);
            box.advisory = {"theta_ingarch"};
            break;
        case Family::TvIngarchThreshold:
            add(1e-6, 10.0);
            add(0.0, 0.999, contrast.p + 2 * contrast.q);
            box.advisory = {"theta_ingarch"};
            break;
    }
    return box;
}

VecD EstimatorConfig::default_u_grid() {
    VecD grid;
    grid.reserve(49);
    for (int k = 1; k <= 49; ++k) grid.push_back(static_cast<double>(k) / 50.0);
    return grid;
}

void EstimatorConfig::fill_defaults() {
    if (theta_box.lower.empty()) theta_box = ThetaBox::default_for(contrast);
    theta_box.validate();
    if (static_cast<int>(theta_box.lower.size()) != contrast.param_dim())
        throw std::invalid_argument("estimator config: theta box dimension mismatch");
    if (u_grid.empty()) u_grid = default_u_grid();
    if (!std::is_sorted(u_grid.begin(), u_grid.end()))
        throw std::invalid_argument("estimator config: u grid must be increasing");
    if (!(optimizer.tol > 0.0)) throw std::invalid_argument("estimator config: tol must be positive");
}

LocalObjective::LocalObjective(const Trajectory& traj, const EstimatorConfig& cfg, double u)
    : eval_(cfg.contrast, traj.values) {
    const int n = traj.n;
    if (n < 2) throw std::invalid_argument("localized objective: n must be >= 2");
    const double h = bandwidth(n, cfg.lambda);
    const double c = cfg.kernel.support_radius;
    window_ = localization_window(n, u, h, c);
    boundary_ = std::floor(n * (u - c * h)) < 1.0 || std::floor(n * (u + c * h)) > n;
    if (window_.empty()) throw degenerate_window_error(u);
    weights_.resize(static_cast<std::size_t>(window_.size()));
    bool any = false;
    for (int t = window_.i; t <= window_.j; ++t) {
        const double w = kernel_eval(cfg.kernel, (static_cast<double>(t) / n - u) / h);
        weights_[static_cast<std::size_t>(t - window_.i)] = w;
        any = any || w != 0.0;
    }
    if (!any) throw degenerate_window_error(u);
    scale_ = 1.0 / (n * h);
}

double LocalObjective::operator()(std::span<const double> theta) {
    eval_.reset_floor_count();
    eval_.prepare(theta, window_.j);
    double s = 0.0;
    for (int t = window_.i; t <= window_.j; ++t) {
        const double w = weights_[static_cast<std::size_t>(t - window_.i)];
        if (w != 0.0) s += w * eval_.value(t);
    }
    last_floor_count_ = eval_.floor_count();
    return s * scale_;
}

double localized_objective(const Trajectory& traj, const EstimatorConfig& cfg, double u,
                           std::span<const double> theta) {
    EstimatorConfig local = cfg;
    local.fill_defaults();
    if (!local.theta_box.contains(theta))
        throw std::invalid_argument("localized_objective: theta outside the box");
    LocalObjective obj(traj, local, u);
    return obj(theta);
}

NmResult nelder_mead(const std::function<double(std::span<const double>)>& f, VecD start,
                     const ThetaBox& box, double tol, int max_iter) {
    const int d = box.dim();
    start = box.clamp(std::move(start));

    std::vector<VecD> xs;
    VecD fs;
    xs.reserve(static_cast<std::size_t>(d) + 1);
    xs.push_back(start);
    for (int i = 0; i < d; ++i) {
        VecD v = start;
        double step = 0.05 * (box.upper[static_cast<std::size_t>(i)] - box.lower[static_cast<std::size_t>(i)]);
        if (v[static_cast<std::size_t>(i)] + step > box.upper[static_cast<std::size_t>(i)]) step = -step;
        v[static_cast<std::size_t>(i)] += step;
        xs.push_back(box.clamp(std::move(v)));
    }
    fs.resize(xs.size());
    int evals = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        fs[i] = f(xs[i]);
        ++evals;
    }

    std::vector<std::size_t> order(xs.size());
    auto sort_simplex = [&]() {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&fs](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    };

    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        sort_simplex();
        const std::size_t best = order.front(), worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];

        double diam = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (int k = 0; k < d; ++k)
                diam = std::max(diam, std::fabs(xs[i][static_cast<std::size_t>(k)] -
                                                xs[best][static_cast<std::size_t>(k)]));
        if (diam <= tol) {
            converged = true;
            break;
        }

        VecD centroid(static_cast<std::size_t>(d), 0.0);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i == worst) continue;
            for (int k = 0; k < d; ++k) centroid[static_cast<std::size_t>(k)] += xs[i][static_cast<std::size_t>(k)];
        }
        for (int k = 0; k < d; ++k) centroid[static_cast<std::size_t>(k)] /= d;

        auto blend = [&](double coef) {
            VecD v(static_cast<std::size_t>(d));
            for (int k = 0; k < d; ++k)
                v[static_cast<std::size_t>(k)] = centroid[static_cast<std::size_t>(k)] +
                                                 coef * (centroid[static_cast<std::size_t>(k)] -
                                                         xs[worst][static_cast<std::size_t>(k)]);
            return box.clamp(std::move(v));
        };

        VecD xr = blend(1.0);
        const double fr = f(xr);
        ++evals;
        if (fr < fs[best]) {
            VecD xe = blend(2.0);
            const double fe = f(xe);
            ++evals;
            if (fe < fr) {
                xs[worst] = std::move(xe);
                fs[worst] = fe;
            } else {
                xs[worst] = std::move(xr);
                fs[worst] = fr;
            }
            continue;
        }
        if (fr < fs[second_worst]) {
            xs[worst] = std::move(xr);
            fs[worst] = fr;
            continue;
        }
        VecD xc = blend(fr < fs[worst] ? 0.5 : -0.5);
        const double fc = f(xc);
        ++evals;
        if (fc < std::min(fr, fs[worst])) {
            xs[worst] = std::move(xc);
            fs[worst] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i == best) continue;
            for (int k = 0; k < d; ++k)
                xs[i][static_cast<std::size_t>(k)] =
                    xs[best][static_cast<std::size_t>(k)] +
                    0.5 * (xs[i][static_cast<std::size_t>(k)] - xs[best][static_cast<std::size_t>(k)]);
            xs[i] = box.clamp(std::move(xs[i]));
            fs[i] = f(xs[i]);
            ++evals;
        }
    }

    sort_simplex();
    NmResult r;
    r.x = xs[order.front()];
    r.f = fs[order.front()];
    r.evals = evals;
    r.converged = converged;
    return r;
}

EstimatePoint estimate_at(const Trajectory& traj, const EstimatorConfig& cfg_in, double u,
                          const VecD* warm_start) {
    EstimatorConfig cfg = cfg_in;
    cfg.fill_defaults();
    const ThetaBox& box = cfg.theta_box;
    const int d = box.dim();

    EstimatePoint pt;
    pt.u = u;

    LocalObjective obj(traj, cfg, u);
    pt.boundary = obj.boundary();
    auto fn = [&obj](std::span<const double> th) { return obj(th); };

    const int max_iter = cfg.optimizer.max_iter_per_dim * d;
    std::vector<NmResult> results;
    results.reserve(static_cast<std::size_t>(cfg.optimizer.restarts) + 1);
    if (warm_start != nullptr && static_cast<int>(warm_start->size()) == d)
        results.push_back(nelder_mead(fn, *warm_start, box, cfg.optimizer.tol, max_iter));
    for (int s = 0; s < cfg.optimizer.restarts; ++s) {
        VecD x0(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) {
            const double frac = halton(s + 1, kPrimes[k % 9]);
            x0[static_cast<std::size_t>(k)] =
                box.lower[static_cast<std::size_t>(k)] +
                frac * (box.upper[static_cast<std::size_t>(k)] - box.lower[static_cast<std::size_t>(k)]);
        }
        results.push_back(nelder_mead(fn, std::move(x0), box, cfg.optimizer.tol, max_iter));
    }
    pt.restarts_used = static_cast<int>(results.size());

    double fbest = results.front().f;
    for (const auto& r : results) fbest = std::min(fbest, r.f);

    // Flat-objective detection: every restart reached the same value from
    // well-separated minimizers.
    double fmax = results.front().f;
    for (const auto& r : results) fmax = std::max(fmax, r.f);
    if (results.size() >= 2 && fmax - fbest < kTieTolerance) {
        double spread = 0.0;
        for (std::size_t a = 0; a < results.size(); ++a)
            for (std::size_t b = a + 1; b < results.size(); ++b)
                for (int k = 0; k < d; ++k)
                    spread = std::max(spread, std::fabs(results[a].x[static_cast<std::size_t>(k)] -
                                                        results[b].x[static_cast<std::size_t>(k)]));
        pt.degenerate = spread > 1e-4 * box.diameter();
    }

    // Tie-break among near-optimal candidates (plus the min-norm box point)
    // by smallest Euclidean norm.
    VecD p0 = box.min_norm_point();
    const double fp0 = fn(p0);
    VecD chosen;
    double chosen_f = 0.0;
    double chosen_norm = 0.0;
    bool chosen_converged = false;
    bool have = false;
    auto consider = [&](const VecD& x, double fx, bool conv) {
        if (fx > fbest + kTieTolerance) return;
        const double nn = norm2(x);
        if (!have || nn < chosen_norm - kTieTolerance) {
            chosen = x;
            chosen_f = fx;
            chosen_norm = nn;
            chosen_converged = conv;
            have = true;
        }
    };
    for (const auto& r : results) consider(r.x, r.f, r.converged);
    if (fp0 <= fbest + kTieTolerance) consider(p0, fp0, true);

    pt.theta = std::move(chosen);
    pt.objective = chosen_f;
    pt.converged = chosen_converged;
    // Floor count at the reported optimum.
    (void)fn(pt.theta);
    pt.floor_count = obj.last_floor_count();
    return pt;
}

WywEstimate weighted_yule_walker(const Trajectory& traj, const EstimatorConfig& cfg_in, double u) {
    EstimatorConfig cfg = cfg_in;
    cfg.fill_defaults();
    if (cfg.contrast.kind != ContrastKind::LeastSquares || cfg.contrast.family != Family::TvAr1)
        throw std::invalid_argument("weighted_yule_walker requires the tvAR(1) LS contrast");
    const int n = traj.n;
    const double h = bandwidth(n, cfg.lambda);
    const Window w = localization_window(n, u, h, cfg.kernel.support_radius);
    if (w.empty()) throw degenerate_window_error(u);
    double num = 0.0, den = 0.0;
    for (int t = w.i; t <= w.j; ++t) {
        const double kw = kernel_eval(cfg.kernel, (static_cast<double>(t) / n - u) / h);
        if (kw == 0.0) continue;
        const double xt = traj.values[static_cast<std::size_t>(t - 1)];
        const double xl = t >= 2 ? traj.values[static_cast<std::size_t>(t - 2)] : 0.0;
        num += kw * xt * xl;
        den += kw * xl * xl;
    }
    WywEstimate out;
    if (den == 0.0) {
        out.degenerate = true;
        out.theta = cfg.theta_box.min_norm_point()[0];
        return out;
    }
    out.theta = std::clamp(num / den, cfg.theta_box.lower[0], cfg.theta_box.upper[0]);
    return out;
}

EstimateCurve estimate_curve(const Trajectory& traj, const EstimatorConfig& cfg_in) {
    EstimatorConfig cfg = cfg_in;
    cfg.fill_defaults();
    if (cfg.u_grid.empty()) throw std::invalid_argument("estimate_curve: empty u grid");
    EstimateCurve curve;
    curve.components = cfg.contrast.param_names();
    curve.points.reserve(cfg.u_grid.size());
    const VecD* warm = nullptr;
    VecD warm_value;
    for (double u : cfg.u_grid) {
        EstimatePoint pt;
        try {
            pt = estimate_at(traj, cfg, u, warm);
        } catch (const degenerate_window_error&) {
            pt.u = u;
            pt.theta = cfg.theta_box.min_norm_point();
            pt.objective = 0.0;
            pt.degenerate = true;
            pt.boundary = true;
        }
        if (!pt.degenerate) {
            warm_value = pt.theta;
            warm = &warm_value;
        }
        curve.points.push_back(std::move(pt));
    }
    return curve;
}

}  // namespace locstat
