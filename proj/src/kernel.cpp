#include "locstat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace locstat {

namespace {

double sup_on_grid(const KernelSpec& k) {
    const int pts = 10000;
    const double c = k.support_radius;
    double m = 0.0;
    for (int i = 0; i <= pts; ++i) {
        const double x = -c + 2.0 * c * static_cast<double>(i) / pts;
        m = std::max(m, std::fabs(kernel_eval(k, x)));
    }
    return m;
}

// Smooth pieces of the kernel and their interior values: integrating piece
// by piece keeps jump discontinuities (uniform / piecewise shapes) away from
// the quadrature nodes.
struct Piece {
    double a, b;
    std::function<double(double)> f;
};

std::vector<Piece> kernel_pieces(const KernelSpec& k) {
    const double c = k.support_radius;
    switch (k.shape) {
        case KernelShape::Uniform:
            return {{-c, c, [c](double) { return 0.5 / c; }}};
        case KernelShape::Epanechnikov:
            return {{-c, c, [c](double x) {
                         const double z = x / c;
                         return 0.75 / c * (1.0 - z * z);
                     }}};
        case KernelShape::PiecewiseConstant: {
            std::vector<Piece> out;
            for (std::size_t i = 0; i + 1 < k.breakpoints.size(); ++i) {
                const double v = k.values[i];
                out.push_back({k.breakpoints[i], k.breakpoints[i + 1], [v](double) { return v; }});
            }
            return out;
        }
    }
    return {};
}

// Composite Simpson on [a, b] with an even panel count.
double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels % 2 != 0) ++panels;
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += f(a + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
    return s * h / 3.0;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double adaptive_integral(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

void validate(const KernelSpec& k) {
    if (!(k.support_radius > 0.0)) throw std::invalid_argument("kernel: support radius must be positive");
    const double mass = kernel_mass(k);
    if (std::fabs(mass - 1.0) > 1e-9)
        throw std::invalid_argument("kernel: does not integrate to 1 (got " + std::to_string(mass) + ")");
}

}  // namespace

KernelSpec KernelSpec::uniform(double c) {
    KernelSpec k;
    k.shape = KernelShape::Uniform;
    k.support_radius = c;
    k.sup_bound = sup_on_grid(k);
    validate(k);
    return k;
}

KernelSpec KernelSpec::epanechnikov(double c) {
    KernelSpec k;
    k.shape = KernelShape::Epanechnikov;
    k.support_radius = c;
    k.sup_bound = sup_on_grid(k);
    validate(k);
    return k;
}

KernelSpec KernelSpec::piecewise_constant(std::vector<double> breakpoints,
                                          std::vector<double> values) {
    if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size())
        throw std::invalid_argument("kernel: piecewise needs k+1 breakpoints for k values");
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
        throw std::invalid_argument("kernel: breakpoints must be sorted");
    KernelSpec k;
    k.shape = KernelShape::PiecewiseConstant;
    k.breakpoints = std::move(breakpoints);
    k.values = std::move(values);
    k.support_radius = std::max(std::fabs(k.breakpoints.front()), std::fabs(k.breakpoints.back()));
    k.sup_bound = sup_on_grid(k);
    validate(k);
    return k;
}

KernelSpec KernelSpec::from_name(const std::string& name) {
    if (name == "uniform") return uniform();
    if (name == "epanechnikov") return epanechnikov();
    throw std::invalid_argument("unknown kernel name: " + name);
}

std::string KernelSpec::name() const {
    switch (shape) {
        case KernelShape::Uniform: return "uniform";
        case KernelShape::Epanechnikov: return "epanechnikov";
        case KernelShape::PiecewiseConstant: return "piecewise";
    }
    return "?";
}

double kernel_eval(const KernelSpec& k, double x) {
    const double c = k.support_radius;
    if (std::fabs(x) >= c) return 0.0;
    switch (k.shape) {
        case KernelShape::Uniform:
            return 0.5 / c;
        case KernelShape::Epanechnikov: {
            const double z = x / c;
            return 0.75 / c * (1.0 - z * z);
        }
        case KernelShape::PiecewiseConstant: {
            auto it = std::upper_bound(k.breakpoints.begin(), k.breakpoints.end(), x);
            if (it == k.breakpoints.begin() || it == k.breakpoints.end()) return 0.0;
            const auto idx = static_cast<std::size_t>(it - k.breakpoints.begin()) - 1;
            return k.values[idx];
        }
    }
    return 0.0;
}

double kernel_mass(const KernelSpec& k) {
    // Panels aligned to breakpoints; 2^14 panels split across the pieces.
    const auto pieces = kernel_pieces(k);
    const int panels = std::max(2, (1 << 14) / static_cast<int>(pieces.size()));
    double total = 0.0;
    for (const auto& piece : pieces) total += simpson(piece.f, piece.a, piece.b, panels);
    return total;
}

double kernel_l2_squared(const KernelSpec& k) {
    double total = 0.0;
    for (const auto& piece : kernel_pieces(k)) {
        const auto f2 = [&piece](double x) {
            const double v = piece.f(x);
            return v * v;
        };
        total += adaptive_integral(f2, piece.a, piece.b, 1e-13);
    }
    return total;
}

double bandwidth(int n, double lambda) {
    if (n < 2) throw std::invalid_argument("bandwidth: n must be >= 2");
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("bandwidth: lambda must be in (0,1)");
    return std::pow(static_cast<double>(n), -lambda);
}

Window localization_window(int n, double u, double h, double c) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("localization_window: u must be in (0,1)");
    if (!(h > 0.0)) throw std::invalid_argument("localization_window: h must be positive");
    Window w;
    const double lo = static_cast<double>(n) * (u - c * h);
    const double hi = static_cast<double>(n) * (u + c * h);
    w.i = std::max(1, static_cast<int>(std::floor(lo)));
    w.j = std::min(n, static_cast<int>(std::floor(hi)));
    return w;
}

}  // namespace locstat
