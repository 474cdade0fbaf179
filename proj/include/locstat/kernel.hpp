#pragma once

#include <string>
#include <vector>

#include "locstat/common.hpp"

namespace locstat {

enum class KernelShape { Uniform, Epanechnikov, PiecewiseConstant };

/// Compact-support kernel. Built-in shapes integrate to 1 on [-c, c] by
/// construction; piecewise-constant kernels are validated at construction
/// (they exist to exercise the same machinery, not for the CLI).
struct KernelSpec {
    KernelShape shape = KernelShape::Epanechnikov;
    double support_radius = 1.0;  // c
    double sup_bound = 0.0;       // C_K, cached at construction
    std::vector<double> breakpoints;  // piecewise only; sorted, spans [-c, c]
    std::vector<double> values;       // piecewise only; size = breakpoints.size() - 1

    static KernelSpec uniform(double c = 1.0);
    static KernelSpec epanechnikov(double c = 1.0);
    static KernelSpec piecewise_constant(std::vector<double> breakpoints,
                                         std::vector<double> values);
    /// "uniform" | "epanechnikov"
    static KernelSpec from_name(const std::string& name);
    std::string name() const;
};

struct Window {
    int i = 1;  // first index, >= 1
    int j = 0;  // last index, <= n
    bool empty() const { return j < i; }
    int size() const { return empty() ? 0 : j - i + 1; }
};

/// K(x); exactly 0 for |x| >= c.
double kernel_eval(const KernelSpec& k, double x);

/// Integral of K over [-c, c] by composite Simpson (panels aligned to
/// breakpoints for piecewise shapes). Equals 1 within 1e-9 for valid kernels.
double kernel_mass(const KernelSpec& k);

/// Integral of K^2 by adaptive quadrature. Uniform: 1/2, Epanechnikov: 3/5.
double kernel_l2_squared(const KernelSpec& k);

/// h_n = n^{-lambda}; requires n >= 2 and lambda in (0, 1).
double bandwidth(int n, double lambda);

/// i_n = max(1, floor(n(u - c h))), j_n = min(n, floor(n(u + c h))).
/// The window is clamped to [1, n]; callers flag clamped windows as
/// "boundary". May come back empty for u within 1/n of 0.
Window localization_window(int n, double u, double h, double c);

}  // namespace locstat
