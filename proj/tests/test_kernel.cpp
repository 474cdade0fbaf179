#include <cmath>

#include "doctest.h"
#include "locstat/kernel.hpp"

using namespace locstat;

TEST_CASE("kernel point values") {
    const auto uni = KernelSpec::uniform();
    const auto epa = KernelSpec::epanechnikov();
    CHECK(kernel_eval(uni, 0.0) == doctest::Approx(0.5));
    CHECK(kernel_eval(epa, 0.0) == doctest::Approx(0.75));
    CHECK(kernel_eval(epa, 1.5) == 0.0);
    CHECK(kernel_eval(uni, 1.0) == 0.0);   // zero on |x| >= c
    CHECK(kernel_eval(uni, -1.0) == 0.0);
    CHECK(kernel_eval(epa, 0.5) == doctest::Approx(0.75 * 0.75));
}

TEST_CASE("kernel mass and sup bound") {
    for (const auto& k : {KernelSpec::uniform(), KernelSpec::epanechnikov()}) {
        CHECK(std::fabs(kernel_mass(k) - 1.0) <= 1e-9);
    }
    CHECK(KernelSpec::uniform().sup_bound == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(KernelSpec::epanechnikov().sup_bound == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("kernel L2 norms match closed forms") {
    CHECK(kernel_l2_squared(KernelSpec::uniform()) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(kernel_l2_squared(KernelSpec::epanechnikov()) == doctest::Approx(0.6).epsilon(1e-9));
    const auto box = KernelSpec::piecewise_constant({-0.5, 0.5}, {1.0});
    CHECK(kernel_l2_squared(box) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("piecewise constant kernels validate mass") {
    CHECK_THROWS_AS(KernelSpec::piecewise_constant({-1.0, 1.0}, {1.0}), std::invalid_argument);
    const auto k = KernelSpec::piecewise_constant({-1.0, 0.0, 1.0}, {0.25, 0.75});
    CHECK(std::fabs(kernel_mass(k) - 1.0) <= 1e-9);
    CHECK(kernel_eval(k, -0.5) == doctest::Approx(0.25));
    CHECK(kernel_eval(k, 0.5) == doctest::Approx(0.75));
}

TEST_CASE("kernel symmetry") {
    const auto uni = KernelSpec::uniform();
    const auto epa = KernelSpec::epanechnikov();
    for (int i = 0; i <= 200; ++i) {
        const double x = -2.0 + 4.0 * i / 200.0;
        CHECK(kernel_eval(uni, x) == kernel_eval(uni, -x));
        CHECK(kernel_eval(epa, x) == kernel_eval(epa, -x));
    }
}

TEST_CASE("bandwidth rule") {
    CHECK(bandwidth(10000, 0.35) == doctest::Approx(0.039810717055349734).epsilon(1e-12));
    CHECK(bandwidth(4, 0.5) == doctest::Approx(0.5));
    CHECK_THROWS_AS(bandwidth(1, 0.35), std::invalid_argument);
}

TEST_CASE("localization windows") {
    Window w = localization_window(1000, 0.5, 0.1, 1.0);
    CHECK(w.i == 400);
    CHECK(w.j == 600);
    w = localization_window(1000, 0.05, 0.1, 1.0);
    CHECK(w.i == 1);
    CHECK(w.j == 150);
    w = localization_window(100, 0.99, 0.2, 1.0);
    CHECK(w.i == 79);
    CHECK(w.j == 100);
}

TEST_CASE("window monotonicity and size bound") {
    const int n = 1000;
    const double h = bandwidth(n, 0.35);
    const double c = 1.0;
    int prev_i = 0, prev_j = 0;
    for (int g = 1; g <= 1000; ++g) {
        const double u = static_cast<double>(g) / 1001.0;
        const Window w = localization_window(n, u, h, c);
        CHECK(w.i >= prev_i);
        CHECK(w.j >= prev_j);
        prev_i = w.i;
        prev_j = w.j;
        CHECK(!w.empty());
        CHECK(w.size() >= 1);
        CHECK(w.size() <= static_cast<int>(std::ceil(2.0 * c * n * h)) + 2);
    }
}
