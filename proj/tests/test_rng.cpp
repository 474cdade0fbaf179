#include <cmath>

#include <initializer_list>
#include <stdexcept>

#include "doctest.h"
#include "locstat/rng.hpp"

using namespace locstat;

TEST_CASE("streams are index-addressable and reproducible") {
    CounterRng a(derive_stream(42, 0));
    CounterRng b(derive_stream(42, 0));
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    CounterRng c(derive_stream(42, 0));
    CHECK(c.uniform_at(7) == c.uniform_at(7));
    // uniform_at(k) equals the (k+1)-th sequential draw
    CounterRng d(derive_stream(42, 0));
    for (int i = 0; i < 7; ++i) d.uniform();
    CHECK(d.uniform() == c.uniform_at(7));
}

TEST_CASE("different streams differ") {
    CounterRng a(derive_stream(42, 0));
    CounterRng b(derive_stream(42, 1));
    int same = 0;
    for (int i = 0; i < 64; ++i)
        if (a.next_u64() == b.next_u64()) ++same;
    CHECK(same == 0);
}

TEST_CASE("uniforms live in the open unit interval") {
    CounterRng rng(derive_stream(7, 3));
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("inverse normal CDF hits known quantiles") {
    CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
    // Round trip through the CDF
    for (double x : {-3.5, -1.0, -0.1, 0.0, 0.4, 2.2, 4.0})
        CHECK(inverse_normal_cdf(normal_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
    CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::invalid_argument);
}

TEST_CASE("normal moments from the generator") {
    CounterRng rng(derive_stream(11, 0));
    const int n = 200000;
    double m1 = 0, m2 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        m1 += z;
        m2 += z * z;
    }
    m1 /= n;
    m2 /= n;
    CHECK(std::fabs(m1) < 0.01);
    CHECK(m2 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("poisson mean and variance, both sampling regimes") {
    std::uint64_t stream = 0;
    for (double lambda : {0.5, 4.0, 25.0}) {
        CounterRng rng(derive_stream(1234, stream++));
        const int n = 100000;
        double m1 = 0, m2 = 0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(rng.poisson(lambda));
            m1 += k;
            m2 += k * k;
        }
        m1 /= n;
        const double var = m2 / n - m1 * m1;
        CHECK(m1 == doctest::Approx(lambda).epsilon(0.03));
        CHECK(var == doctest::Approx(lambda).epsilon(0.05));
    }
}

TEST_CASE("poisson inversion is monotone in u") {
    const double lambda = 3.0;
    long prev = 0;
    for (int i = 1; i <= 1000; ++i) {
        const long k = poisson_inversion(static_cast<double>(i) / 1001.0, lambda);
        CHECK(k >= prev);
        prev = k;
    }
}
