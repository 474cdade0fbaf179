#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace locstat {

using VecD = std::vector<double>;

/// Raised when a simulated recursion leaves the numerically representable
/// region (|x| > 1e12, sigma^2 > 1e24, or any non-finite value).
class explosion_error : public std::runtime_error {
public:
    explosion_error(int t, double value)
        : std::runtime_error("trajectory exploded at t=" + std::to_string(t) +
                             " (value=" + std::to_string(value) + ")"),
          t(t), value(value) {}
    int t;
    double value;
};

/// Raised when a localization window contains no sample point.
class degenerate_window_error : public std::runtime_error {
public:
    explicit degenerate_window_error(double u)
        : std::runtime_error("empty localization window at u=" + std::to_string(u)), u(u) {}
    double u;
};

/// Raised when a Lipschitz profile has a divergent tail (kappa <= 1) or
/// a contraction bound is requested with B0 >= 1.
class inadmissible_profile_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kExplosionValueLimit = 1e12;
inline constexpr double kExplosionVarianceLimit = 1e24;

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Results must be
/// written to preallocated, disjoint slots so the caller's reduction order is
/// independent of the thread count.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

/// LOCSTAT_THREADS env var, falling back to `fallback` when unset/invalid.
int thread_count_from_env(int fallback);

}  // namespace locstat
