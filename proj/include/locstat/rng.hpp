#pragma once

#include <cstdint>

namespace locstat {

// Reproducibility contract
// ------------------------
// All randomness flows through CounterRng, a counter-based generator built on
// the SplitMix64 finalizer: draw i of a stream with key k is
//
//     finalize(k + (i+1) * 0x9E3779B97F4A7C15)
//
// so streams are stateless, index-addressable, and identical across
// platforms, compilers and thread counts. Substreams (one per trajectory or
// per Monte Carlo replication) are derived with derive_stream(master, index);
// dropping a replication never shifts any other replication's draws.
//
// Gaussian variates use the inverse CDF (Wichura's AS241, double precision)
// applied to one uniform per draw. Poisson variates use sequential inversion
// for lambda < 10 and Hormann's PTRS transformed rejection otherwise.

/// SplitMix64 finalizer (bijective 64-bit mix).
constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives the key of substream `index` of a master seed.
constexpr std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) {
    return splitmix64_finalize(splitmix64_finalize(master) +
                               0x9E3779B97F4A7C15ULL * (index + 1));
}

/// Phi^{-1}(p) for p in (0,1), Wichura's algorithm AS241 (PPND16).
double inverse_normal_cdf(double p);

/// Standard normal CDF.
double normal_cdf(double x);

/// Poisson quantile by sequential inversion of a single uniform. Monotone in
/// u, which makes it the coupling-friendly sampler. O(lambda) per draw.
long poisson_inversion(double u, double lambda);

class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return at_u64(counter_++); }

    /// Uniform draw in the open interval (0, 1).
    double uniform() { return to_open_unit(next_u64()); }

    /// Index-addressable uniform: draw `i` of this stream, independent of the
    /// sequential counter. Used by the coupling simulator to share
    /// innovations between chains.
    double uniform_at(std::uint64_t i) const { return to_open_unit(at_u64(i)); }

    std::uint64_t counter() const { return counter_; }
    void set_counter(std::uint64_t c) { counter_ = c; }

    /// Standard normal via the inverse CDF (one uniform consumed).
    double normal() { return inverse_normal_cdf(uniform()); }

    /// Poisson(lambda); inversion below lambda = 10, PTRS above.
    long poisson(double lambda);

private:
    std::uint64_t at_u64(std::uint64_t i) const {
        return splitmix64_finalize(key_ + 0x9E3779B97F4A7C15ULL * (i + 1));
    }
    static double to_open_unit(std::uint64_t x) {
        double u = static_cast<double>(x >> 11) * 0x1.0p-53;
        if (u <= 0.0) u = 0x1.0p-53;
        return u;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace locstat
