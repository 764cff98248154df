#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace dinfo {

/// SplitMix64 finalizer. Full-avalanche mix of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ (mix64(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return hash_mix(hash_mix(a, b), c);
}

/// Uniform double in [0, 1) from the top 53 bits of a word.
inline double u64_to_unit(std::uint64_t w) {
    return static_cast<double>(w >> 11) * 0x1.0p-53;
}

/// Stateless counter-based random stream: value i of stream (seed) is a pure
/// function of (seed, i). Streams with distinct seeds are independent, and a
/// stream can be evaluated at any index without generating its predecessors.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t counter) const { return mix64(seed_ ^ mix64(counter)); }

    /// Uniform in [0, 1).
    double uniform(std::uint64_t counter) const { return u64_to_unit(bits(counter)); }

    /// Standard normal via Box-Muller; one draw consumes counters 2c and 2c+1.
    double normal(std::uint64_t counter) const {
        // (0,1] for the log argument so log(0) cannot occur
        const double u1 = 1.0 - uniform(2 * counter);
        const double u2 = uniform(2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

/// Unbiased bounded integer in [0, n) from a stateless word stream
/// (Lemire multiply-shift with rejection).
class BoundedDraw {
public:
    explicit BoundedDraw(std::uint64_t seed) : seed_(seed), cursor_(0) {}

    std::uint64_t next_below(std::uint64_t n) {
        for (;;) {
            const std::uint64_t x = mix64(seed_ ^ mix64(cursor_++));
            const unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
            const std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo >= n) return static_cast<std::uint64_t>(m >> 64);
            const std::uint64_t threshold = (0 - n) % n;
            if (lo >= threshold) return static_cast<std::uint64_t>(m >> 64);
        }
    }

private:
    std::uint64_t seed_;
    std::uint64_t cursor_;
};

/// Sample `count` distinct integers from [lo, hi] by partial Fisher-Yates.
/// Deterministic given the seed; order is the draw order.
std::vector<std::int64_t> sample_distinct(std::int64_t lo, std::int64_t hi, std::size_t count,
                                          std::uint64_t seed);

/// Sum n terms in a thread-count-independent order: fixed-size blocks are
/// summed serially (possibly by different threads), then block partials are
/// combined in index order. Bit-stable for any OpenMP thread count.
double blocked_sum(std::span<const double> terms);

/// Same summation order as blocked_sum but terms are produced on the fly by
/// term(i), avoiding materialization.
template <class F>
double blocked_sum_n(std::size_t n, F&& term) {
    constexpr std::size_t kBlock = 4096;
    if (n == 0) return 0.0;
    const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(n_blocks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_blocks); ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
        const std::size_t end = begin + kBlock < n ? begin + kBlock : n;
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += term(i);
        partial[static_cast<std::size_t>(b)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace dinfo
