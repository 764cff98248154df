#include "dinfo/rng.hpp"

#include <stdexcept>

namespace dinfo {

std::vector<std::int64_t> sample_distinct(std::int64_t lo, std::int64_t hi, std::size_t count,
                                          std::uint64_t seed) {
    if (hi < lo) throw std::invalid_argument("sample_distinct: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (count > span) throw std::invalid_argument("sample_distinct: count exceeds range size");

    std::vector<std::int64_t> pool(span);
    for (std::uint64_t i = 0; i < span; ++i) pool[i] = lo + static_cast<std::int64_t>(i);

    BoundedDraw draw(seed);
    std::vector<std::int64_t> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t j = i + draw.next_below(span - i);
        std::swap(pool[i], pool[j]);
        out[i] = pool[i];
    }
    return out;
}

double blocked_sum(std::span<const double> terms) {
    constexpr std::size_t kBlock = 4096;
    const std::size_t n = terms.size();
    if (n == 0) return 0.0;
    const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(n_blocks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_blocks); ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
        const std::size_t end = begin + kBlock < n ? begin + kBlock : n;
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += terms[i];
        partial[static_cast<std::size_t>(b)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace dinfo
