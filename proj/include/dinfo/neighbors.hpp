#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "dinfo/timeseries.hpp"

namespace dinfo {

/// Non-owning view of n points stored row-major, possibly a column slice of a
/// wider matrix (stride = doubles between consecutive points).
struct CloudView {
    const double* data = nullptr;
    std::size_t n = 0;
    std::size_t dim = 0;
    std::size_t stride = 0;

    const double* point(std::size_t i) const { return data + i * stride; }
};

inline CloudView view_all(const RowMatrix& m) {
    return {m.data(), static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
            static_cast<std::size_t>(m.cols())};
}

inline CloudView view_cols(const RowMatrix& m, std::size_t col0, std::size_t ncols) {
    return {m.data() + col0, static_cast<std::size_t>(m.rows()), ncols,
            static_cast<std::size_t>(m.cols())};
}

/// Max-norm distance. All search paths use this one routine so that exact
/// cross-backend equality is a statement about traversal, not arithmetic.
inline double chebyshev(const double* a, const double* b, std::size_t dim) {
    double d = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double v = std::abs(a[j] - b[j]);
        if (v > d) d = v;
    }
    return d;
}

/// Max-norm distance with early exit once it provably reaches `bound`.
/// The decision (dist >= bound) is exact; the returned value is only valid
/// when it is < bound.
inline double chebyshev_bounded(const double* a, const double* b, std::size_t dim, double bound) {
    double d = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double v = std::abs(a[j] - b[j]);
        if (v > d) {
            d = v;
            if (d >= bound) return d;
        }
    }
    return d;
}

/// Exactly (chebyshev(a, b, dim) < r), evaluated without the max dependency
/// chain so the per-dimension tests pipeline.
inline bool within_chebyshev(const double* a, const double* b, std::size_t dim, double r) {
    for (std::size_t j = 0; j < dim; ++j)
        if (std::abs(a[j] - b[j]) >= r) return false;
    return true;
}

enum class NeighborBackend { BruteForceSerial, BruteForceParallel, KdTreeIndex };

/// Exact k-th nearest neighbor search and strict range counting in max-norm,
/// excluding the query point itself. Splits on the widest box dimension at
/// the median; pruning bounds are conservative in IEEE arithmetic, so results
/// are bit-identical to brute force.
class KdTree {
public:
    explicit KdTree(CloudView cloud, int leaf_size = 32);

    /// Distance to the k-th nearest other point (k >= 1, k < n).
    double kth_distance(std::size_t query_idx, int k) const;

    /// Number of other points with distance < radius (strict).
    std::int64_t count_within(std::size_t query_idx, double radius) const;

    /// Indices of other points with distance < radius (strict); order is
    /// unspecified. Appends to `out` after clearing it.
    void ball_members(std::size_t query_idx, double radius, std::vector<std::int32_t>& out) const;

    const CloudView& cloud() const { return cloud_; }

private:
    struct Node {
        std::int32_t left = -1;    // -1 for leaves
        std::int32_t right = -1;
        std::int32_t begin = 0;    // range in perm_
        std::int32_t end = 0;
    };

    double box_distance(const double* q, std::size_t node) const;
    double box_far_distance(const double* q, std::size_t node) const;
    std::int32_t build(std::int32_t begin, std::int32_t end, int leaf_size);
    void knn_recurse(const double* q, std::size_t skip, std::size_t node, int k,
                     std::vector<double>& heap) const;
    void count_recurse(const double* q, std::size_t skip, std::size_t node, double radius,
                       std::int64_t& count) const;
    void members_recurse(const double* q, std::size_t skip, std::size_t node, double radius,
                         std::vector<std::int32_t>& out) const;

    CloudView cloud_;
    std::vector<Node> nodes_;
    std::vector<std::int32_t> perm_;
    std::vector<double> box_lo_;   // nodes x dim
    std::vector<double> box_hi_;
};

/// Distance to each point's k-th nearest other point.
std::vector<double> kth_neighbor_distances(CloudView cloud, int k,
                                           NeighborBackend backend = NeighborBackend::KdTreeIndex);

/// Per-point count of other points strictly within radii[i].
std::vector<std::int64_t> range_counts(CloudView cloud, std::span<const double> radii,
                                       NeighborBackend backend = NeighborBackend::KdTreeIndex);

}  // namespace dinfo
