#include "dinfo/neighbors.hpp"

#include <algorithm>
#include <stdexcept>

namespace dinfo {

namespace {

void check_cloud(const CloudView& cloud) {
    if (cloud.n == 0 || cloud.dim == 0)
        throw std::invalid_argument("neighbor search needs a nonempty cloud");
}

void check_k(const CloudView& cloud, int k) {
    if (k < 1) throw std::invalid_argument("neighbor count k must be >= 1");
    if (static_cast<std::size_t>(k) >= cloud.n)
        throw std::invalid_argument("neighbor count k must be < number of points");
}

// Plainest possible O(n^2) reference; kept as the permanent oracle.
std::vector<double> bf_kth_serial(const CloudView& cloud, int k) {
    const std::size_t n = cloud.n;
    std::vector<double> out(n);
    std::vector<double> dists;
    dists.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        dists.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            dists.push_back(chebyshev(cloud.point(i), cloud.point(j), cloud.dim));
        }
        std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
        out[i] = dists[static_cast<std::size_t>(k - 1)];
    }
    return out;
}

std::vector<std::int64_t> bf_counts_serial(const CloudView& cloud, std::span<const double> radii) {
    const std::size_t n = cloud.n;
    std::vector<std::int64_t> out(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t c = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (chebyshev(cloud.point(i), cloud.point(j), cloud.dim) < radii[i]) ++c;
        }
        out[i] = c;
    }
    return out;
}

// Insert d into a descending-front max-heap of capacity k.
inline void heap_push(std::vector<double>& heap, int k, double d) {
    if (static_cast<int>(heap.size()) < k) {
        heap.push_back(d);
        std::push_heap(heap.begin(), heap.end());
    } else if (d < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = d;
        std::push_heap(heap.begin(), heap.end());
    }
}

std::vector<double> bf_kth_parallel(const CloudView& cloud, int k) {
    const std::int64_t n = static_cast<std::int64_t>(cloud.n);
    std::vector<double> out(cloud.n);
#pragma omp parallel
    {
        std::vector<double> heap;
        heap.reserve(static_cast<std::size_t>(k));
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            heap.clear();
            const double* q = cloud.point(static_cast<std::size_t>(i));
            for (std::int64_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double bound = static_cast<int>(heap.size()) < k
                                         ? std::numeric_limits<double>::infinity()
                                         : heap.front();
                const double d =
                    chebyshev_bounded(q, cloud.point(static_cast<std::size_t>(j)), cloud.dim, bound);
                if (d < bound) heap_push(heap, k, d);
            }
            out[static_cast<std::size_t>(i)] = heap.front();
        }
    }
    return out;
}

std::vector<std::int64_t> bf_counts_parallel(const CloudView& cloud, std::span<const double> radii) {
    const std::int64_t n = static_cast<std::int64_t>(cloud.n);
    std::vector<std::int64_t> out(cloud.n, 0);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double* q = cloud.point(static_cast<std::size_t>(i));
        const double r = radii[static_cast<std::size_t>(i)];
        std::int64_t c = 0;
        for (std::int64_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (within_chebyshev(q, cloud.point(static_cast<std::size_t>(j)), cloud.dim, r)) ++c;
        }
        out[static_cast<std::size_t>(i)] = c;
    }
    return out;
}

}  // namespace

KdTree::KdTree(CloudView cloud, int leaf_size) : cloud_(cloud) {
    check_cloud(cloud);
    if (leaf_size < 1) throw std::invalid_argument("leaf size must be >= 1");
    perm_.resize(cloud.n);
    for (std::size_t i = 0; i < cloud.n; ++i) perm_[i] = static_cast<std::int32_t>(i);
    nodes_.reserve(2 * cloud.n / static_cast<std::size_t>(leaf_size) + 2);
    build(0, static_cast<std::int32_t>(cloud.n), leaf_size);
}

std::int32_t KdTree::build(std::int32_t begin, std::int32_t end, int leaf_size) {
    const std::int32_t idx = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{-1, -1, begin, end});
    const std::size_t dim = cloud_.dim;
    box_lo_.resize(box_lo_.size() + dim, std::numeric_limits<double>::infinity());
    box_hi_.resize(box_hi_.size() + dim, -std::numeric_limits<double>::infinity());
    double* lo = box_lo_.data() + static_cast<std::size_t>(idx) * dim;
    double* hi = box_hi_.data() + static_cast<std::size_t>(idx) * dim;
    for (std::int32_t i = begin; i < end; ++i) {
        const double* p = cloud_.point(static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)]));
        for (std::size_t j = 0; j < dim; ++j) {
            lo[j] = std::min(lo[j], p[j]);
            hi[j] = std::max(hi[j], p[j]);
        }
    }
    if (end - begin <= leaf_size) return idx;

    std::size_t split_dim = 0;
    double width = -1.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double w = hi[j] - lo[j];
        if (w > width) {
            width = w;
            split_dim = j;
        }
    }
    if (width <= 0.0) return idx;  // all points identical: keep as leaf

    const std::int32_t mid = begin + (end - begin) / 2;
    std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                     [&](std::int32_t a, std::int32_t b) {
                         return cloud_.point(static_cast<std::size_t>(a))[split_dim] <
                                cloud_.point(static_cast<std::size_t>(b))[split_dim];
                     });

    const std::int32_t left = build(begin, mid, leaf_size);
    const std::int32_t right = build(mid, end, leaf_size);
    nodes_[static_cast<std::size_t>(idx)].left = left;
    nodes_[static_cast<std::size_t>(idx)].right = right;
    return idx;
}

double KdTree::box_distance(const double* q, std::size_t node) const {
    const double* lo = box_lo_.data() + node * cloud_.dim;
    const double* hi = box_hi_.data() + node * cloud_.dim;
    double d = 0.0;
    for (std::size_t j = 0; j < cloud_.dim; ++j) {
        if (q[j] < lo[j])
            d = std::max(d, lo[j] - q[j]);
        else if (q[j] > hi[j])
            d = std::max(d, q[j] - hi[j]);
    }
    return d;
}

double KdTree::box_far_distance(const double* q, std::size_t node) const {
    const double* lo = box_lo_.data() + node * cloud_.dim;
    const double* hi = box_hi_.data() + node * cloud_.dim;
    double d = 0.0;
    for (std::size_t j = 0; j < cloud_.dim; ++j)
        d = std::max(d, std::max(std::abs(q[j] - lo[j]), std::abs(q[j] - hi[j])));
    return d;
}

void KdTree::knn_recurse(const double* q, std::size_t skip, std::size_t node, int k,
                         std::vector<double>& heap) const {
    const Node& nd = nodes_[node];
    if (nd.left < 0) {
        for (std::int32_t i = nd.begin; i < nd.end; ++i) {
            const std::size_t j = static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)]);
            if (j == skip) continue;
            const double bound = static_cast<int>(heap.size()) < k
                                     ? std::numeric_limits<double>::infinity()
                                     : heap.front();
            const double* p = cloud_.point(j);
            if (!within_chebyshev(q, p, cloud_.dim, bound)) continue;
            heap_push(heap, k, chebyshev(q, p, cloud_.dim));
        }
        return;
    }
    const std::size_t left = static_cast<std::size_t>(nd.left);
    const std::size_t right = static_cast<std::size_t>(nd.right);
    double dl = box_distance(q, left);
    double dr = box_distance(q, right);
    std::size_t first = left, second = right;
    if (dr < dl) {
        std::swap(first, second);
        std::swap(dl, dr);
    }
    if (static_cast<int>(heap.size()) < k || dl < heap.front()) knn_recurse(q, skip, first, k, heap);
    if (static_cast<int>(heap.size()) < k || dr < heap.front()) knn_recurse(q, skip, second, k, heap);
}

double KdTree::kth_distance(std::size_t query_idx, int k) const {
    check_k(cloud_, k);
    std::vector<double> heap;
    heap.reserve(static_cast<std::size_t>(k));
    knn_recurse(cloud_.point(query_idx), query_idx, 0, k, heap);
    return heap.front();
}

void KdTree::count_recurse(const double* q, std::size_t skip, std::size_t node, double radius,
                           std::int64_t& count) const {
    if (box_distance(q, node) >= radius) return;
    const Node& nd = nodes_[node];
    if (box_far_distance(q, node) < radius) {
        count += nd.end - nd.begin;
        return;  // self is subtracted by the caller
    }
    if (nd.left < 0) {
        for (std::int32_t i = nd.begin; i < nd.end; ++i) {
            const std::size_t j = static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)]);
            if (j == skip) continue;
            if (within_chebyshev(q, cloud_.point(j), cloud_.dim, radius)) ++count;
        }
        return;
    }
    count_recurse(q, skip, static_cast<std::size_t>(nd.left), radius, count);
    count_recurse(q, skip, static_cast<std::size_t>(nd.right), radius, count);
}

std::int64_t KdTree::count_within(std::size_t query_idx, double radius) const {
    if (!(radius >= 0.0)) throw std::invalid_argument("radius must be >= 0");
    if (radius == 0.0) return 0;
    // Count with the query point included (whole-subtree inclusion cannot
    // exclude it) and remove it at the end; its distance 0 is always < radius.
    std::int64_t count = 0;
    count_recurse(cloud_.point(query_idx), cloud_.n, 0, radius, count);
    return count - 1;
}

void KdTree::members_recurse(const double* q, std::size_t skip, std::size_t node, double radius,
                             std::vector<std::int32_t>& out) const {
    if (box_distance(q, node) >= radius) return;
    const Node& nd = nodes_[node];
    if (box_far_distance(q, node) < radius) {
        for (std::int32_t i = nd.begin; i < nd.end; ++i) {
            const std::int32_t j = perm_[static_cast<std::size_t>(i)];
            if (static_cast<std::size_t>(j) != skip) out.push_back(j);
        }
        return;
    }
    if (nd.left < 0) {
        for (std::int32_t i = nd.begin; i < nd.end; ++i) {
            const std::int32_t j = perm_[static_cast<std::size_t>(i)];
            if (static_cast<std::size_t>(j) == skip) continue;
            if (within_chebyshev(q, cloud_.point(static_cast<std::size_t>(j)), cloud_.dim, radius))
                out.push_back(j);
        }
        return;
    }
    members_recurse(q, skip, static_cast<std::size_t>(nd.left), radius, out);
    members_recurse(q, skip, static_cast<std::size_t>(nd.right), radius, out);
}

void KdTree::ball_members(std::size_t query_idx, double radius,
                          std::vector<std::int32_t>& out) const {
    out.clear();
    if (!(radius > 0.0)) return;
    members_recurse(cloud_.point(query_idx), query_idx, 0, radius, out);
}

std::vector<double> kth_neighbor_distances(CloudView cloud, int k, NeighborBackend backend) {
    check_cloud(cloud);
    check_k(cloud, k);
    switch (backend) {
        case NeighborBackend::BruteForceSerial:
            return bf_kth_serial(cloud, k);
        case NeighborBackend::BruteForceParallel:
            return bf_kth_parallel(cloud, k);
        case NeighborBackend::KdTreeIndex: {
            KdTree tree(cloud);
            std::vector<double> out(cloud.n);
            const std::int64_t n = static_cast<std::int64_t>(cloud.n);
#pragma omp parallel for schedule(static)
            for (std::int64_t i = 0; i < n; ++i)
                out[static_cast<std::size_t>(i)] = tree.kth_distance(static_cast<std::size_t>(i), k);
            return out;
        }
    }
    throw std::logic_error("unknown neighbor backend");
}

std::vector<std::int64_t> range_counts(CloudView cloud, std::span<const double> radii,
                                       NeighborBackend backend) {
    check_cloud(cloud);
    if (radii.size() != cloud.n)
        throw std::invalid_argument("range_counts needs one radius per point");
    switch (backend) {
        case NeighborBackend::BruteForceSerial:
            return bf_counts_serial(cloud, radii);
        case NeighborBackend::BruteForceParallel:
            return bf_counts_parallel(cloud, radii);
        case NeighborBackend::KdTreeIndex: {
            KdTree tree(cloud);
            std::vector<std::int64_t> out(cloud.n);
            const std::int64_t n = static_cast<std::int64_t>(cloud.n);
#pragma omp parallel for schedule(static)
            for (std::int64_t i = 0; i < n; ++i)
                out[static_cast<std::size_t>(i)] =
                    tree.count_within(static_cast<std::size_t>(i), radii[static_cast<std::size_t>(i)]);
            return out;
        }
    }
    throw std::logic_error("unknown neighbor backend");
}

}  // namespace dinfo
