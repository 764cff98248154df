#include "dinfo/knn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "dinfo/fp_workspace.hpp"
#include "dinfo/rng.hpp"

namespace dinfo {

void EstimatorConfig::validate() const {
    if (k < 1) throw std::invalid_argument("estimator k must be >= 1");
    if (!(jitter_scale >= 0.0 && jitter_scale <= 1e-6))
        throw std::invalid_argument("jitter_scale must lie in [0, 1e-6]");
}

double digamma(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("digamma requires x > 0");
    double result = 0.0;
    while (x < 6.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv;
    result -= inv2 * (1.0 / 12.0 -
                      inv2 * (1.0 / 120.0 -
                              inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    return result;
}

namespace {

std::uint64_t value_hash(double v) { return mix64(std::bit_cast<std::uint64_t>(v)); }

void check_block(const RowMatrix& m, const char* name, Eigen::Index n) {
    if (m.rows() != n) throw std::invalid_argument(std::string(name) + ": row count mismatch");
    if (!m.allFinite()) throw std::invalid_argument(std::string(name) + ": non-finite entries");
}

}  // namespace

RowMatrix assemble_jittered_cloud(const RowMatrix& x, const RowMatrix& y, const RowMatrix& z,
                                  const EstimatorConfig& cfg) {
    const Eigen::Index n = x.rows();
    const Eigen::Index dx = x.cols(), dy = y.cols(), dz = z.cols();
    RowMatrix joint(n, dx + dz + dy);
    joint.block(0, 0, n, dx) = x;
    if (dz > 0) joint.block(0, dx, n, dz) = z;
    joint.block(0, dx + dz, n, dy) = y;
    if (cfg.jitter_scale == 0.0) return joint;

    // Per-column amplitude follows the column's own spread so jitter stays
    // relative; a constant column keeps amplitude 0 and stays constant.
    const Eigen::Index d = joint.cols();
    std::vector<double> scale(static_cast<std::size_t>(d));
    for (Eigen::Index c = 0; c < d; ++c) {
        const double mean = joint.col(c).mean();
        scale[static_cast<std::size_t>(c)] =
            std::sqrt((joint.col(c).array() - mean).square().sum() / static_cast<double>(n));
    }

    const std::int64_t rows = n;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i) {
        // Order-independent content hash: relabeling roles (hence permuting
        // columns) does not change a point's jitter stream.
        std::uint64_t pt_hash = 0;
        for (Eigen::Index c = 0; c < d; ++c) pt_hash ^= value_hash(joint(i, c));
        for (Eigen::Index c = 0; c < d; ++c) {
            const double v = joint(i, c);
            const double u = u64_to_unit(hash_mix(cfg.seed, pt_hash, value_hash(v)));
            joint(i, c) = v + cfg.jitter_scale * scale[static_cast<std::size_t>(c)] * (u - 0.5);
        }
    }
    return joint;
}

double fp_cmi(const RowMatrix& x, const RowMatrix& y, const RowMatrix& z,
              const EstimatorConfig& cfg, NeighborBackend backend) {
    cfg.validate();
    const Eigen::Index n = x.rows();
    if (n < 2) throw std::invalid_argument("fp_cmi needs at least 2 samples");
    if (x.cols() < 1 || y.cols() < 1)
        throw std::invalid_argument("fp_cmi needs nonempty x and y blocks");
    check_block(x, "x", n);
    check_block(y, "y", n);
    if (z.cols() > 0) check_block(z, "z", n);
    if (static_cast<Eigen::Index>(cfg.k) >= n)
        throw std::invalid_argument("estimator k must be < sample count");

    const std::size_t dx = static_cast<std::size_t>(x.cols());
    const std::size_t dz = static_cast<std::size_t>(z.cols());
    const std::size_t dy = static_cast<std::size_t>(y.cols());
    const RowMatrix joint = assemble_jittered_cloud(x, y, z, cfg);
    const CloudView joint_view = view_all(joint);
    const std::size_t nn = static_cast<std::size_t>(n);

    if (backend == NeighborBackend::KdTreeIndex && dz >= 2) {
        // One bounded tree walk per query via the workspace index.
        const RowMatrix z_slice = joint.middleCols(static_cast<Eigen::Index>(dx),
                                                   static_cast<Eigen::Index>(dz));
        const RowMatrix y_slice = joint.rightCols(static_cast<Eigen::Index>(dy));
        const RowMatrix x_slice = joint.leftCols(static_cast<Eigen::Index>(dx));
        const FpCmiWorkspace workspace(z_slice, y_slice, cfg);
        const RowMatrix empty_zv(joint.rows(), 0);
        return workspace.evaluate(x_slice, empty_zv);
    }

    std::vector<std::int64_t> n_xz(nn), n_yz(nn), n_z(nn);
    const std::vector<double> eps = kth_neighbor_distances(joint_view, cfg.k, backend);
    for (double e : eps)
        if (e <= 0.0)
            throw std::invalid_argument(
                "duplicate points after jitter: k-th neighbor distance is zero; "
                "increase jitter_scale");

    if (dz == 0) {
        n_xz = range_counts(view_cols(joint, 0, dx), eps, backend);
        n_yz = range_counts(view_cols(joint, dx, dy), eps, backend);
        for (auto& c : n_z) c = static_cast<std::int64_t>(nn) - 1;
    } else {
        n_xz = range_counts(view_cols(joint, 0, dx + dz), eps, backend);
        n_yz = range_counts(view_cols(joint, dx, dz + dy), eps, backend);
        n_z = range_counts(view_cols(joint, dx, dz), eps, backend);
    }
    return detail::fp_combine(cfg.k, n_z, n_xz, n_yz);
}

double ksg_mi(const RowMatrix& x, const RowMatrix& y, const EstimatorConfig& cfg,
              NeighborBackend backend) {
    const RowMatrix empty_z(x.rows(), 0);
    return fp_cmi(x, y, empty_z, cfg, backend);
}

namespace detail {

double fp_combine(int k, std::span<const std::int64_t> nz, std::span<const std::int64_t> nxz,
                  std::span<const std::int64_t> nyz) {
    const std::size_t n = nz.size();
    std::vector<double> terms(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        const std::size_t qi = static_cast<std::size_t>(i);
        // The inner sum keeps the term invariant under exchanging the roles
        // of x and y (IEEE addition commutes; subtraction order would not).
        terms[qi] = digamma(static_cast<double>(nz[qi] + 1)) -
                    (digamma(static_cast<double>(nxz[qi] + 1)) +
                     digamma(static_cast<double>(nyz[qi] + 1)));
    }
    // Canonical summation order: the average is then invariant under row
    // permutations of the input clouds, not just reproducible.
    std::sort(terms.begin(), terms.end());
    return digamma(static_cast<double>(k)) + blocked_sum(terms) / static_cast<double>(n);
}

}  // namespace detail

}  // namespace dinfo
