// Compares the serial brute-force reference against the OpenMP brute-force
// kernel and the kd-tree index on random Gaussian clouds, for both k-th
// neighbor distances and strict range counts, then times a full CMI estimate
// per backend. All backends must agree exactly; timings go to stdout.
//
// Usage: dinfo-bench [n] [dim] [k]

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "dinfo/knn.hpp"
#include "dinfo/neighbors.hpp"
#include "dinfo/rng.hpp"

using namespace dinfo;

namespace {

RowMatrix random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed) {
    CounterRng rng(seed);
    RowMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rng.normal(i * dim + j);
    return m;
}

template <class F>
double timed(F&& fn) {
    const double t0 = omp_get_wtime();
    fn();
    return omp_get_wtime() - t0;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::stoul(argv[1]) : 4000;
    const std::size_t dim = argc > 2 ? std::stoul(argv[2]) : 8;
    const int k = argc > 3 ? std::stoi(argv[3]) : 4;

    std::printf("cloud: n=%zu dim=%zu k=%d threads=%d\n", n, dim, k, omp_get_max_threads());

    const RowMatrix cloud = random_cloud(n, dim, 42);
    const CloudView view = view_all(cloud);

    std::vector<double> d_serial, d_parallel, d_tree;
    const double t_kth_serial =
        timed([&] { d_serial = kth_neighbor_distances(view, k, NeighborBackend::BruteForceSerial); });
    const double t_kth_parallel = timed(
        [&] { d_parallel = kth_neighbor_distances(view, k, NeighborBackend::BruteForceParallel); });
    const double t_kth_tree =
        timed([&] { d_tree = kth_neighbor_distances(view, k, NeighborBackend::KdTreeIndex); });

    bool kth_ok = d_serial == d_parallel && d_serial == d_tree;
    std::printf("kth distances : serial %.3fs | omp %.3fs (%.1fx) | kdtree %.3fs (%.1fx) | %s\n",
                t_kth_serial, t_kth_parallel, t_kth_serial / t_kth_parallel, t_kth_tree,
                t_kth_serial / t_kth_tree, kth_ok ? "exact match" : "MISMATCH");

    std::vector<std::int64_t> c_serial, c_parallel, c_tree;
    const double t_cnt_serial =
        timed([&] { c_serial = range_counts(view, d_serial, NeighborBackend::BruteForceSerial); });
    const double t_cnt_parallel = timed(
        [&] { c_parallel = range_counts(view, d_serial, NeighborBackend::BruteForceParallel); });
    const double t_cnt_tree =
        timed([&] { c_tree = range_counts(view, d_serial, NeighborBackend::KdTreeIndex); });

    bool cnt_ok = c_serial == c_parallel && c_serial == c_tree;
    std::printf("range counts  : serial %.3fs | omp %.3fs (%.1fx) | kdtree %.3fs (%.1fx) | %s\n",
                t_cnt_serial, t_cnt_parallel, t_cnt_serial / t_cnt_parallel, t_cnt_tree,
                t_cnt_serial / t_cnt_tree, cnt_ok ? "exact match" : "MISMATCH");

    // A realistic conditional estimate: 3 source lags, 1 target sample,
    // dim-4 conditioning block.
    if (dim >= 5) {
        const RowMatrix x = cloud.leftCols(3);
        const RowMatrix y = cloud.middleCols(3, 1);
        const RowMatrix z = cloud.rightCols(static_cast<Eigen::Index>(dim) - 4);
        EstimatorConfig cfg;
        cfg.k = k;
        double v_serial = 0, v_parallel = 0, v_tree = 0;
        const double t_serial =
            timed([&] { v_serial = fp_cmi(x, y, z, cfg, NeighborBackend::BruteForceSerial); });
        const double t_parallel =
            timed([&] { v_parallel = fp_cmi(x, y, z, cfg, NeighborBackend::BruteForceParallel); });
        const double t_tree =
            timed([&] { v_tree = fp_cmi(x, y, z, cfg, NeighborBackend::KdTreeIndex); });
        bool cmi_ok = v_serial == v_parallel && v_serial == v_tree;
        std::printf("fp_cmi        : serial %.3fs | omp %.3fs (%.1fx) | kdtree %.3fs (%.1fx) | %s\n",
                    t_serial, t_parallel, t_serial / t_parallel, t_tree, t_serial / t_tree,
                    cmi_ok ? "exact match" : "MISMATCH");
    }

    return (kth_ok && cnt_ok) ? 0 : 1;
}
