#pragma once

#include <cstdint>

#include "dinfo/neighbors.hpp"
#include "dinfo/timeseries.hpp"

namespace dinfo {

/// Configuration of the k-nearest-neighbor estimators. The metric is always
/// the max-norm; jitter_scale is the relative amplitude of the deterministic
/// tie-breaking noise (0 disables it; quantized data usually needs > 0).
struct EstimatorConfig {
    int k = 4;
    double jitter_scale = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Digamma function, absolute error <= 1e-10 for x >= 1
/// (upward recurrence plus asymptotic series).
double digamma(double x);

/// Kraskov-Stoegbauer-Grassberger mutual information (algorithm 1), nats:
/// psi(k) + psi(n) - <psi(n_x+1) + psi(n_y+1)> with strict max-norm counts
/// inside each point's k-th joint neighbor distance.
double ksg_mi(const RowMatrix& x, const RowMatrix& y, const EstimatorConfig& cfg,
              NeighborBackend backend = NeighborBackend::KdTreeIndex);

/// Frenzel-Pompe conditional mutual information, nats:
/// psi(k) - <psi(n_xz+1) + psi(n_yz+1) - psi(n_z+1)>. With an empty z this is
/// the same code path as ksg_mi and returns bit-identical values.
double fp_cmi(const RowMatrix& x, const RowMatrix& y, const RowMatrix& z,
              const EstimatorConfig& cfg, NeighborBackend backend = NeighborBackend::KdTreeIndex);

/// The jittered joint cloud the estimators search in, laid out as [X | Z | Y]
/// (exposed for tests). Jitter is derived from the point's own coordinates,
/// so it is invariant under row permutation and role relabeling.
RowMatrix assemble_jittered_cloud(const RowMatrix& x, const RowMatrix& y, const RowMatrix& z,
                                  const EstimatorConfig& cfg);

namespace detail {
/// psi-formula tail shared by every FP evaluation path; the canonical
/// (sorted) summation order makes equal counts give bit-equal values.
double fp_combine(int k, std::span<const std::int64_t> nz, std::span<const std::int64_t> nxz,
                  std::span<const std::int64_t> nyz);
}  // namespace detail

}  // namespace dinfo
