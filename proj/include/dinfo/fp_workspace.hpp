#pragma once

#include <memory>

#include "dinfo/knn.hpp"
#include "dinfo/timeseries.hpp"

namespace dinfo {

namespace detail {
class JointBallIndex;
}

/// Reusable state for repeated Frenzel-Pompe evaluations that share the Y
/// block and a fixed part of the Z block while other blocks change — the
/// surrogate-test inner loop, where only source-channel columns move.
///
/// The index is built once over (z_fixed, y): a kd decomposition of the
/// z_fixed subspace with the points gathered into traversal order. One
/// best-first walk per query yields the exact k-th joint-space neighbor
/// distance and the z-ball membership counts; variable blocks enter through
/// per-dimension bound tests only. Values are bit-identical to fp_cmi on the
/// equivalent assembled blocks.
class FpCmiWorkspace {
public:
    /// z_fixed needs at least 2 columns; blocks must be pre-jittered if
    /// jitter is wanted (the workspace never applies jitter itself).
    FpCmiWorkspace(const RowMatrix& z_fixed, const RowMatrix& y, const EstimatorConfig& cfg);
    ~FpCmiWorkspace();
    FpCmiWorkspace(FpCmiWorkspace&&) noexcept;
    FpCmiWorkspace& operator=(FpCmiWorkspace&&) noexcept;

    /// FP conditional mutual information I(x; y | z_fixed ⊕ z_var) in nats;
    /// z_var may have zero columns. Thread-safe for concurrent calls.
    double evaluate(const RowMatrix& x, const RowMatrix& z_var) const;

    Eigen::Index sample_count() const;

private:
    std::unique_ptr<detail::JointBallIndex> index_;
    EstimatorConfig cfg_;
};

}  // namespace dinfo
