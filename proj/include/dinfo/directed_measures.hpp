#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "dinfo/fp_workspace.hpp"
#include "dinfo/knn.hpp"
#include "dinfo/timeseries.hpp"

namespace dinfo {

enum class MeasureKind { TE, IIE, DI };

std::string to_string(MeasureKind kind);
MeasureKind measure_kind_from_string(const std::string& s);

/// A named information-rate estimate (nats) together with everything needed
/// to reproduce it. For DI the value is TE + IIE by construction and both
/// addends are reported.
struct MeasureEstimate {
    MeasureKind kind = MeasureKind::TE;
    double value = 0.0;
    double te = std::numeric_limits<double>::quiet_NaN();
    double iie = std::numeric_limits<double>::quiet_NaN();
    std::string source;
    std::string target;
    std::vector<std::string> cond;
    EmbeddingSpec spec;
    EstimatorConfig estimator;
    Eigen::Index n_effective = 0;
};

/// Conditional transfer entropy rate: finite-lag estimate of
/// I(source past; target_t | target past, cond up to t). The source's present
/// sample never enters the cloud.
MeasureEstimate transfer_entropy_rate(const TimeSeriesSet& ts, Eigen::Index source,
                                      Eigen::Index target, const std::vector<Eigen::Index>& cond,
                                      const EmbeddingSpec& spec, const EstimatorConfig& est,
                                      NeighborBackend backend = NeighborBackend::KdTreeIndex);

/// Conditional instantaneous information exchange rate: finite-lag estimate
/// of I(source_t; target_t | both pasts, cond up to t). Symmetric in source
/// and target.
MeasureEstimate instantaneous_exchange_rate(const TimeSeriesSet& ts, Eigen::Index source,
                                            Eigen::Index target,
                                            const std::vector<Eigen::Index>& cond,
                                            const EmbeddingSpec& spec, const EstimatorConfig& est,
                                            NeighborBackend backend = NeighborBackend::KdTreeIndex);

/// Causal conditional directed information rate, defined as the sum of the
/// two measures above on identical inputs; the identity is exact by
/// construction.
MeasureEstimate directed_info_rate(const TimeSeriesSet& ts, Eigen::Index source,
                                   Eigen::Index target, const std::vector<Eigen::Index>& cond,
                                   const EmbeddingSpec& spec, const EstimatorConfig& est,
                                   NeighborBackend backend = NeighborBackend::KdTreeIndex);

MeasureEstimate estimate_measure(MeasureKind kind, const TimeSeriesSet& ts, Eigen::Index source,
                                 Eigen::Index target, const std::vector<Eigen::Index>& cond,
                                 const EmbeddingSpec& spec, const EstimatorConfig& est,
                                 NeighborBackend backend = NeighborBackend::KdTreeIndex);

/// Repeated evaluation of one measure statistic on recordings that differ
/// from the reference only in the source channel — the surrogate-test inner
/// loop. Blocks not derived from the source channel are indexed once at
/// construction; values are bit-identical to estimate_measure on the same
/// data. Falls back to plain estimation when the fast path does not apply
/// (jitter enabled, DI, brute-force backends, or too few fixed dimensions).
class MeasureEngine {
public:
    MeasureEngine(MeasureKind kind, const TimeSeriesSet& ts, Eigen::Index source,
                  Eigen::Index target, const std::vector<Eigen::Index>& cond,
                  const EmbeddingSpec& spec, const EstimatorConfig& est,
                  NeighborBackend backend = NeighborBackend::KdTreeIndex);

    /// Statistic value for a recording of the same shape whose non-source
    /// channels equal the reference's.
    double evaluate(const TimeSeriesSet& ts_variant) const;

private:
    MeasureKind kind_;
    Eigen::Index source_;
    Eigen::Index target_;
    std::vector<Eigen::Index> cond_;
    EmbeddingSpec spec_;
    EstimatorConfig est_;
    NeighborBackend backend_;
    std::unique_ptr<FpCmiWorkspace> workspace_;
};

}  // namespace dinfo
