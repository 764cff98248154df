#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dinfo/directed_measures.hpp"
#include "dinfo/timeseries.hpp"

namespace dinfo {

enum class EdgeKind { Directed, Undirected };
enum class Correction { BH, Bonferroni };

std::string to_string(EdgeKind kind);
std::string to_string(Correction c);
Correction correction_from_string(const std::string& s);

/// Outcome of one surrogate test. The p-value follows the rank formula
/// p = (1 + #{null >= observed}) / (1 + n_surrogates), so its smallest
/// attainable value is 1/(1+n_surrogates).
struct EdgeTestResult {
    EdgeKind kind = EdgeKind::Directed;
    Eigen::Index from = 0;  // for undirected tests, the smaller index
    Eigen::Index to = 0;
    double statistic = 0.0;
    std::vector<double> null_sample;
    double p_value = 1.0;
    bool reject = false;  // decision after multiple-testing correction
};

struct InferenceConfig {
    EmbeddingSpec spec;
    EstimatorConfig estimator;
    int n_surrogates = 99;
    double alpha = 0.05;           // level for Bonferroni
    double fdr_q = 0.05;           // FDR target for BH
    Correction correction = Correction::BH;
    std::uint64_t seed = 0;
    double min_shift = 0.1;        // surrogate shifts stay in [min_shift*T, (1-min_shift)*T]

    void validate() const;
};

/// Mixed Granger causality graph: directed edges from the transfer-entropy
/// tests, undirected edges from the instantaneous-exchange tests, plus the
/// full per-edge test results (also for absent edges).
struct CausalityGraph {
    std::vector<std::string> nodes;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> directed;    // ordered (from, to)
    std::vector<std::pair<Eigen::Index, Eigen::Index>> undirected;  // unordered, stored (min, max)
    std::vector<EdgeTestResult> results;
};

/// Rotates one channel by `shift` samples (out[t] = in[(t+shift) mod T]);
/// every other channel is untouched. The shift must stay inside the allowed
/// band so the surrogate really destroys cross-channel alignment.
TimeSeriesSet circular_shift_surrogate(const TimeSeriesSet& ts, Eigen::Index channel,
                                       Eigen::Index shift, double min_shift);

/// Tests one candidate edge: observed statistic (conditional TE or IIE on the
/// given conditioning set) against a null of source-channel circular shifts.
/// Deterministic given (ts, pair, cfg): shifts are drawn without replacement
/// with a seed derived from (master seed, kind, pair).
EdgeTestResult edge_pvalue(const TimeSeriesSet& ts, EdgeKind kind,
                           std::pair<Eigen::Index, Eigen::Index> pair,
                           const std::vector<Eigen::Index>& cond, const InferenceConfig& cfg,
                           NeighborBackend backend = NeighborBackend::KdTreeIndex);

/// Benjamini-Hochberg step-up: sort ascending, find the largest i with
/// p_(i) <= i*q/m, reject the first i.
std::vector<bool> bh_adjust(const std::vector<double>& pvalues, double q);

/// Bonferroni: reject p <= alpha/m.
std::vector<bool> bonferroni_adjust(const std::vector<double>& pvalues, double alpha);

/// Runs all M(M-1) directed and M(M-1)/2 undirected tests, each conditioned
/// on all remaining channels, corrects the two families separately, and
/// assembles the graph. Deterministic given (ts, cfg).
CausalityGraph infer_graph(const TimeSeriesSet& ts, const InferenceConfig& cfg,
                           NeighborBackend backend = NeighborBackend::KdTreeIndex);

/// DOT text: directed edges as `a -> b`, undirected as `a -- b`, each with a
/// p-value label.
std::string graph_to_dot(const CausalityGraph& graph);

}  // namespace dinfo
