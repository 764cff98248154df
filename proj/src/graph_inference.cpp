#include "dinfo/graph_inference.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dinfo/rng.hpp"

namespace dinfo {

namespace {

std::string format_p(double p) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), p);
    return std::string(buf, ptr);
}

}  // namespace

std::string to_string(EdgeKind kind) {
    return kind == EdgeKind::Directed ? "directed" : "undirected";
}

std::string to_string(Correction c) { return c == Correction::BH ? "BH" : "bonferroni"; }

Correction correction_from_string(const std::string& s) {
    if (s == "BH" || s == "bh") return Correction::BH;
    if (s == "bonferroni" || s == "Bonferroni") return Correction::Bonferroni;
    throw std::invalid_argument("unknown correction: " + s);
}

void InferenceConfig::validate() const {
    spec.validate();
    estimator.validate();
    if (n_surrogates < 19) throw std::invalid_argument("n_surrogates must be >= 19");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(fdr_q > 0.0 && fdr_q < 1.0)) throw std::invalid_argument("fdr_q must lie in (0,1)");
    if (!(min_shift > 0.0 && min_shift < 0.5))
        throw std::invalid_argument("min_shift must lie in (0, 0.5)");
}

TimeSeriesSet circular_shift_surrogate(const TimeSeriesSet& ts, Eigen::Index channel,
                                       Eigen::Index shift, double min_shift) {
    ts.validate();
    if (channel < 0 || channel >= ts.channel_count())
        throw std::invalid_argument("surrogate channel index out of range");
    if (!(min_shift > 0.0 && min_shift < 0.5))
        throw std::invalid_argument("min_shift must lie in (0, 0.5)");
    const Eigen::Index t = ts.sample_count();
    const double lo = min_shift * static_cast<double>(t);
    const double hi = (1.0 - min_shift) * static_cast<double>(t);
    if (static_cast<double>(shift) < lo || static_cast<double>(shift) > hi) {
        std::ostringstream msg;
        msg << "surrogate shift " << shift << " outside allowed band [" << lo << ", " << hi << "]";
        throw std::invalid_argument(msg.str());
    }
    TimeSeriesSet out = ts;
    for (Eigen::Index i = 0; i < t; ++i) out.values(i, channel) = ts.values((i + shift) % t, channel);
    return out;
}

EdgeTestResult edge_pvalue(const TimeSeriesSet& ts, EdgeKind kind,
                           std::pair<Eigen::Index, Eigen::Index> pair,
                           const std::vector<Eigen::Index>& cond, const InferenceConfig& cfg,
                           NeighborBackend backend) {
    cfg.validate();
    ts.validate();
    if (pair.first == pair.second) throw std::invalid_argument("edge endpoints must differ");
    // The undirected statistic is symmetric; canonical ordering makes the
    // whole test (statistic, surrogates, p) identical for (i,j) and (j,i).
    if (kind == EdgeKind::Undirected && pair.first > pair.second)
        std::swap(pair.first, pair.second);

    const MeasureKind measure = kind == EdgeKind::Directed ? MeasureKind::TE : MeasureKind::IIE;
    const Eigen::Index source = pair.first;
    const Eigen::Index target = pair.second;

    // Surrogates move only the source channel, so everything derived from the
    // other channels is indexed once and reused across all evaluations.
    const MeasureEngine engine(measure, ts, source, target, cond, cfg.spec, cfg.estimator,
                               backend);

    EdgeTestResult result;
    result.kind = kind;
    result.from = source;
    result.to = target;
    result.statistic = engine.evaluate(ts);

    const Eigen::Index t = ts.sample_count();
    const std::int64_t lo = static_cast<std::int64_t>(std::ceil(cfg.min_shift * static_cast<double>(t)));
    const std::int64_t hi =
        static_cast<std::int64_t>(std::floor((1.0 - cfg.min_shift) * static_cast<double>(t)));
    if (hi < lo || hi - lo + 1 < cfg.n_surrogates)
        throw std::invalid_argument("too few samples for the requested surrogate count");

    const std::uint64_t test_seed =
        hash_mix(cfg.seed, kind == EdgeKind::Directed ? 0x64ULL : 0x75ULL,
                 hash_mix(static_cast<std::uint64_t>(source), static_cast<std::uint64_t>(target)));
    const std::vector<std::int64_t> shifts =
        sample_distinct(lo, hi, static_cast<std::size_t>(cfg.n_surrogates), test_seed);

    result.null_sample.resize(static_cast<std::size_t>(cfg.n_surrogates));
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(cfg.n_surrogates); ++s) {
        const TimeSeriesSet surrogate = circular_shift_surrogate(
            ts, source, static_cast<Eigen::Index>(shifts[static_cast<std::size_t>(s)]),
            cfg.min_shift);
        result.null_sample[static_cast<std::size_t>(s)] = engine.evaluate(surrogate);
    }

    // Rank formula; ties count against rejection.
    std::int64_t geq = 0;
    for (double v : result.null_sample)
        if (v >= result.statistic) ++geq;
    result.p_value =
        static_cast<double>(1 + geq) / static_cast<double>(1 + cfg.n_surrogates);
    return result;
}

std::vector<bool> bh_adjust(const std::vector<double>& pvalues, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("FDR target must lie in (0,1)");
    const std::size_t m = pvalues.size();
    std::vector<bool> reject(m, false);
    if (m == 0) return reject;
    for (double p : pvalues)
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p-values must lie in (0,1]");

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });

    std::size_t cutoff = 0;  // number of rejections
    for (std::size_t i = 0; i < m; ++i) {
        const double threshold = static_cast<double>(i + 1) * q / static_cast<double>(m);
        if (pvalues[order[i]] <= threshold) cutoff = i + 1;
    }
    for (std::size_t i = 0; i < cutoff; ++i) reject[order[i]] = true;
    return reject;
}

std::vector<bool> bonferroni_adjust(const std::vector<double>& pvalues, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    const std::size_t m = pvalues.size();
    std::vector<bool> reject(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(pvalues[i] > 0.0 && pvalues[i] <= 1.0))
            throw std::invalid_argument("p-values must lie in (0,1]");
        reject[i] = pvalues[i] <= alpha / static_cast<double>(m);
    }
    return reject;
}

CausalityGraph infer_graph(const TimeSeriesSet& ts, const InferenceConfig& cfg,
                           NeighborBackend backend) {
    cfg.validate();
    ts.validate();
    const Eigen::Index m = ts.channel_count();
    if (m < 2) throw std::invalid_argument("graph inference needs at least 2 channels");

    CausalityGraph graph;
    graph.nodes = ts.names;

    auto remaining = [&](Eigen::Index i, Eigen::Index j) {
        std::vector<Eigen::Index> cond;
        for (Eigen::Index c = 0; c < m; ++c)
            if (c != i && c != j) cond.push_back(c);
        return cond;
    };

    std::vector<EdgeTestResult> directed_tests;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            if (i != j)
                directed_tests.push_back(
                    edge_pvalue(ts, EdgeKind::Directed, {i, j}, remaining(i, j), cfg, backend));

    std::vector<EdgeTestResult> undirected_tests;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j)
            undirected_tests.push_back(
                edge_pvalue(ts, EdgeKind::Undirected, {i, j}, remaining(i, j), cfg, backend));

    // The two edge families answer different questions; correct each on its own.
    auto apply_correction = [&](std::vector<EdgeTestResult>& tests) {
        std::vector<double> ps;
        for (const auto& t : tests) ps.push_back(t.p_value);
        const std::vector<bool> reject = cfg.correction == Correction::BH
                                             ? bh_adjust(ps, cfg.fdr_q)
                                             : bonferroni_adjust(ps, cfg.alpha);
        for (std::size_t i = 0; i < tests.size(); ++i) tests[i].reject = reject[i];
    };
    apply_correction(directed_tests);
    apply_correction(undirected_tests);

    for (const auto& t : directed_tests)
        if (t.reject) graph.directed.emplace_back(t.from, t.to);
    for (const auto& t : undirected_tests)
        if (t.reject) graph.undirected.emplace_back(t.from, t.to);

    graph.results = std::move(directed_tests);
    graph.results.insert(graph.results.end(), undirected_tests.begin(), undirected_tests.end());
    return graph;
}

std::string graph_to_dot(const CausalityGraph& graph) {
    std::ostringstream out;
    out << "digraph granger {\n";
    for (const auto& n : graph.nodes) out << "  \"" << n << "\";\n";
    for (const auto& r : graph.results) {
        if (!r.reject) continue;
        const auto& a = graph.nodes[static_cast<std::size_t>(r.from)];
        const auto& b = graph.nodes[static_cast<std::size_t>(r.to)];
        const char* op = r.kind == EdgeKind::Directed ? "->" : "--";
        out << "  \"" << a << "\" " << op << " \"" << b << "\" [label=\"p=" << format_p(r.p_value)
            << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace dinfo
