#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dinfo/gaussian_oracle.hpp"
#include "dinfo/graph_inference.hpp"
#include "test_support.hpp"

using namespace dinfo;
using testsup::ring_model;
using testsup::white_model;
using testsup::white_x_model;

namespace {

TimeSeriesSet standardized_sim(const VarModel& model, Eigen::Index t, std::uint64_t seed) {
    return standardize(simulate_var(model, t, seed, 200));
}

InferenceConfig fast_config(std::uint64_t seed) {
    InferenceConfig cfg;
    cfg.n_surrogates = 99;
    cfg.seed = seed;
    return cfg;
}

bool has_edge(const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges, Eigen::Index a,
              Eigen::Index b) {
    return std::find(edges.begin(), edges.end(), std::make_pair(a, b)) != edges.end();
}

}  // namespace

TEST_CASE("circular shift surrogate basics") {
    TimeSeriesSet ts;
    ts.values.resize(4, 2);
    ts.values << 1, 10, 2, 20, 3, 30, 4, 40;
    ts.names = {"a", "b"};

    const TimeSeriesSet shifted = circular_shift_surrogate(ts, 0, 2, 0.25);
    CHECK(shifted.values.col(0).transpose() == Eigen::RowVector4d(3, 4, 1, 2));
    CHECK(shifted.values.col(1) == ts.values.col(1));  // other channels untouched

    // zero shift (and anything outside the band) is not a surrogate
    CHECK_THROWS_WITH_AS(circular_shift_surrogate(ts, 0, 0, 0.25), doctest::Contains("band"),
                         std::invalid_argument);
    CHECK_THROWS_AS(circular_shift_surrogate(ts, 0, 4, 0.25), std::invalid_argument);
}

TEST_CASE("circular shift preserves the circular autocovariance") {
    TimeSeriesSet ts;
    ts.values.resize(50, 1);
    CounterRng rng(5);
    for (Eigen::Index i = 0; i < 50; ++i)
        ts.values(i, 0) = rng.normal(static_cast<std::uint64_t>(i));
    ts.names = {"a"};

    auto circ_acov = [](const Eigen::VectorXd& v, int lag) {
        const Eigen::Index n = v.size();
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) s += v(i) * v((i + lag) % n);
        return s / static_cast<double>(n);
    };

    const TimeSeriesSet shifted = circular_shift_surrogate(ts, 0, 17, 0.1);
    for (int lag : {1, 2, 5}) {
        CHECK(std::abs(circ_acov(ts.values.col(0), lag) -
                       circ_acov(shifted.values.col(0), lag)) < 1e-12);
    }
    // marginal preserved exactly: same multiset of values
    Eigen::VectorXd a = ts.values.col(0), b = shifted.values.col(0);
    std::sort(a.data(), a.data() + a.size());
    std::sort(b.data(), b.data() + b.size());
    CHECK(a == b);
}

TEST_CASE("BH step-up on the worked example") {
    const std::vector<double> ps{0.001, 0.02, 0.04, 0.2};
    const auto reject = bh_adjust(ps, 0.05);
    // thresholds: 0.0125, 0.025, 0.0375, 0.05
    CHECK(reject == std::vector<bool>{true, true, false, false});

    CHECK(bh_adjust({1.0, 1.0, 1.0}, 0.05) == std::vector<bool>{false, false, false});
    CHECK(bh_adjust({0.01}, 0.05) == std::vector<bool>{true});

    CHECK_THROWS_AS(bh_adjust({0.0}, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(bh_adjust({0.5}, 1.5), std::invalid_argument);
}

TEST_CASE("Bonferroni correction") {
    const std::vector<double> ps{0.01, 0.02, 0.5};
    CHECK(bonferroni_adjust(ps, 0.05) == std::vector<bool>{true, false, false});
}

TEST_CASE("edge_pvalue: strong coupling saturates to the minimum attainable p") {
    const TimeSeriesSet ts = standardized_sim(white_x_model(1.0), 2000, 3);
    const InferenceConfig cfg = fast_config(10);
    const EdgeTestResult r = edge_pvalue(ts, EdgeKind::Directed, {0, 1}, {}, cfg);
    CHECK(r.null_sample.size() == 99);
    CHECK(r.p_value == doctest::Approx(0.01));  // 1/(1+99): observed beats all nulls
    CHECK(r.statistic > 0.2);
}

TEST_CASE("edge_pvalue respects the rank-formula lower bound and is deterministic") {
    const TimeSeriesSet ts = standardized_sim(white_model(2), 1200, 4);
    const InferenceConfig cfg = fast_config(11);
    const EdgeTestResult a = edge_pvalue(ts, EdgeKind::Directed, {0, 1}, {}, cfg);
    const EdgeTestResult b = edge_pvalue(ts, EdgeKind::Directed, {0, 1}, {}, cfg);
    CHECK(a.p_value >= 1.0 / 100.0);
    CHECK(a.p_value == b.p_value);
    CHECK(a.statistic == b.statistic);
    CHECK(a.null_sample == b.null_sample);
}

TEST_CASE("undirected tests are order-invariant") {
    VarModel model = white_model(2);
    model.noise_cov(0, 1) = model.noise_cov(1, 0) = 0.6;
    const TimeSeriesSet ts = standardized_sim(model, 1500, 6);
    InferenceConfig cfg = fast_config(12);
    cfg.estimator.jitter_scale = 1e-8;
    const EdgeTestResult ij = edge_pvalue(ts, EdgeKind::Undirected, {0, 1}, {}, cfg);
    const EdgeTestResult ji = edge_pvalue(ts, EdgeKind::Undirected, {1, 0}, {}, cfg);
    CHECK(ij.statistic == ji.statistic);
    CHECK(ij.p_value == ji.p_value);
    CHECK(ij.from == ji.from);
}

TEST_CASE("infer_graph recovers the instantaneous-coupling pair") {
    VarModel model = white_model(2);
    model.noise_cov(0, 1) = model.noise_cov(1, 0) = 0.6;
    const TimeSeriesSet ts = standardized_sim(model, 4000, 21);
    const CausalityGraph g = infer_graph(ts, fast_config(22));
    CHECK(g.directed.empty());
    REQUIRE(g.undirected.size() == 1);
    CHECK(g.undirected[0] == std::pair<Eigen::Index, Eigen::Index>{0, 1});
    CHECK(g.results.size() == 3);  // 2 directed tests + 1 undirected test
}

TEST_CASE("infer_graph on the ring: exact recovery at the fixture seed") {
    const VarModel model = ring_model(0.5, 0.5, 0.5, Eigen::MatrixXd::Identity(3, 3));
    const TimeSeriesSet ts = standardized_sim(model, 4000, 31);
    const CausalityGraph g = infer_graph(ts, fast_config(32));

    REQUIRE(g.directed.size() == 3);
    CHECK(has_edge(g.directed, 2, 0));  // z -> x
    CHECK(has_edge(g.directed, 0, 1));  // x -> y
    CHECK(has_edge(g.directed, 1, 2));  // y -> z
    CHECK(g.undirected.empty());
    CHECK(g.results.size() == 9);
}

TEST_CASE("independent channels give an empty graph at the fixture seed") {
    const TimeSeriesSet ts = standardized_sim(white_model(3), 3000, 41);
    const CausalityGraph g = infer_graph(ts, fast_config(42));
    CHECK(g.directed.empty());
    CHECK(g.undirected.empty());
}

TEST_CASE("relativity to the information set on ring data") {
    const VarModel model = ring_model(0.5, 0.5, 0.5, Eigen::MatrixXd::Identity(3, 3));
    const TimeSeriesSet ts = standardized_sim(model, 6000, 51);
    const InferenceConfig cfg = fast_config(52);

    // Pairwise analysis flags the mediated y->x relation; conditioning on z
    // removes it.
    const EdgeTestResult pairwise = edge_pvalue(ts, EdgeKind::Directed, {1, 0}, {}, cfg);
    const EdgeTestResult conditional = edge_pvalue(ts, EdgeKind::Directed, {1, 0}, {2}, cfg);
    CHECK(pairwise.p_value <= 0.05);
    CHECK(conditional.p_value > 0.05);
}

TEST_CASE("graph determinism across repeated runs") {
    const VarModel model = white_x_model(1.0, 0.5);
    const TimeSeriesSet ts = standardized_sim(model, 1500, 61);
    const InferenceConfig cfg = fast_config(62);
    const CausalityGraph a = infer_graph(ts, cfg);
    const CausalityGraph b = infer_graph(ts, cfg);
    REQUIRE(a.results.size() == b.results.size());
    for (std::size_t i = 0; i < a.results.size(); ++i) {
        CHECK(a.results[i].statistic == b.results[i].statistic);
        CHECK(a.results[i].p_value == b.results[i].p_value);
        CHECK(a.results[i].reject == b.results[i].reject);
    }
    CHECK(a.directed == b.directed);
    CHECK(a.undirected == b.undirected);
}

TEST_CASE("DOT output lists nodes and labeled edges") {
    CausalityGraph g;
    g.nodes = {"x", "y"};
    EdgeTestResult r;
    r.kind = EdgeKind::Directed;
    r.from = 0;
    r.to = 1;
    r.p_value = 0.01;
    r.reject = true;
    g.results.push_back(r);
    r.kind = EdgeKind::Undirected;
    r.reject = false;
    g.results.push_back(r);

    const std::string dot = graph_to_dot(g);
    CHECK(dot.find("\"x\" -> \"y\" [label=\"p=0.01\"]") != std::string::npos);
    CHECK(dot.find("--") == std::string::npos);  // non-rejected tests draw nothing
}

TEST_CASE("config validation") {
    InferenceConfig cfg;
    cfg.n_surrogates = 10;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = InferenceConfig{};
    cfg.alpha = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = InferenceConfig{};
    cfg.min_shift = 0.6;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    // surrogate demand can exceed the shift band
    const TimeSeriesSet tiny = standardized_sim(white_model(2), 60, 71);
    InferenceConfig small = fast_config(72);
    small.n_surrogates = 99;
    CHECK_THROWS_WITH_AS(edge_pvalue(tiny, EdgeKind::Directed, {0, 1}, {}, small),
                         doctest::Contains("surrogate"), std::invalid_argument);
}
