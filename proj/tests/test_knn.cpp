#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dinfo/knn.hpp"
#include "dinfo/rng.hpp"
#include "test_support.hpp"

using namespace dinfo;
using testsup::gaussian_cloud;

namespace {

constexpr double kEulerGamma = 0.5772156649015328606;

// Correlated standard-normal pair with correlation rho.
std::pair<RowMatrix, RowMatrix> gaussian_pair(std::size_t n, double rho, std::uint64_t seed) {
    CounterRng rng(seed);
    RowMatrix x(static_cast<Eigen::Index>(n), 1), y(static_cast<Eigen::Index>(n), 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double n1 = rng.normal(2 * i);
        const double n2 = rng.normal(2 * i + 1);
        x(static_cast<Eigen::Index>(i), 0) = n1;
        y(static_cast<Eigen::Index>(i), 0) = rho * n1 + std::sqrt(1.0 - rho * rho) * n2;
    }
    return {x, y};
}

// x = z + e1, y = z + e2, corr(e1, e2) = rho_partial: the partial correlation
// of (x, y) given z is exactly rho_partial.
struct Trivariate {
    RowMatrix x, y, z;
};

Trivariate partial_corr_fixture(std::size_t n, double rho_partial, std::uint64_t seed) {
    CounterRng rng(seed);
    Trivariate out;
    out.x.resize(static_cast<Eigen::Index>(n), 1);
    out.y.resize(static_cast<Eigen::Index>(n), 1);
    out.z.resize(static_cast<Eigen::Index>(n), 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double zz = rng.normal(3 * i);
        const double e1 = rng.normal(3 * i + 1);
        const double e2raw = rng.normal(3 * i + 2);
        const double e2 = rho_partial * e1 + std::sqrt(1.0 - rho_partial * rho_partial) * e2raw;
        out.z(static_cast<Eigen::Index>(i), 0) = zz;
        out.x(static_cast<Eigen::Index>(i), 0) = zz + e1;
        out.y(static_cast<Eigen::Index>(i), 0) = zz + e2;
    }
    return out;
}

}  // namespace

TEST_CASE("digamma known values") {
    CHECK(std::abs(digamma(1.0) - (-kEulerGamma)) < 1e-10);
    CHECK(std::abs(digamma(2.0) - (1.0 - kEulerGamma)) < 1e-10);

    // psi(10) = psi(1) + sum_{j=1}^{9} 1/j
    double harmonic = 0.0;
    for (int j = 1; j <= 9; ++j) harmonic += 1.0 / j;
    CHECK(std::abs(digamma(10.0) - (-kEulerGamma + harmonic)) < 1e-10);
    CHECK(digamma(10.0) == doctest::Approx(2.25175258907).epsilon(1e-9));

    CHECK_THROWS_AS(digamma(0.0), std::invalid_argument);
    CHECK_THROWS_AS(digamma(-1.0), std::invalid_argument);

    // recurrence psi(x+1) = psi(x) + 1/x on non-integer arguments
    for (double x : {0.7, 1.8, 3.14, 12.5}) {
        CHECK(std::abs(digamma(x + 1.0) - (digamma(x) + 1.0 / x)) < 1e-10);
    }
}

TEST_CASE("three-point hand-counted regression value") {
    // Points (0,0), (1,2), (3,6); k=1. Joint kth distances are 2, 2, 4;
    // n_x = {1, 1, 2}, n_y = {0, 0, 0}; the psi formula telescopes to
    // (2/3)(psi(3) - psi(2)) = 1/3 exactly.
    RowMatrix x(3, 1), y(3, 1);
    x << 0, 1, 3;
    y << 0, 2, 6;
    EstimatorConfig cfg;
    cfg.k = 1;
    const double v = ksg_mi(x, y, cfg);
    CHECK(std::abs(v - 1.0 / 3.0) < 1e-9);
}

TEST_CASE("KSG recovers bivariate Gaussian mutual information") {
    EstimatorConfig cfg;
    cfg.k = 4;

    auto [x0, y0] = gaussian_pair(5000, 0.0, 11);
    CHECK(std::abs(ksg_mi(x0, y0, cfg)) < 0.02);

    auto [x9, y9] = gaussian_pair(5000, 0.9, 12);
    const double truth = -0.5 * std::log(1.0 - 0.81);
    CHECK(std::abs(ksg_mi(x9, y9, cfg) - truth) < 0.05);
}

TEST_CASE("fp_cmi with empty z is bit-identical to ksg_mi") {
    auto [x, y] = gaussian_pair(800, 0.5, 21);
    EstimatorConfig cfg;
    cfg.k = 4;
    const RowMatrix empty_z(x.rows(), 0);
    CHECK(fp_cmi(x, y, empty_z, cfg) == ksg_mi(x, y, cfg));
}

TEST_CASE("fp_cmi fixtures with known conditional structure") {
    EstimatorConfig cfg;
    cfg.k = 4;

    const Trivariate ci = partial_corr_fixture(5000, 0.0, 31);
    CHECK(std::abs(fp_cmi(ci.x, ci.y, ci.z, cfg)) < 0.03);

    const Trivariate dep = partial_corr_fixture(5000, 0.5, 32);
    const double truth = -0.5 * std::log(0.75);
    CHECK(std::abs(fp_cmi(dep.x, dep.y, dep.z, cfg) - truth) < 0.05);
}

TEST_CASE("estimators agree exactly across backends") {
    auto [x, y] = gaussian_pair(400, 0.6, 41);
    const RowMatrix z = gaussian_cloud(400, 2, 42);
    EstimatorConfig cfg;
    cfg.k = 3;
    cfg.jitter_scale = 1e-8;
    const double serial = fp_cmi(x, y, z, cfg, NeighborBackend::BruteForceSerial);
    const double parallel = fp_cmi(x, y, z, cfg, NeighborBackend::BruteForceParallel);
    const double tree = fp_cmi(x, y, z, cfg, NeighborBackend::KdTreeIndex);
    CHECK(serial == parallel);
    CHECK(serial == tree);

    const double mi_serial = ksg_mi(x, y, cfg, NeighborBackend::BruteForceSerial);
    const double mi_tree = ksg_mi(x, y, cfg, NeighborBackend::KdTreeIndex);
    CHECK(mi_serial == mi_tree);
}

TEST_CASE("row permutation leaves the estimate unchanged") {
    auto [x, y] = gaussian_pair(600, 0.4, 51);
    const RowMatrix z = gaussian_cloud(600, 1, 52);

    std::vector<Eigen::Index> perm(600);
    std::iota(perm.begin(), perm.end(), 0);
    BoundedDraw draw(99);
    for (std::size_t i = 599; i > 0; --i)
        std::swap(perm[i], perm[static_cast<std::size_t>(draw.next_below(i + 1))]);

    RowMatrix xp(600, 1), yp(600, 1), zp(600, 1);
    for (Eigen::Index i = 0; i < 600; ++i) {
        xp.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
        yp.row(i) = y.row(perm[static_cast<std::size_t>(i)]);
        zp.row(i) = z.row(perm[static_cast<std::size_t>(i)]);
    }

    for (double jitter : {0.0, 1e-7}) {
        EstimatorConfig cfg;
        cfg.k = 4;
        cfg.jitter_scale = jitter;
        cfg.seed = 7;
        CHECK(fp_cmi(x, y, z, cfg) == fp_cmi(xp, yp, zp, cfg));
    }
}

TEST_CASE("duplicate joint points raise the documented error") {
    RowMatrix x(10, 1), y(10, 1);
    for (Eigen::Index i = 0; i < 10; ++i) {
        x(i, 0) = static_cast<double>(i % 2);
        y(i, 0) = static_cast<double>(i % 2);
    }
    EstimatorConfig cfg;
    cfg.k = 2;
    CHECK_THROWS_WITH_AS(ksg_mi(x, y, cfg), doctest::Contains("jitter_scale"),
                         std::invalid_argument);
}

TEST_CASE("jitter breaks single-coordinate ties without changing clean data much") {
    // x quantized to few levels, y continuous: full rows stay unique, so the
    // estimator works even with jitter off; jitter must only perturb mildly.
    const std::size_t n = 500;
    CounterRng rng(61);
    RowMatrix x(static_cast<Eigen::Index>(n), 1), y(static_cast<Eigen::Index>(n), 1);
    for (std::size_t i = 0; i < n; ++i) {
        x(static_cast<Eigen::Index>(i), 0) = std::floor(3.0 * rng.uniform(2 * i));
        y(static_cast<Eigen::Index>(i), 0) = rng.normal(2 * i + 1);
    }
    EstimatorConfig plain;
    plain.k = 4;
    EstimatorConfig jittered = plain;
    jittered.jitter_scale = 1e-7;
    const double a = ksg_mi(x, y, plain);
    const double b = ksg_mi(x, y, jittered);
    CHECK(std::abs(a - b) < 0.05);
}

TEST_CASE("under conditional independence the null mean stays within 3 SE of zero") {
    EstimatorConfig cfg;
    cfg.k = 4;
    const int runs = 100;
    std::vector<double> values;
    for (int r = 0; r < runs; ++r) {
        const Trivariate ci = partial_corr_fixture(2000, 0.0, 700 + static_cast<std::uint64_t>(r));
        values.push_back(fp_cmi(ci.x, ci.y, ci.z, cfg));
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / runs;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= (runs - 1);
    const double se = std::sqrt(var / runs);
    CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("invariance under constant shifts and rescaling applied before standardization") {
    const std::size_t n = 1500;
    auto [x, y] = gaussian_pair(n, 0.6, 71);

    TimeSeriesSet ts;
    ts.values.resize(static_cast<Eigen::Index>(n), 2);
    ts.values.col(0) = x.col(0);
    ts.values.col(1) = y.col(0);
    ts.names = {"a", "b"};

    TimeSeriesSet shifted = ts;
    shifted.values.col(0).array() += 7.0;
    shifted.values.col(1).array() *= 3.5;  // positive rescale

    const TimeSeriesSet s1 = standardize(ts);
    const TimeSeriesSet s2 = standardize(shifted);

    EstimatorConfig cfg;
    cfg.k = 4;
    auto col = [](const TimeSeriesSet& t, Eigen::Index c) {
        RowMatrix m(t.values.rows(), 1);
        m.col(0) = t.values.col(c);
        return m;
    };
    const double v1 = ksg_mi(col(s1, 0), col(s1, 1), cfg);
    const double v2 = ksg_mi(col(s2, 0), col(s2, 1), cfg);
    CHECK(std::abs(v1 - v2) < 1e-6);
}

TEST_CASE("estimator configuration validation") {
    auto [x, y] = gaussian_pair(50, 0.0, 81);
    EstimatorConfig cfg;
    cfg.k = 0;
    CHECK_THROWS_AS(ksg_mi(x, y, cfg), std::invalid_argument);
    cfg.k = 50;
    CHECK_THROWS_AS(ksg_mi(x, y, cfg), std::invalid_argument);
    cfg.k = 4;
    cfg.jitter_scale = 1e-3;  // above the allowed band
    CHECK_THROWS_AS(ksg_mi(x, y, cfg), std::invalid_argument);
}
