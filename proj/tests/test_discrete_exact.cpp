#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dinfo/discrete_exact.hpp"
#include "dinfo/json_io.hpp"
#include "test_support.hpp"

using namespace dinfo;
using testsup::binary_entropy_nats;
using testsup::feedback_free_pmf;
using testsup::product_pmf;
using testsup::random_pmf;

namespace {

const double kLn2 = std::log(2.0);

// t=2 binary, x i.i.d. uniform, y_i = x_i (noiseless identity channel).
JointPmf identity_channel_t2() {
    JointPmf pmf;
    pmf.t = 2;
    pmf.probs.assign(16, 0.0);
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2) {
            const int idx = ((x1 * 2 + x2) * 2 + x1) * 2 + x2;  // (x1,x2,y1,y2)
            pmf.probs[static_cast<std::size_t>(idx)] = 0.25;
        }
    return pmf;
}

// t=2 binary, x i.i.d. uniform, y_1 = 0 and y_2 = x_1 (pure unit delay).
JointPmf pure_delay_t2() {
    JointPmf pmf;
    pmf.t = 2;
    pmf.probs.assign(16, 0.0);
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2) {
            const int idx = ((x1 * 2 + x2) * 2 + 0) * 2 + x1;
            pmf.probs[static_cast<std::size_t>(idx)] = 0.25;
        }
    return pmf;
}

// t=2 binary symmetric channel with flip probability `flip`, uniform input.
JointPmf bsc_t2(double flip) {
    JointPmf pmf;
    pmf.t = 2;
    pmf.probs.assign(16, 0.0);
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2)
            for (int y1 = 0; y1 < 2; ++y1)
                for (int y2 = 0; y2 < 2; ++y2) {
                    const double p1 = y1 == x1 ? 1.0 - flip : flip;
                    const double p2 = y2 == x2 ? 1.0 - flip : flip;
                    const int idx = ((x1 * 2 + x2) * 2 + y1) * 2 + y2;
                    pmf.probs[static_cast<std::size_t>(idx)] = 0.25 * p1 * p2;
                }
    return pmf;
}

}  // namespace

TEST_CASE("JointPmf validation") {
    JointPmf pmf = random_pmf(2, 2, 2, 1);
    CHECK_NOTHROW(pmf.validate());

    JointPmf bad_sum = pmf;
    bad_sum.probs[0] += 1e-6;
    CHECK_THROWS_AS(bad_sum.validate(), std::invalid_argument);

    JointPmf negative = pmf;
    negative.probs[0] = -negative.probs[0];
    CHECK_THROWS_AS(negative.validate(), std::invalid_argument);

    JointPmf oversized;
    oversized.t = 13;  // 13 * 2 bits > 24
    oversized.probs.assign(1, 1.0);
    CHECK_THROWS_WITH_AS(oversized.validate(), doctest::Contains("guard"), std::invalid_argument);
}

TEST_CASE("mutual information on the worked examples") {
    CHECK(mutual_information_exact(product_pmf({0.3, 0.7}, {0.6, 0.4}, 1, 2, 2)) ==
          doctest::Approx(0.0).epsilon(1e-12));

    JointPmf ident1;
    ident1.t = 1;
    ident1.probs = {0.5, 0.0, 0.0, 0.5};
    CHECK(mutual_information_exact(ident1) == doctest::Approx(kLn2).epsilon(1e-12));

    CHECK(mutual_information_exact(identity_channel_t2()) ==
          doctest::Approx(2 * kLn2).epsilon(1e-12));
}

TEST_CASE("directed information on the worked examples") {
    const JointPmf prod = product_pmf({0.3, 0.7}, {0.6, 0.4}, 1, 2, 2);
    CHECK(directed_information_exact(prod, Direction::XtoY) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(directed_information_exact(prod, Direction::YtoX) == doctest::Approx(0.0).epsilon(1e-12));

    const JointPmf ident = identity_channel_t2();
    CHECK(directed_information_exact(ident, Direction::XtoY) ==
          doctest::Approx(2 * kLn2).epsilon(1e-12));
    // x is i.i.d. and independent of y's past, so the delayed reverse flow vanishes.
    CHECK(directed_information_exact(ident, Direction::DYtoX) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("instantaneous exchange on the worked examples") {
    CHECK(instantaneous_exchange_exact(product_pmf({0.5, 0.5}, {0.5, 0.5}, 1, 2, 2)) ==
          doctest::Approx(0.0).epsilon(1e-12));

    JointPmf ident1;
    ident1.t = 1;
    ident1.probs = {0.5, 0.0, 0.0, 0.5};
    CHECK(instantaneous_exchange_exact(ident1) == doctest::Approx(kLn2).epsilon(1e-12));

    // Pure delay: all dependence lies strictly in the past.
    CHECK(instantaneous_exchange_exact(pure_delay_t2()) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("causal conditional entropy on the worked examples") {
    const JointPmf prod = product_pmf({0.3, 0.7}, {0.6, 0.4}, 1, 2, 2);
    CHECK(causal_cond_entropy_exact(prod, Direction::XtoY) ==
          doctest::Approx(sequence_entropy(prod, Process::Y)).epsilon(1e-12));

    CHECK(causal_cond_entropy_exact(identity_channel_t2(), Direction::XtoY) ==
          doctest::Approx(0.0).epsilon(1e-12));

    const double h = binary_entropy_nats(0.1);
    CHECK(causal_cond_entropy_exact(bsc_t2(0.1), Direction::XtoY) ==
          doctest::Approx(2 * h).epsilon(1e-10));
    CHECK(2 * h == doctest::Approx(2 * 0.3251).epsilon(1e-3));
}

TEST_CASE("identity suite holds on 500 random pmfs within 1e-10") {
    for (int trial = 0; trial < 500; ++trial) {
        const int t = 1 + trial % 3;
        const JointPmf pmf = random_pmf(t, 2, 2, 1000 + static_cast<std::uint64_t>(trial));

        const double mi = mutual_information_exact(pmf);
        const double di_xy = directed_information_exact(pmf, Direction::XtoY);
        const double di_dyx = directed_information_exact(pmf, Direction::DYtoX);
        const double di_dxy = directed_information_exact(pmf, Direction::DXtoY);
        const double iie = instantaneous_exchange_exact(pmf);

        CAPTURE(trial);
        CHECK(di_xy >= -1e-10);                       // positivity
        CHECK(di_xy <= mi + 1e-10);                   // dominance
        CHECK(std::abs(di_xy + di_dyx - mi) < 1e-10); // conservation
        CHECK(std::abs(di_xy - (di_dxy + iie)) < 1e-10);  // decomposition

        const double h_y = sequence_entropy(pmf, Process::Y);
        const double h_y_given_x = causal_cond_entropy_exact(pmf, Direction::XtoY);
        CHECK(std::abs(h_y - h_y_given_x - di_xy) < 1e-10);  // causal-entropy identity
    }
}

TEST_CASE("instantaneous exchange is symmetric in the two processes") {
    for (int trial = 0; trial < 50; ++trial) {
        const JointPmf pmf = random_pmf(1 + trial % 3, 2, 2, 77 + static_cast<std::uint64_t>(trial));
        // Swapping roles = computing the same sum with x and y groups exchanged.
        double swapped = 0.0;
        for (int i = 1; i <= pmf.t; ++i) {
            std::vector<int> past;
            for (int j = 1; j < i; ++j) {
                past.push_back(pmf.x_pos(j));
                past.push_back(pmf.y_pos(j));
            }
            swapped += grouped_cmi(pmf, {pmf.y_pos(i)}, {pmf.x_pos(i)}, past);
        }
        CHECK(std::abs(instantaneous_exchange_exact(pmf) - swapped) < 1e-10);
    }
}

TEST_CASE("no-feedback pmfs have DI equal to MI within 1e-10") {
    for (int trial = 0; trial < 100; ++trial) {
        const int t = 1 + trial % 3;
        const JointPmf pmf = feedback_free_pmf(t, 555 + static_cast<std::uint64_t>(trial));
        CHECK_NOTHROW(pmf.validate());
        const double mi = mutual_information_exact(pmf);
        const double di = directed_information_exact(pmf, Direction::XtoY);
        CAPTURE(trial);
        CHECK(std::abs(di - mi) < 1e-10);
    }
}

TEST_CASE("conditional chain rule holds on enumerated pmfs") {
    for (int trial = 0; trial < 50; ++trial) {
        const JointPmf pmf = random_pmf(2, 2, 2, 9000 + static_cast<std::uint64_t>(trial));
        const int x1 = pmf.x_pos(1), x2 = pmf.x_pos(2);
        const int y1 = pmf.y_pos(1), y2 = pmf.y_pos(2);
        // I(x1,x2; y2 | y1) = I(x1; y2 | y1) + I(x2; y2 | y1, x1)
        const double joint = grouped_cmi(pmf, {x1, x2}, {y2}, {y1});
        const double split =
            grouped_cmi(pmf, {x1}, {y2}, {y1}) + grouped_cmi(pmf, {x2}, {y2}, {y1, x1});
        CHECK(std::abs(joint - split) < 1e-10);
    }
}

TEST_CASE("JointPmf JSON fixture round-trip") {
    const JointPmf pmf = random_pmf(2, 2, 2, 4242);
    const json j = joint_pmf_to_json(pmf);
    const JointPmf back = joint_pmf_from_json(j);
    CHECK(back.t == pmf.t);
    CHECK(back.ax == pmf.ax);
    CHECK(back.ay == pmf.ay);
    CHECK(back.probs == pmf.probs);

    json bad = j;
    bad["extra"] = 1;
    CHECK_THROWS_WITH_AS(joint_pmf_from_json(bad), doctest::Contains("unknown key"),
                         std::invalid_argument);
}

TEST_CASE("grouped helpers reject malformed variable groups") {
    const JointPmf pmf = random_pmf(2, 2, 2, 1);
    CHECK_THROWS_AS(grouped_cmi(pmf, {0}, {0}, {}), std::invalid_argument);
    CHECK_THROWS_AS(grouped_cmi(pmf, {0, 0}, {1}, {}), std::invalid_argument);
    CHECK_THROWS_AS(grouped_entropy(pmf, {99}), std::invalid_argument);
}
