#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "common.hpp"
#include "ftc/oracle.hpp"

using namespace ftc;

TEST_CASE("attractor ball contains every generator fixed point") {
    for (const auto& name : testutil::bundled()) {
        INFO(name);
        auto p = testutil::load(name);
        const auto& ifs = *p.ifs();
        auto ball = oracle::attractor_ball(ifs);
        for (const auto& m : ifs.maps()) {
            auto fp = m.fixed_point();
            Point diff;
            for (size_t k = 0; k < fp.size(); ++k) diff.push_back(fp[k] - ball.center[k]);
            auto d2 = ifs.space()->norm2(diff);
            CHECK(possibly_le(d2, ball.radius.sqr()));  // fixed points can sit on the sphere
        }
    }
}

TEST_CASE("discrete measure merges coincident points exactly") {
    auto p = testutil::load("lebesgue-1-2");
    // S_I(0) over level-4 words are the 16 dyadic points k/16, each hit once
    auto dm = oracle::DiscreteMeasure::build(*p.ifs(), 4);
    CHECK(dm.points().size() == 16);
    CHECK(dm.total() == 1);
    auto golden = testutil::load("golden-bernoulli");
    auto g = oracle::DiscreteMeasure::build(*golden.ifs(), 10);
    CHECK(g.points().size() < 1024);  // overlaps coincide
    CHECK(g.total() == 1);
}

TEST_CASE("dyadic spectrum of Lebesgue measure") {
    auto p = testutil::load("lebesgue-1-2");
    auto fit = oracle::tau_dyadic(*p.ifs(), 2.0, 6, 9);
    CHECK(std::fabs(fit.tau - 1.0) < 1e-9);
}

TEST_CASE("Monte-Carlo mass of a half interval") {
    auto p = testutil::load("lebesgue-1-2");
    auto est = oracle::estimate_mass_mc(
        *p.ifs(), [](const double* x) { return x[0] < 0.25 ? oracle::Tri::Yes : oracle::Tri::No; }, 200000, 40, 3);
    CHECK(std::fabs(est.value - 0.25) < 5 * est.stderr_);
    auto again = oracle::estimate_mass_mc(
        *p.ifs(), [](const double* x) { return x[0] < 0.25 ? oracle::Tri::Yes : oracle::Tri::No; }, 200000, 40, 3);
    CHECK(again.value == est.value);
}

TEST_CASE("subdivision is decisive on disjoint and identical cylinders") {
    auto p = testutil::load("cantor-1-3");
    auto cyl = oracle::cylinders(*p.ifs(), 3);
    REQUIRE(cyl.size() == 8);
    CHECK(oracle::subdivision_intersects(*p.ifs(), cyl[0].map, cyl[0].map, 3, 8) == oracle::Tri::Yes);
    CHECK(oracle::subdivision_intersects(*p.ifs(), cyl[0].map, cyl[7].map, 3, 8) == oracle::Tri::No);
    auto l = testutil::load("lebesgue-1-2");
    auto lc = oracle::cylinders(*l.ifs(), 2);
    // [0,1/4] and [1/4,1/2] touch at 1/4
    CHECK(oracle::subdivision_intersects(*l.ifs(), lc[0].map, lc[1].map, 2, 10) == oracle::Tri::Yes);
}

TEST_CASE("word sums of the identity target") {
    auto p = testutil::load("golden-bernoulli");
    const auto& ifs = *p.ifs();
    auto id = Similitude::identity(ifs.space());
    // the only one-step word from the identity to S_1 is the letter 1
    CHECK(oracle::word_sum_entry(ifs, id, 0, ifs.map(0), 1) == Q(1, 2));
    // r^2 + r = 1 gives S_122 = S_211
    auto w1 = ifs.word_map({0, 1, 1}), w2 = ifs.word_map({1, 0, 0});
    CHECK(w1 == w2);
    CHECK(oracle::word_sum_entry(ifs, id, 0, w1, 3) == Q(1, 4));
}
