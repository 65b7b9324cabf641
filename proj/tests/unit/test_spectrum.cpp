#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "common.hpp"

using namespace ftc;
using Catch::Approx;

namespace {

Spectrum spectrum_of(Pipeline& p, int n = 0, int threads = 1) {
    auto o = p.spectrum_options();
    if (n > 0) o.pressure_n = n;
    o.threads = threads;
    return p.spectrum(o);
}

}  // namespace

TEST_CASE("Cantor spectrum has the closed form") {
    auto p = testutil::load("cantor-1-3");
    auto sp = spectrum_of(p);
    for (double q : {0.5, 1.0, 2.0, 3.0}) {
        const double exact = (q - 1) * std::log(2.0) / std::log(3.0);
        auto t = sp.tau(q);
        CHECK(std::fabs(t.tau - exact) < 1e-9);
        CHECK(t.lower <= exact + 1e-12);
        CHECK(t.upper >= exact - 1e-12);
    }
    for (int q : {2, 3}) {
        auto pr = sp.pressure_integer_q(q);
        CHECK(std::fabs(pr.value / sp.log_rho() - (q - 1) * std::log(2.0) / std::log(3.0)) < 1e-9);
    }
}

TEST_CASE("Lebesgue spectrum is q - 1") {
    auto p = testutil::load("lebesgue-1-2");
    auto sp = spectrum_of(p);
    for (double q : {0.5, 1.0, 2.0, 3.0}) CHECK(std::fabs(sp.tau(q).tau - (q - 1)) < 1e-6);
}

TEST_CASE("commensurable spectrum solves the Moran equation") {
    auto p = testutil::load("commensurable-osc");
    auto sp = spectrum_of(p);
    for (double q : {0.5, 2.0, 3.0}) {
        const double ref = testutil::moran_tau({1.0 / 3, 2.0 / 3}, {0.5, 0.25}, q);
        CHECK(std::fabs(sp.tau(q).tau - ref) < 1e-6);
    }
}

TEST_CASE("golden pressure: integer and finite-n routes agree") {
    auto p = testutil::load("golden-bernoulli");
    auto sp = spectrum_of(p);
    REQUIRE(sp.irreducibility().ok);
    CHECK(std::fabs(sp.pressure_integer_q(1).value) < 1e-12);
    for (int q : {2, 3}) {
        auto exact = sp.pressure_integer_q(q);
        auto fin = sp.pressure_finite_n(q, 16);
        CHECK(std::fabs(exact.value - fin.value) < 1e-4);
        CHECK(fin.lower <= exact.value + 1e-9);
        CHECK(fin.upper >= exact.value - 1e-9);
    }
}

TEST_CASE("finite-n sequence is subadditive") {
    for (const auto& name : {std::string("golden-bernoulli"), std::string("golden-gasket-conjugated")}) {
        INFO(name);
        auto p = testutil::load(name);
        auto sp = spectrum_of(p);
        for (double q : {0.5, 2.0, 3.5}) {
            std::vector<double> a(11, 0.0);
            for (int n = 1; n <= 10; ++n) a[n] = n * sp.pressure_finite_n(q, n).upper;
            for (int m = 1; m <= 5; ++m)
                for (int n = 1; m + n <= 10; ++n) CHECK(a[m + n] <= a[m] + a[n] + 1e-9);
        }
    }
}

TEST_CASE("finite-n upper bound is convex in q") {
    auto p = testutil::load("golden-bernoulli");
    auto sp = spectrum_of(p);
    std::vector<double> qs;
    for (int i = 1; i <= 40; ++i) qs.push_back(0.1 * i);
    auto est = sp.pressure_finite_n(qs, 12);
    for (size_t i = 1; i + 1 < est.size(); ++i) CHECK(est[i - 1].upper - 2 * est[i].upper + est[i + 1].upper >= -1e-9);
}

TEST_CASE("scalar and Kronecker routes agree on a scalar class") {
    auto p = testutil::load("complex-pisot-demo");
    auto sp = spectrum_of(p);
    REQUIRE(sp.essential().scalar());
    for (int q : {2, 3}) CHECK(sp.pressure_integer_q(q).value == Approx(sp.pressure_scalar(q).value).margin(1e-9));
}

TEST_CASE("irreducibility check") {
    QMat cyc{{Q(0), Q(1, 2)}, {Q(1, 3), Q(0)}};
    auto ok = irreducibility_check(cyc);
    CHECK(ok.ok);
    CHECK(ok.r == 2);
    CHECK(ok.delta > 0);
    CHECK(ok.delta <= 1.0 / 6);
    QMat tri{{Q(1), Q(1)}, {Q(0), Q(1)}};
    auto bad = irreducibility_check(tri);
    CHECK_FALSE(bad.ok);
    REQUIRE(bad.zero_pattern.size() == 1);
    CHECK(bad.zero_pattern[0] == std::pair<int, int>{1, 0});
}

TEST_CASE("spectrum curve is deterministic across thread counts") {
    auto p = testutil::load("golden-bernoulli");
    auto grid = parse_grid("0.2:4:0.1");
    auto c1 = spectrum_of(p, 0, 1).lq_curve(grid);
    auto c4 = spectrum_of(p, 0, 4).lq_curve(grid);
    REQUIRE(c1.points.size() == c4.points.size());
    for (size_t i = 0; i < c1.points.size(); ++i) {
        CHECK(c1.points[i].tau == c4.points[i].tau);
        CHECK(c1.points[i].lower == c4.points[i].lower);
    }
}

TEST_CASE("grid parsing") {
    auto g = parse_grid("0.2:0.5:0.1");
    REQUIRE(g.size() == 4);
    CHECK(g[3] == 0.5);
    CHECK_THROWS_AS(parse_grid("1:0:0.1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("0.1,1,0.1"), std::invalid_argument);
    auto p = testutil::load("cantor-1-3");
    CHECK_THROWS_AS(spectrum_of(p).tau(0.0), std::invalid_argument);
}
