#include <catch2/catch_amalgamated.hpp>

#include "common.hpp"
#include "ftc/oracle.hpp"

using namespace ftc;

TEST_CASE("Cantor depth-3 atoms weigh 1/8") {
    auto p = testutil::load("cantor-1-3");
    for (const auto& ad : p.automaton()->addresses(3)) CHECK(p.measure()->mass(ad) == Q(1, 8));
}

TEST_CASE("root mass and partition of unity") {
    for (const auto& name : testutil::bundled()) {
        INFO(name);
        auto p = testutil::load(name);
        CHECK(p.measure()->mass({0}) == 1);
        for (int n = 1; n <= 5; ++n) {
            Q total = 0;
            for (const auto& ad : p.automaton()->addresses(n)) total += p.measure()->mass(ad);
            CHECK(total == 1);
        }
    }
}

TEST_CASE("mass is additive over children") {
    auto p = testutil::load("golden-gasket-conjugated");
    const auto& a = *p.automaton();
    for (const auto& ad : a.addresses(3)) {
        Q sum = 0;
        for (int c : a.children(ad.back())) {
            auto child = ad;
            child.push_back(c);
            sum += p.measure()->mass(child);
        }
        CHECK(sum == p.measure()->mass(ad));
    }
}

TEST_CASE("Lebesgue atoms have their exact length") {
    auto p = testutil::load("lebesgue-1-2");
    const auto& ifs = *p.ifs();
    for (int n = 1; n <= 4; ++n) {
        auto cyl = oracle::cylinders(ifs, n);
        for (const auto& ad : p.automaton()->addresses(n)) {
            auto lam = p.measure()->actual_lambda(ad).back();
            std::vector<std::pair<Q, Q>> in, out;
            for (const auto& m : lam) in.push_back(testutil::unit_image(m));
            for (const auto& c : cyl)
                if (std::find(lam.begin(), lam.end(), c.map) == lam.end()) out.push_back(testutil::unit_image(c.map));
            CHECK(p.measure()->mass(ad) == testutil::atom_length(in, out));
        }
    }
}

TEST_CASE("global matrix product equals the recursive mass") {
    for (const auto& name : {std::string("golden-bernoulli"), std::string("commensurable-osc")}) {
        auto p = testutil::load(name);
        for (int n = 0; n <= 5; ++n)
            for (const auto& ad : p.automaton()->addresses(n)) CHECK(p.measure()->mass_global(ad) == p.measure()->mass(ad));
    }
}

TEST_CASE("mass vectors are self-consistent") {
    auto p = testutil::load("complex-pisot-demo");
    const auto& m = *p.measure();
    const auto& a = *p.automaton();
    for (size_t s = 0; s < a.num_states(); ++s) {
        QVec acc(m.v(static_cast<int>(s)).size(), Q(0));
        for (int c : a.children(static_cast<int>(s))) {
            auto tv = mat_vec(m.full_transition(static_cast<int>(s), c), m.v(c));
            for (size_t j = 0; j < acc.size(); ++j) acc[j] += tv[j];
        }
        CHECK(acc == m.v(static_cast<int>(s)));
    }
}

TEST_CASE("transition products equal word sums") {
    for (const auto& name : {std::string("golden-bernoulli"), std::string("commensurable-osc")}) {
        INFO(name);
        auto p = testutil::load(name);
        const auto& ifs = *p.ifs();
        const auto& a = *p.automaton();
        for (int n = 1; n <= 4; ++n)
            for (const auto& ad : a.addresses(n)) {
                auto lam = p.measure()->actual_lambda(ad);
                for (int k = 0; k < n; ++k) {
                    std::vector<int> path(ad.begin() + k, ad.end());
                    auto P = p.measure()->product_entries(path);
                    for (size_t i = 0; i < P.size(); ++i)
                        for (size_t j = 0; j < P[i].size(); ++j)
                            CHECK(P[i][j] == oracle::word_sum_entry(ifs, lam[k][i], a.phi_tag(ad[k], static_cast<int>(i)),
                                                                    lam[n][j], n - k));
                }
            }
    }
}

TEST_CASE("discrete reference measure agrees with atom masses") {
    // atoms of the Cantor measure are cylinders, so the level-n discrete measure is exact on them
    auto p = testutil::load("cantor-1-3");
    auto dm = oracle::DiscreteMeasure::build(*p.ifs(), 6);
    CHECK(dm.total() == 1);
    for (const auto& ad : p.automaton()->addresses(3)) {
        auto lam = p.measure()->actual_lambda(ad).back();
        REQUIRE(lam.size() == 1);
        auto [lo, hi] = testutil::unit_image(lam[0]);
        auto b = oracle::estimate_mass(dm, [&](const Point& x) {
            Q v = x[0].coeffs()[0];
            return (lo <= v && v <= hi) ? oracle::Tri::Yes : oracle::Tri::No;
        });
        CHECK(b.lower == p.measure()->mass(ad));
        CHECK(b.upper == b.lower);
    }
}
