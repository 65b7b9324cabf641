#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "common.hpp"
#include "ftc/oracle.hpp"

using namespace ftc;

namespace {

// relative maps of intersecting same-level cylinder pairs, found by subdivision alone
size_t brute_force_gamma(Pipeline& p, int level, int depth, size_t* unknown) {
    const auto& ifs = *p.ifs();
    auto cyl = oracle::cylinders(ifs, level);
    std::set<int> found;
    for (size_t i = 0; i < cyl.size(); ++i)
        for (size_t k = 0; k < cyl.size(); ++k) {
            auto t = oracle::subdivision_intersects(ifs, cyl[i].map, cyl[k].map, level, depth);
            if (t == oracle::Tri::Unknown) ++*unknown;
            if (t != oracle::Tri::Yes) continue;
            int id = p.graph()->find(cyl[i].map.inverse().compose(cyl[k].map), cyl[i].tag, cyl[k].tag);
            REQUIRE(id >= 0);
            REQUIRE(p.graph()->node(id).alive);
            found.insert(id);
        }
    return found.size();
}

}  // namespace

TEST_CASE("Cantor neighbour set is trivial") {
    auto p = testutil::load("cantor-1-3");
    REQUIRE(p.ftc_verified());
    CHECK(p.graph()->gamma_size() == 1);
    CHECK(p.graph()->node(p.graph()->identity_node(0)).is_identity);
}

TEST_CASE("neighbour set matches brute-force subdivision") {
    for (auto [name, level] : {std::pair<std::string, int>{"golden-bernoulli", 7}, {"commensurable-osc", 4},
                               {"lebesgue-1-2", 5}, {"complex-pisot-demo", 6}}) {
        INFO(name);
        auto p = testutil::load(name);
        REQUIRE(p.ftc_verified());
        size_t unknown = 0;
        CHECK(brute_force_gamma(p, level, 14, &unknown) == p.graph()->gamma_size());
        CHECK(unknown == 0);
    }
}

TEST_CASE("overlap with ratio 2/3 is inconclusive at budget") {
    auto p = Pipeline::from_file(std::string(FTC_SOURCE_DIR) + "/tests/data/overlap-2-3.json");
    CHECK_FALSE(p.ftc_verified());
    CHECK(p.graph()->status() == ClosureStatus::ExceededBound);
    CHECK_THROWS_AS(p.automaton(), Inconclusive);
}

TEST_CASE("intersection predicate is symmetric and reflexive") {
    auto p = testutil::load("golden-bernoulli");
    const auto& g = *p.graph();
    auto cyl = oracle::cylinders(*p.ifs(), 5);
    for (size_t i = 0; i < cyl.size(); ++i) {
        CHECK(g.intersects(cyl[i].map, cyl[i].map));
        for (size_t k = i + 1; k < cyl.size(); ++k) CHECK(g.intersects(cyl[i].map, cyl[k].map) == g.intersects(cyl[k].map, cyl[i].map));
    }
}

TEST_CASE("triple intersections imply pairwise intersections") {
    auto p = testutil::load("golden-gasket-conjugated");
    const auto& g = *p.graph();
    auto cyl = oracle::cylinders(*p.ifs(), 2);
    for (size_t i = 0; i < cyl.size(); ++i)
        for (size_t j = i + 1; j < cyl.size(); ++j)
            for (size_t k = j + 1; k < cyl.size(); ++k) {
                if (!g.tuple_intersects({cyl[i].map, cyl[j].map, cyl[k].map})) continue;
                CHECK(g.intersects(cyl[i].map, cyl[j].map));
                CHECK(g.intersects(cyl[j].map, cyl[k].map));
                CHECK(g.intersects(cyl[i].map, cyl[k].map));
            }
}
