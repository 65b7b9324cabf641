#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>

#include "common.hpp"
#include "ftc/oracle.hpp"

using namespace ftc;

namespace {

// omega: lexicographically least stopping word of each level-n cylinder map
std::unordered_map<Similitude, Word, SimilitudeHash> omega_words(const IFS& ifs, int level) {
    std::unordered_map<Similitude, Word, SimilitudeHash> out;
    for (const auto& w : ifs.stopping_words(level)) {
        auto m = ifs.word_map(w);
        auto it = out.find(m);
        if (it == out.end() || w < it->second) out[m] = w;
    }
    return out;
}

}  // namespace

TEST_CASE("Cantor atoms are the cylinders") {
    auto p = testutil::load("cantor-1-3");
    const auto& a = *p.automaton();
    for (int n = 0; n <= 6; ++n) {
        auto addrs = a.addresses(n);
        CHECK(addrs.size() == (size_t(1) << n));
        for (const auto& ad : addrs) CHECK(p.measure()->mass(ad) == Q(1, 1 << n));
    }
}

TEST_CASE("V entries follow the omega order") {
    for (auto [name, depth] : {std::pair<std::string, int>{"golden-bernoulli", 6}, {"commensurable-osc", 5},
                               {"golden-gasket-conjugated", 3}, {"complex-pisot-demo", 4}}) {
        INFO(name);
        auto p = testutil::load(name);
        const auto& ifs = *p.ifs();
        for (int n = 1; n <= depth; ++n) {
            auto omega = omega_words(ifs, n);
            for (const auto& ad : p.automaton()->addresses(n)) {
                auto lam = p.measure()->actual_lambda(ad).back();
                std::vector<Word> ws;
                for (const auto& m : lam) {
                    auto it = omega.find(m);
                    REQUIRE(it != omega.end());
                    ws.push_back(it->second);
                }
                for (size_t i = 1; i < ws.size(); ++i) CHECK(ws[i - 1] < ws[i]);
            }
        }
    }
}

TEST_CASE("sibling atoms have distinct containing sets") {
    for (const auto& name : testutil::bundled()) {
        INFO(name);
        auto p = testutil::load(name);
        const auto& a = *p.automaton();
        for (int n = 1; n <= 4; ++n) {
            std::map<std::vector<int>, std::set<std::vector<std::string>>> by_parent;
            for (const auto& ad : a.addresses(n)) {
                std::vector<int> parent(ad.begin(), ad.end() - 1);
                std::vector<std::string> key;
                auto lam = p.measure()->actual_lambda(ad);
                for (const auto& m : lam.back()) key.push_back(m.str());
                CHECK(by_parent[parent].insert(key).second);
            }
        }
    }
}

TEST_CASE("positive atoms match sampled containment signatures") {
    auto p = testutil::load("golden-bernoulli");
    oracle::AtomSampler sampler(*p.ifs(), 5);
    sampler.run(400000, 11);
    for (int n = 1; n <= 5; ++n) {
        size_t positive = 0;
        for (const auto& ad : p.automaton()->addresses(n))
            if (p.measure()->mass(ad) > 0) ++positive;
        CHECK(sampler.signatures(n) == positive);
    }
}

TEST_CASE("superset automaton gives the same positive masses") {
    for (const auto& name : {std::string("golden-bernoulli"), std::string("complex-pisot-demo")}) {
        INFO(name);
        auto exact = testutil::load(name);
        PipelineOptions o;
        o.exact_atoms = false;
        auto loose = testutil::load(name, o);
        CHECK(loose.automaton()->num_states() >= exact.automaton()->num_states());
        for (int n = 1; n <= 5; ++n) {
            std::multiset<Q> me, ml;
            Q total = 0;
            for (const auto& ad : exact.automaton()->addresses(n)) {
                Q m = exact.measure()->mass(ad);
                if (m > 0) me.insert(m);
            }
            for (const auto& ad : loose.automaton()->addresses(n)) {
                Q m = loose.measure()->mass(ad);
                total += m;
                if (m > 0) ml.insert(m);
            }
            CHECK(me == ml);
            CHECK(total == 1);
        }
    }
}

TEST_CASE("automaton construction is deterministic") {
    auto a = testutil::load("golden-gasket-conjugated");
    auto b = testutil::load("golden-gasket-conjugated");
    CHECK(a.automaton()->to_json() == b.automaton()->to_json());
    CHECK(a.automaton()->to_dot() == b.automaton()->to_dot());
    CHECK(a.measure()->to_json() == b.measure()->to_json());
}

TEST_CASE("address resolution") {
    auto p = testutil::load("golden-bernoulli");
    const auto& a = *p.automaton();
    CHECK(a.resolve({0}).has_value());
    for (const auto& ad : a.addresses(3)) CHECK(a.resolve(ad) == ad.back());
    CHECK_FALSE(a.resolve({0, static_cast<int>(a.num_states()) + 5}).has_value());
}

TEST_CASE("state budget is enforced") {
    PipelineOptions o;
    o.max_states = 10;
    auto p = testutil::load("golden-gasket-conjugated", o);
    CHECK_THROWS_AS(p.automaton(), Inconclusive);
}
