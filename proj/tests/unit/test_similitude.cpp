#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "common.hpp"
#include "ftc/similitude.hpp"

using namespace ftc;

namespace {

struct Golden {
    FieldPtr f = Field::create(MinimalPolynomial({Q(-1), Q(1), Q(1)}, RootBox{Q(1, 2), Q(1), Q(0), Q(0)}));
    FieldElement r = FieldElement::generator(f), one = FieldElement::one(f), zero = FieldElement::zero(f);
};

}  // namespace

TEST_CASE("similitude group laws in the plane") {
    Golden g;
    auto sp = Space::create(g.f, 2, false, g.r);
    std::vector<FieldElement> rot{g.zero, -g.one, g.one, g.zero};
    Similitude a(sp, 1, rot, {g.one, g.zero});
    Similitude b(sp, 2, {g.one, g.zero, g.zero, g.one}, {g.zero, g.r});
    Similitude c(sp, 1, {g.one, g.zero, g.zero, -g.one}, {g.r, g.one});
    CHECK(a.compose(b).compose(c) == a.compose(b.compose(c)));
    CHECK(a.compose(a.inverse()).is_identity());
    CHECK(a.inverse().compose(a).is_identity());
    CHECK(a.compose(b).exponent() == 3);
    Point x{g.r, g.one - g.r};
    CHECK(a.compose(b).apply(x) == a.apply(b.apply(x)));
    auto fp = c.fixed_point();
    CHECK(c.apply(fp) == fp);
    CHECK(a.orthogonal_ok());
    Similitude skew(sp, 1, {g.one, g.one, g.zero, g.one}, {g.zero, g.zero});
    CHECK_FALSE(skew.orthogonal_ok());
}

TEST_CASE("IFS validation") {
    Golden g;
    auto sp = Space::create(g.f, 1, false, g.r);
    Similitude s1(sp, 1, {g.one}, {g.zero}), s2(sp, 1, {g.one}, {g.one - g.r});
    CHECK_NOTHROW(IFS(sp, {s1, s2}, {Q(1, 2), Q(1, 2)}));
    CHECK_THROWS_AS(IFS(sp, {s1, s2}, {Q(1, 2), Q(1, 3)}), std::invalid_argument);
    CHECK_THROWS_AS(IFS(sp, {s1, s2}, {Q(1), Q(0)}), std::invalid_argument);
    CHECK_THROWS_AS(IFS(sp, {s1, s1}, {Q(1, 2), Q(1, 2)}), std::invalid_argument);
    CHECK_THROWS_AS(IFS(sp, {s1}, {Q(1, 2), Q(1, 2)}), std::invalid_argument);
    CHECK_THROWS_AS(Space::create(g.f, 1, false, g.one + g.r), std::invalid_argument);  // |base| > 1
}

TEST_CASE("stopping sets partition probability and are prefix-minimal") {
    for (const auto& name : {std::string("commensurable-osc"), std::string("golden-bernoulli")}) {
        auto p = testutil::load(name);
        const auto& ifs = *p.ifs();
        const long K = ifs.level_exponent();
        for (int n = 1; n <= 6; ++n) {
            auto words = ifs.stopping_words(n);
            Q total = 0;
            for (const auto& w : words) {
                total += ifs.word_prob(w);
                CHECK(ifs.word_exponent(w) >= n * K);
                Word pre(w.begin(), w.end() - 1);
                CHECK(ifs.word_exponent(pre) < n * K);
            }
            CHECK(total == 1);
            CHECK(std::is_sorted(words.begin(), words.end()));
        }
        for (int tag = 0; tag < K; ++tag) {
            Q total = 0;
            for (const auto& e : ifs.ext(tag)) {
                total += e.prob;
                CHECK(e.map == ifs.word_map(e.word));
                CHECK(e.new_tag == tag + ifs.word_exponent(e.word) - K);
            }
            CHECK(total == 1);
        }
    }
}

TEST_CASE("commensurable stopping words use exponent thresholds") {
    auto p = testutil::load("commensurable-osc");
    const auto& ifs = *p.ifs();
    CHECK(ifs.level_exponent() == 2);
    CHECK_FALSE(ifs.equicontractive());
    // threshold 2: words 11 (k=2), 12 (k=3), 2 (k=2)
    auto w = ifs.stopping_words(1);
    REQUIRE(w.size() == 3);
    CHECK(w[0] == Word{0, 0});
    CHECK(w[1] == Word{0, 1});
    CHECK(w[2] == Word{1});
}
