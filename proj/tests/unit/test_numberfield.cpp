#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ftc/numberfield.hpp"

using namespace ftc;

namespace {

FieldPtr golden() { return Field::create(MinimalPolynomial({Q(-1), Q(1), Q(1)}, RootBox{Q(1, 2), Q(1), Q(0), Q(0)})); }

FieldPtr twin() {
    return Field::create(MinimalPolynomial({Q(1, 2), Q(1), Q(1)}, RootBox{Q(-3, 5), Q(-2, 5), Q(2, 5), Q(3, 5)}));
}

FieldElement random_element(const FieldPtr& f, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
    std::vector<Q> c;
    for (int i = 0; i < f->degree(); ++i) c.emplace_back(num(rng), den(rng));
    for (auto& q : c) q.canonicalize();
    return FieldElement(f, c);
}

}  // namespace

TEST_CASE("rational literals round-trip in canonical form") {
    CHECK(rational_str(parse_rational("2/4")) == "1/2");
    CHECK(rational_str(parse_rational("-6/3")) == "-2");
    CHECK(rational_str(parse_rational("0/5")) == "0");
    CHECK(parse_rational("7") == Q(7));
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
}

TEST_CASE("golden field arithmetic") {
    auto f = golden();
    auto r = FieldElement::generator(f);
    auto one = FieldElement::one(f);
    CHECK(r * r == one - r);
    CHECK(r.inverse() == r + one);
    CHECK((r * r.inverse()) == one);
    auto e = r.enclose(200);
    const double exact = (std::sqrt(5.0) - 1) / 2;
    CHECK(e.re.lo_d() <= exact);
    CHECK(e.re.hi_d() >= exact);
    CHECK(e.im.contains_zero());
    CHECK(r.pow(-2) == (r * r).inverse());
}

TEST_CASE("field construction rejects bad input") {
    CHECK_THROWS_AS(Field::create(MinimalPolynomial({Q(-1), Q(0), Q(1)}, RootBox{Q(1, 2), Q(2), Q(0), Q(0)})),
                    std::invalid_argument);  // reducible
    CHECK_THROWS_AS(Field::create(MinimalPolynomial({Q(-1), Q(1), Q(1)}, RootBox{Q(-2), Q(1), Q(0), Q(0)})),
                    std::invalid_argument);  // box holds both roots
    CHECK_THROWS_AS(MinimalPolynomial({Q(-1), Q(2)}, RootBox{Q(0), Q(1), Q(0), Q(0)}), std::invalid_argument);
}

TEST_CASE("complex field: conjugation and modulus") {
    auto f = twin();
    CHECK_FALSE(f->is_real());
    auto r = FieldElement::generator(f);
    auto c = r.conj();
    REQUIRE(c.has_value());
    CHECK(*c == -r - FieldElement::one(f));
    CHECK(r * *c == FieldElement::rational(f, Q(1, 2)));
    auto e = r.enclose(128);
    CHECK(e.re.contains(Q(-1, 2)));
    CHECK(e.im.contains(Q(1, 2)));
}

TEST_CASE("Pisot advisory classification") {
    CHECK(check_pisot({Q(-1), Q(1), Q(1)}, RootBox{Q(1, 2), Q(1), Q(0), Q(0)}).cls == PisotClass::Pisot);
    CHECK(check_pisot({Q(1, 2), Q(1), Q(1)}, RootBox{Q(-3, 5), Q(-2, 5), Q(2, 5), Q(3, 5)}).cls ==
          PisotClass::ComplexPisot);
    CHECK(check_pisot({Q(-2, 3), Q(1)}, RootBox{Q(0), Q(1), Q(0), Q(0)}).cls == PisotClass::Neither);
}

TEST_CASE("field axioms hold on random elements") {
    std::mt19937_64 rng(7);
    for (auto f : {golden(), twin()}) {
        for (int t = 0; t < 200; ++t) {
            auto a = random_element(f, rng), b = random_element(f, rng), c = random_element(f, rng);
            CHECK((a + b) * c == a * c + b * c);
            CHECK((a * b) * c == a * (b * c));
            if (!b.is_zero()) CHECK((a * b) * b.inverse() == a);
            auto ea = a.enclose(128), eb = b.enclose(128), eab = (a * b).enclose(128);
            auto prod = ea * eb;
            CHECK_FALSE(certainly_lt(prod.re, eab.re));
            CHECK_FALSE(certainly_lt(eab.re, prod.re));
        }
    }
}

TEST_CASE("interval enclosures") {
    Interval a(Q(1, 3), 128), b(Q(2, 3), 128);
    auto s = a + b;
    CHECK(s.contains(Q(1)));
    CHECK((a * Interval(Q(3), 128)).contains(Q(1)));
    auto l = Interval(Q(2), 128).log();
    CHECK(l.lo_d() <= std::log(2.0));
    CHECK(l.hi_d() >= std::log(2.0));
    CHECK(certainly_lt(a, b));
    CHECK_FALSE(certainly_lt(b, a));
}
