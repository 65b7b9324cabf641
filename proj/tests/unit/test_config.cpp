#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "common.hpp"

using namespace ftc;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string golden_text() { return slurp(testutil::config_path("golden-bernoulli")); }

std::string replace(std::string s, const std::string& from, const std::string& to) {
    auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("bundled configs are stored in canonical form") {
    for (const auto& name : testutil::bundled()) {
        INFO(name);
        const auto text = slurp(testutil::config_path(name));
        auto c = IfsConfig::parse(text);
        CHECK(c.canonical() == text);
        CHECK(IfsConfig::parse(c.canonical()) == c);
        CHECK(c.hash() == sha256_hex(text));
        CHECK_NOTHROW(c.build_ifs());
    }
}

TEST_CASE("non-canonical spellings normalise") {
    const std::string text = R"({"name":"x","field":{"poly":["-2/6","1"],"box":{"re":["0","2/2"]}},"base":"1/3",
      "dimension":1,"backend":"real","maps":[{"translation":["0"],"exponent":1},{"translation":["4/6"],"exponent":1}],
      "probabilities":["1/2","2/4"]})";
    auto c = IfsConfig::parse(text);
    auto again = IfsConfig::parse(c.canonical());
    CHECK(again == c);
    CHECK(again.canonical() == c.canonical());
    CHECK(c.hash() == again.hash());
    CHECK(c.canonical() != text);
    CHECK_THAT(c.canonical(), ContainsSubstring("\"2/3\""));
}

TEST_CASE("SHA-256 test vector") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("invalid configs are rejected with located messages") {
    auto g = golden_text();
    auto expect = [](const std::string& text, const std::string& where) {
        try {
            IfsConfig::parse(text).build_ifs();
            FAIL("accepted: " << where);
        } catch (const ConfigError& e) {
            CHECK_THAT(std::string(e.what()), ContainsSubstring(where));
        }
    };
    expect("{", "malformed JSON");
    expect(replace(g, "\"backend\": \"real\"", "\"backend\": \"quaternion\""), "backend");
    expect(replace(g, "\"1/2\",\n    \"1/2\"", "\"1/2\",\n    \"1/3\""), "probabilities must sum to 1");
    expect(replace(g, "\"1/2\",\n    \"1/2\"", "\"1/2\",\n    \"1/0\""), "probabilities[1]");
    expect(replace(g, "\"exponent\": 1\n    }\n  ]", "\"exponent\": 2\n    }\n  ]"), "maps[1].exponent");
    expect(replace(g, "\"dimension\": 1", "\"dimension\": 2"), "maps[0].translation");
    expect(replace(g, "\"name\"", "\"nmae\""), "unknown key");
    expect(replace(g, "\"-1\",\n      \"1\",\n      \"1\"", "\"-1\",\n      \"0\",\n      \"1\""), "field");
    expect(replace(g, "\"1/2\",\n        \"1\"\n      ]", "\"0\",\n        \"1/4\"\n      ]"), "field");
    expect(replace(g, "\"maxStates\": 20000", "\"maxStates\": 0"), "budgets.maxStates");
    expect(replace(g, "\"0\",\n    \"1\"\n  ],\n  \"dimension\"", "\"0\",\n    \"2\"\n  ],\n  \"dimension\""), "base");
}

TEST_CASE("complex backend uses rot literals") {
    auto c = IfsConfig::load(testutil::config_path("complex-pisot-demo"));
    CHECK(c.complex);
    CHECK_THAT(c.canonical(), ContainsSubstring("rot(1)"));
    auto t = replace(c.canonical(), "\"rot(1)\"", "\"rot(0,1)\"");
    // r is not a unit, so the map is rejected
    CHECK_THROWS_AS(IfsConfig::parse(t).build_ifs(), ConfigError);
    auto t2 = replace(c.canonical(), "\"rot(1)\"", "\"rot(-1)\"");
    CHECK_NOTHROW(IfsConfig::parse(t2).build_ifs());
    CHECK_THROWS_AS(IfsConfig::parse(replace(c.canonical(), "\"rot(1)\"", "\"spin(1)\"")), ConfigError);
}
