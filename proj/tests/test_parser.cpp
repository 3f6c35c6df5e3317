#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "crn/parser.hpp"
#include "fixtures.hpp"
#include "parser_corpus.hpp"

using namespace corpus;
using fixture::vec;

TEST_CASE("two-reaction file") {
    const auto loaded = crn::to_network(crn::parse(two_reaction_text));
    Eigen::MatrixXi expected(4, 2);
    expected << -1, 0, -2, 1, 1, -1, 0, 2;
    CHECK(loaded.network.stoich() == expected);
    REQUIRE(loaded.c0);
    CHECK(*loaded.c0 == vec({1, 1, 1, 1}));
    CHECK(loaded.network.species() == std::vector<std::string>{"X1", "X2", "X3", "X4"});
    CHECK(loaded.network.reactions()[0].name == "R1");
    CHECK(loaded.network == fixture::two_reaction());
}

TEST_CASE("single reaction lines") {
    const auto first = crn::parse("X1 + 2 X2 <=> X3 ; kf=1, kr=1");
    REQUIRE(first.reactions.size() == 1);
    CHECK(first.reactions[0].alpha == std::vector<int>{1, 2, 0});
    CHECK(first.reactions[0].beta == std::vector<int>{0, 0, 1});
    CHECK(first.reactions[0].k_plus == 1.0);
    CHECK(first.reactions[0].k_minus == 1.0);

    const auto second = crn::parse("species: X1, X2, X3, X4\nX2 + X3 <=> 2 X4 ; kf=1, kr=1");
    CHECK(second.strict_species);
    CHECK(second.reactions[0].alpha == std::vector<int>{0, 1, 1, 0});
    CHECK(second.reactions[0].beta == std::vector<int>{0, 0, 0, 2});

    const auto repeated = crn::parse("A + A <=> B ; kf=1, kr=1");
    CHECK(repeated.reactions[0].alpha == std::vector<int>{2, 0});
}

TEST_CASE("default rates") {
    const auto file = crn::parse("A <=> B\n");
    CHECK_THROWS_AS(crn::to_network(file), crn::ParseError);
    const auto loaded = crn::to_network(file, crn::DefaultRates{2.0, 3.0});
    CHECK(loaded.network.reactions()[0].k_plus == 2.0);
    CHECK(loaded.network.reactions()[0].k_minus == 3.0);
    CHECK_FALSE(loaded.c0);
}

TEST_CASE("rank-deficient file") {
    CHECK_THROWS_AS(crn::to_network(crn::parse("A <=> B ; kf=1, kr=1\n2 A <=> 2 B ; kf=1, kr=1\n")),
                    crn::RankDeficient);
}

TEST_CASE("malformed corpus reports positions") {
    REQUIRE(malformed.size() >= 10);
    for (const auto& m : malformed) {
        CAPTURE(m.text);
        try {
            crn::to_network(crn::parse(m.text));
            FAIL("accepted malformed input");
        } catch (const crn::ParseError& e) {
            CHECK(e.kind() == m.kind);
            CHECK(e.line() == m.line);
            CHECK(e.column() == m.column);
            const std::string expected_prefix =
                "line " + std::to_string(m.line) + ", column " + std::to_string(m.column) + ": ";
            CHECK(std::string(e.what()).rfind(expected_prefix, 0) == 0);
        }
    }
}

TEST_CASE("fractional coefficients point to the integer restriction") {
    try {
        crn::parse("0.5 A <=> B");
        FAIL("accepted a fractional coefficient");
    } catch (const crn::ParseError& e) {
        CHECK(std::string(e.what()).find("integer") != std::string::npos);
    }
}

TEST_CASE("serialize and parse round trip") {
    for (const auto& text : valid_corpus) {
        CAPTURE(text);
        const auto first = crn::to_network(crn::parse(text), crn::DefaultRates{});
        const std::string canonical = crn::serialize(first.network, first.c0);
        const auto second = crn::to_network(crn::parse(canonical));
        CHECK(second.network == first.network);
        CHECK(second.c0.has_value() == first.c0.has_value());
        if (first.c0 && second.c0) CHECK(*second.c0 == *first.c0);
        CHECK(crn::serialize(second.network, second.c0) == canonical);
    }
}

TEST_CASE("canonical text") {
    const auto loaded = crn::to_network(crn::parse(two_reaction_text));
    CHECK(crn::serialize(loaded.network, loaded.c0) ==
          "species: X1, X2, X3, X4\n"
          "R1: 1 X1 + 2 X2 <=> 1 X3 ; kf=1, kr=1\n"
          "R2: 1 X3 <=> 1 X2 + 2 X4 ; kf=1, kr=1\n"
          "init X1 = 1\n"
          "init X2 = 1\n"
          "init X3 = 1\n"
          "init X4 = 1\n");
    CHECK(crn::format_shortest(0.1) == "0.1");
    CHECK(crn::format_shortest(0.30000000000000004) == "0.30000000000000004");
}

TEST_CASE("missing file") { CHECK_THROWS_AS(crn::load_network_file("/nonexistent/net.crn"), crn::InvalidInput); }
