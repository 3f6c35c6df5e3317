#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crn/network.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using crn::Vector;
using fixture::vec;

TEST_CASE("stoichiometric matrix of the two-reaction network") {
    const auto net = fixture::two_reaction();
    Eigen::MatrixXi expected(4, 2);
    expected << -1, 0, -2, 1, 1, -1, 0, 2;
    CHECK(net.stoich() == expected);
    CHECK(crn::exact_rank(net.stoich()) == 2);

    const auto alt = fixture::two_reaction_alt();
    Eigen::MatrixXi expected_alt(4, 2);
    expected_alt << -1, 0, -2, -1, 1, -1, 0, 2;
    CHECK(alt.stoich() == expected_alt);
}

TEST_CASE("single reaction has rank one") {
    const auto net = fixture::pair_network(1.0, 1.0);
    Eigen::MatrixXi expected(2, 1);
    expected << -1, 1;
    CHECK(net.stoich() == expected);
    CHECK(crn::exact_rank(net.stoich()) == 1);
}

TEST_CASE("construction rejects invalid networks") {
    SUBCASE("dependent reactions are named") {
        try {
            crn::build_network({"X1", "X2"}, {{{1, 0}, {0, 1}, 1.0, 1.0, "fwd"}, {{2, 0}, {0, 2}, 1.0, 1.0, "dbl"}});
            FAIL("expected RankDeficient");
        } catch (const crn::RankDeficient& e) {
            REQUIRE(e.dependent().size() == 1);
            CHECK(e.dependent()[0] == "dbl");
        }
    }
    SUBCASE("no-op reaction") {
        CHECK_THROWS_AS(crn::build_network({"A"}, {{{1}, {1}, 1.0, 1.0, ""}}), crn::InvalidReaction);
    }
    SUBCASE("nonpositive rate constant") {
        CHECK_THROWS_AS(crn::build_network({"A", "B"}, {{{1, 0}, {0, 1}, 0.0, 1.0, ""}}), crn::InvalidReaction);
        CHECK_THROWS_AS(crn::build_network({"A", "B"}, {{{1, 0}, {0, 1}, 1.0, -2.0, ""}}), crn::InvalidReaction);
    }
    SUBCASE("empty side") {
        CHECK_THROWS_AS(crn::build_network({"A", "B"}, {{{1, 0}, {0, 0}, 1.0, 1.0, ""}}), crn::InvalidInput);
    }
    SUBCASE("duplicate species") {
        CHECK_THROWS_AS(crn::build_network({"A", "A"}, {{{1, 0}, {0, 1}, 1.0, 1.0, ""}}), crn::InvalidInput);
    }
    SUBCASE("wrong coefficient length") {
        CHECK_THROWS_AS(crn::build_network({"A", "B"}, {{{1}, {0, 1}, 1.0, 1.0, ""}}), crn::InvalidInput);
    }
}

TEST_CASE("reactions are auto-named") {
    const auto net = crn::build_network({"A", "B"}, {{{1, 0}, {0, 1}, 1.0, 1.0, ""}});
    CHECK(net.reactions()[0].name == "R1");
}

TEST_CASE("conservation basis") {
    SUBCASE("two-reaction network") {
        const auto net = fixture::two_reaction();
        const auto basis = crn::conservation_basis(net);
        REQUIRE(basis.size() == 2);
        CHECK(basis.vectors[0] == vec({2, 0, 2, 1}));
        CHECK(basis.vectors[1] == vec({0, 2, 4, 1}));
        for (const auto& g : basis.vectors) CHECK((net.stoich_real().transpose() * g).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("two-reaction network, second reaction as X2 + X3 <=> 2 X4") {
        const auto net = fixture::two_reaction_alt();
        const auto basis = crn::conservation_basis(net);
        REQUIRE(basis.size() == 2);
        CHECK(basis.vectors[0] == vec({2, 0, 2, 1}));
        CHECK(basis.vectors[1] == vec({0, 2, 4, 3}));
        for (const auto& g : basis.vectors) CHECK((net.stoich_real().transpose() * g).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("isomerization conserves total mass") {
        const auto basis = crn::conservation_basis(fixture::pair_network(1.0, 1.0));
        REQUIRE(basis.size() == 1);
        CHECK(basis.vectors[0] == vec({1, 1}));
    }
    SUBCASE("square full-rank network has an empty basis") {
        const auto net = crn::build_network({"A", "B"}, {{{1, 0}, {0, 1}, 1.0, 1.0, ""}, {{0, 1}, {2, 0}, 1.0, 1.0, ""}});
        CHECK(crn::conservation_basis(net).size() == 0);
    }
    SUBCASE("single reaction gives dimension N - 1") {
        const auto net = crn::build_network({"A", "B", "C", "D"}, {{{1, 1, 0, 0}, {0, 0, 1, 0}, 1.0, 1.0, ""}});
        const auto basis = crn::conservation_basis(net);
        CHECK(basis.size() == 3);
        for (const auto& g : basis.vectors) CHECK((net.stoich_real().transpose() * g).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("concentrations from extents") {
    const auto net = fixture::two_reaction();
    const Vector c0 = vec({1, 1, 1, 1});
    CHECK(crn::concentrations(net, c0, vec({0, 0})) == c0);
    const Vector c = crn::concentrations(net, c0, vec({0.2, 0.1}));
    const auto expected = oracle::conc(oracle::two_reaction(), {1, 1, 1, 1}, {0.2, 0.1});
    for (int i = 0; i < 4; ++i) CHECK(c(i) == doctest::Approx(expected[i]).epsilon(1e-15));
    CHECK(c(0) == doctest::Approx(0.8));
    CHECK(c(1) == doctest::Approx(0.7));
    CHECK(c(2) == doctest::Approx(1.1));
    CHECK(c(3) == doctest::Approx(1.2));

    const auto basis = crn::conservation_basis(net);
    const Vector res = crn::conservation_residuals(basis, c0, crn::concentrations(net, c0, vec({0.37, -0.21})));
    CHECK(res.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("mass-action rates") {
    SUBCASE("isomerization at its balance point") {
        const auto r = crn::lma_rates(fixture::pair_network(1.0, 2.0), vec({2, 1}));
        CHECK(r.forward(0) == 2.0);
        CHECK(r.backward(0) == 2.0);
        CHECK(r.net()(0) == 0.0);
    }
    SUBCASE("two-reaction network at unit concentrations") {
        const auto r = crn::lma_rates(fixture::two_reaction(), vec({1, 1, 1, 1}));
        CHECK(r.net() == vec({0, 0}));
    }
    SUBCASE("monomials by repeated multiplication") {
        CHECK(crn::monomial(vec({3, 0.5}), {2, 3}) == 9.0 * 0.125);
        CHECK(crn::monomial(vec({0, 2}), {0, 1}) == 2.0);
        CHECK(crn::monomial(vec({-2, 1}), {3, 0}) == -8.0);
    }
}

TEST_CASE("detailed-balance equilibrium") {
    SUBCASE("isomerization") {
        const auto eq = crn::solve_equilibrium(fixture::pair_network(1.0, 2.0));
        CHECK(eq.c_inf(0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        CHECK(eq.c_inf(1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    }
    SUBCASE("equal rate constants give the unit vector") {
        const auto eq = crn::solve_equilibrium(fixture::two_reaction());
        CHECK(eq.c_inf == vec({1, 1, 1, 1}));
    }
    SUBCASE("driven two-reaction network") {
        const auto net = fixture::two_reaction(2.0, 1.0, 1.0, 1.0);
        const Vector c = crn::solve_equilibrium(net).c_inf;
        CHECK((c.array() > 0).all());
        CHECK(2.0 * c(0) * c(1) * c(1) == doctest::Approx(c(2)).epsilon(1e-12));
        CHECK(c(2) == doctest::Approx(c(1) * c(3) * c(3)).epsilon(1e-12));
        CHECK(crn::lma_rates(net, c).net().cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("override validation") {
        const auto net = fixture::two_reaction(2.0, 1.0, 1.0, 1.0);
        // c3 = 2 c1 c2^2 and c3 = c2 c4^2 with c1 = c2 = 1.
        CHECK_NOTHROW(crn::make_equilibrium(net, vec({1, 1, 2, std::sqrt(2.0)})));
        CHECK_THROWS_AS(crn::make_equilibrium(net, vec({1, 1, 1, 1})), crn::InvalidInput);
        CHECK_THROWS_AS(crn::make_equilibrium(net, vec({1, 1, 2})), crn::InvalidInput);
        CHECK_THROWS_AS(crn::make_equilibrium(net, vec({-1, 1, 2, 1})), crn::InvalidInput);
    }
}

TEST_CASE("free energy") {
    CHECK(crn::free_energy(vec({1, 1, 1, 1}), vec({1, 1, 1, 1})) == -4.0);
    CHECK(crn::free_energy(vec({2, 1}), vec({1, 1})) == doctest::Approx(2.0 * std::log(2.0) - 3.0).epsilon(1e-15));
    CHECK(crn::free_energy(vec({0, 1}), vec({1, 1})) == -1.0);
    CHECK(std::isnan(crn::free_energy(vec({-0.1, 1}), vec({1, 1}))));

    const Vector c_inf = vec({1.3, 0.4, 2.0});
    CHECK(crn::free_energy(c_inf, c_inf) == doctest::Approx(-c_inf.sum()));
    const auto points = oracle::sample_box({0, 0, 0}, {5, 5, 5}, 200, [](const oracle::Vec&) { return true; }, 7);
    for (const auto& p : points) {
        const Vector c = fixture::from_std(p);
        CHECK(crn::free_energy(c, c_inf) >= -c_inf.sum());
        CHECK(crn::free_energy(c, c_inf) ==
              doctest::Approx(oracle::free_energy(p, fixture::to_std(c_inf))).epsilon(1e-14));
    }
}

TEST_CASE("chemical potential is the gradient of the free energy") {
    const Vector c_inf = vec({1.3, 0.4, 2.0});
    CHECK(crn::chemical_potential(c_inf, c_inf) == vec({0, 0, 0}));
    const Vector mu = crn::chemical_potential(vec({std::exp(1.0) * 1.3, 0.4, 2.0}), c_inf);
    CHECK(mu(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mu(1) == 0.0);
    CHECK_THROWS_AS(crn::chemical_potential(vec({0, 1, 1}), c_inf), crn::DomainError);

    const auto points =
        oracle::sample_box({0.05, 0.05, 0.05}, {4, 4, 4}, 100, [](const oracle::Vec&) { return true; }, 11);
    for (const auto& p : points) {
        const auto fd = oracle::central_gradient(
            [&](const oracle::Vec& c) { return oracle::free_energy(c, fixture::to_std(c_inf)); }, p, 1e-6);
        const Vector mu_p = crn::chemical_potential(fixture::from_std(p), c_inf);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(mu_p(i) - fd[i]) <= 1e-6 * std::max(1.0, std::abs(fd[i])));
    }
}

TEST_CASE("affinity") {
    const auto pair = fixture::pair_network(1.0, 1.0);
    CHECK(crn::affinity(pair, vec({2, 1}), vec({1, 1}))(0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));

    const auto net = fixture::two_reaction(2.0, 1.0, 0.5, 3.0);
    const Vector c_inf = crn::solve_equilibrium(net).c_inf;
    CHECK(crn::affinity(net, c_inf, c_inf).cwiseAbs().maxCoeff() <= 1e-12);

    // ln(r+ / r-) = -affinity for any positive c.
    const auto points = oracle::sample_box({0.1, 0.1, 0.1, 0.1}, {3, 3, 3, 3}, 100,
                                           [](const oracle::Vec&) { return true; }, 13);
    for (const auto& p : points) {
        const Vector c = fixture::from_std(p);
        const auto r = crn::lma_rates(net, c);
        const Vector a = crn::affinity(net, c, c_inf);
        for (int l = 0; l < 2; ++l) CHECK(std::log(r.forward(l) / r.backward(l)) == doctest::Approx(-a(l)).epsilon(1e-10));
    }
}

TEST_CASE("affinity vanishes exactly where the rates do") {
    const auto net = fixture::two_reaction(2.0, 1.0, 1.0, 1.0);
    const Vector c_inf = crn::solve_equilibrium(net).c_inf;
    const Vector c0 = vec({1, 1, 1, 1});
    const auto inside = [](const oracle::Vec& R) {
        for (double v : oracle::conc(oracle::two_reaction(2, 1, 1, 1), {1, 1, 1, 1}, R))
            if (v <= 0.0) return false;
        return true;
    };
    for (const auto& R : oracle::sample_box({-0.4, -0.4}, {0.4, 0.4}, 50, inside, 17)) {
        const Vector c = crn::concentrations(net, c0, fixture::from_std(R));
        const bool affinity_zero = crn::affinity(net, c, c_inf).cwiseAbs().maxCoeff() <= 1e-8;
        const bool rates_zero = crn::lma_rates(net, c).net().cwiseAbs().maxCoeff() <= 1e-8;
        CHECK(affinity_zero == rates_zero);
    }
    // Zero affinity means ln(c / c_inf) lies in ker S^T.
    const auto basis = crn::conservation_basis(net);
    for (const auto& theta : oracle::sample_box({-0.5, -0.5}, {0.5, 0.5}, 50, [](const oracle::Vec&) { return true; }, 19)) {
        const Vector log_ratio = theta[0] * basis.vectors[0] + theta[1] * basis.vectors[1];
        const Vector c = c_inf.cwiseProduct(log_ratio.array().exp().matrix());
        CHECK(crn::affinity(net, c, c_inf).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(crn::lma_rates(net, c).net().cwiseAbs().maxCoeff() <= 1e-8);
    }
}
