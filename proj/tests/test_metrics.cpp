#include <doctest.h>

#include <random>

#include <xos/xos.hpp>

#include "generators.hpp"

using namespace xos;

namespace {

FirmSystem two_firm(double offdiag_s, double offdiag_d, double nominal) {
    Eigen::MatrixXd ms(2, 2), md(2, 2);
    ms << 0.0, offdiag_s, offdiag_s, 0.0;
    md << 0.0, offdiag_d, offdiag_d, 0.0;
    std::vector<std::vector<LiabilitySpec>> grid = {
        {LiabilitySpec::constant(nominal)},
        {LiabilitySpec::constant(nominal)},
    };
    return FirmSystem(OwnershipMatrix(ms, MatrixKind::StrictSubstochastic),
                      {OwnershipMatrix(md, MatrixKind::StrictSubstochastic)},
                      OwnershipMatrix(Eigen::MatrixXd::Identity(2, 2),
                                      MatrixKind::ColumnBounded),
                      std::move(grid));
}

StateVector state2(double r0, double r1, double s0, double s1) {
    StateVector state = StateVector::zero(2, 1);
    state.r[0] << r0, r1;
    state.s << s0, s1;
    return state;
}

} // namespace

TEST_CASE("internal leverage of the bond cross-holding rows") {
    const FirmSystem bond = two_firm(0.0, 0.5, 100.0);
    CHECK(internal_leverage(bond, Scenario(Eigen::Vector2d(100.0, 100.0)),
                            state2(100.0, 100.0, 50.0, 50.0)) == doctest::Approx(0.5));
    CHECK(internal_leverage(bond, Scenario(Eigen::Vector2d(50.0, 50.0)),
                            state2(100.0, 100.0, 0.0, 0.0)) == doctest::Approx(1.0));
    const FirmSystem none = two_firm(0.0, 0.0, 100.0);
    CHECK(internal_leverage(none, Scenario(Eigen::Vector2d(150.0, 150.0)),
                            state2(100.0, 100.0, 50.0, 50.0)) == 0.0);
}

TEST_CASE("internal leverage requires an exogenous base") {
    const FirmSystem bond = two_firm(0.0, 0.5, 100.0);
    CHECK_THROWS_AS(internal_leverage(bond, Scenario(Eigen::Vector2d(0.0, 0.0)),
                                      state2(1.0, 1.0, 1.0, 1.0)),
                    ZeroExogenousBase);
}

TEST_CASE("cross-ownership degree follows L / (L + 1)") {
    const FirmSystem bond = two_firm(0.0, 0.5, 100.0);
    CHECK(cross_ownership_degree(bond, Scenario(Eigen::Vector2d(50.0, 50.0)),
                                 state2(100.0, 100.0, 0.0, 0.0)) == doctest::Approx(0.5));
    const FirmSystem none = two_firm(0.0, 0.0, 100.0);
    CHECK(cross_ownership_degree(none, Scenario(Eigen::Vector2d(150.0, 150.0)),
                                 state2(100.0, 100.0, 50.0, 50.0)) == 0.0);
    const FirmSystem sharp = two_firm(0.5, 0.0, 0.0);
    CHECK(cross_ownership_degree(sharp, Scenario(Eigen::Vector2d(1.0, 1.0)),
                                 state2(0.0, 0.0, 2.0, 2.0)) == doctest::Approx(0.5));
    CHECK_THROWS_AS(cross_ownership_degree(none, Scenario(Eigen::Vector2d(1.0, 1.0)),
                                           state2(0.0, 0.0, 0.0, 0.0)),
                    ZeroClaims);
}

TEST_CASE("leverage_bounds examples") {
    const auto sharp = leverage_bounds(two_firm(0.5, 0.0, 0.0));
    CHECK(sharp.first == doctest::Approx(0.5));
    CHECK(sharp.second == doctest::Approx(1.0));

    const auto zero = leverage_bounds(two_firm(0.0, 0.0, 1.0));
    CHECK(zero.first == 0.0);
    CHECK(zero.second == 0.0);

    const auto gap = leverage_bounds(two_firm(0.0, 0.8, 0.0));
    CHECK(gap.first == doctest::Approx(0.8));
    CHECK(gap.second == doctest::Approx(4.0));
}

TEST_CASE("external leverage worked examples") {
    const FirmSystem none = two_firm(0.0, 0.0, 100.0);
    const auto lex = external_leverage(none, state2(100.0, 100.0, 50.0, 50.0));
    REQUIRE(lex.has_value());
    CHECK(*lex == doctest::Approx(2.0));

    const FirmSystem sharp = two_firm(0.5, 0.0, 0.0);
    const auto no_debt = external_leverage(sharp, state2(0.0, 0.0, 2.0, 2.0));
    REQUIRE(no_debt.has_value());
    CHECK(*no_debt == 0.0);

    CHECK_FALSE(external_leverage(none, state2(100.0, 100.0, 0.0, 0.0)).has_value());
}

TEST_CASE("leverage_report bundles every measure") {
    const FirmSystem bond = two_firm(0.0, 0.5, 100.0);
    const Scenario a(Eigen::Vector2d(100.0, 100.0));
    const Equilibrium eq = solve(bond, a);
    const LeverageReport report = leverage_report(bond, a, eq.state);
    CHECK(report.leverage == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(report.degree == doctest::Approx(report.leverage / (report.leverage + 1.0)));
    CHECK(report.max_degree == doctest::Approx(0.5));
    CHECK(report.max_leverage == doctest::Approx(1.0));
    CHECK(report.total_claims == doctest::Approx(300.0).epsilon(1e-9));
    CHECK(report.exogenous_total == doctest::Approx(200.0));
    REQUIRE(report.external_leverage.has_value());
    CHECK(*report.external_leverage == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("balance size identities at random equilibria") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 150; ++trial) {
        const auto draw = testgen::random_system(rng, 5, 3, 3, 0.9, true);
        const double exo = l1_norm(draw.system.exogenous_wealth(draw.scenario));
        if (exo <= 1e-9) continue;
        const Equilibrium eq = solve(draw.system, draw.scenario);
        const LeverageReport report = leverage_report(draw.system, draw.scenario, eq.state);
        CHECK(report.leverage >= 0.0);
        CHECK(report.leverage <= report.max_leverage + 1e-9);
        CHECK(report.degree <= report.max_degree + 1e-9);
        // |s|_1 + sum_i |r^i|_1 = (L + 1) |M^a a|_1 at equilibrium.
        CHECK(report.total_claims ==
              doctest::Approx((report.leverage + 1.0) * exo).epsilon(1e-8));
        CHECK(report.total_claims <= (report.max_leverage + 1.0) * exo + 1e-6);
        if (report.total_claims > 1e-9) {
            CHECK(report.degree ==
                  doctest::Approx(report.leverage / (report.leverage + 1.0)));
        }
    }
}

TEST_CASE("L grows strictly with I along L = I / (1 - I)") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> unit(0.0, 0.99);
    double prev_i = -1.0, prev_l = -1.0;
    std::vector<double> degrees;
    for (int trial = 0; trial < 100; ++trial) degrees.push_back(unit(rng));
    std::sort(degrees.begin(), degrees.end());
    for (const double i : degrees) {
        const double l = i / (1.0 - i);
        if (prev_i >= 0.0 && i > prev_i) CHECK(l > prev_l);
        prev_i = i;
        prev_l = l;
    }
}

TEST_CASE("the sharpness system attains the balance bound") {
    const FirmSystem sharp = two_firm(0.5, 0.0, 0.0);
    const Scenario a(Eigen::Vector2d(1.0, 1.0));
    SolverConfig config;
    config.tol = 1e-12;
    const Equilibrium eq = solve(sharp, a, config);
    const auto [i_max, l_max] = leverage_bounds(sharp);
    CHECK(eq.state.l1() == doctest::Approx((l_max + 1.0) * 2.0).epsilon(1e-10));
    const LeverageReport report = leverage_report(sharp, a, eq.state);
    CHECK(report.leverage == doctest::Approx(l_max).epsilon(1e-9));
}
