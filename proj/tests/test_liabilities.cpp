#include <doctest.h>

#include <random>

#include <xos/xos.hpp>

#include "generators.hpp"

using namespace xos;

namespace {

// Two firms, one seniority, no cross-holdings; enough scaffolding to call
// the grid evaluator.
FirmSystem simple_system(std::vector<std::vector<LiabilitySpec>> grid, Eigen::Index assets) {
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    const std::vector<OwnershipMatrix> debt(grid[0].size(), OwnershipMatrix::zero(n, n));
    return FirmSystem(OwnershipMatrix::zero(n, n), debt,
                      OwnershipMatrix(Eigen::MatrixXd::Identity(n, assets),
                                      MatrixKind::ColumnBounded),
                      std::move(grid));
}

} // namespace

TEST_CASE("constant liabilities ignore the state") {
    const LiabilitySpec spec = LiabilitySpec::constant(100.0);
    CHECK(spec.evaluate(Eigen::Vector2d(0.0, 0.0)) == 100.0);
    CHECK(spec.evaluate(Eigen::Vector2d(1e6, 3.0)) == 100.0);
}

TEST_CASE("at-the-money call has zero due") {
    const double strike = 7.5;
    const LiabilitySpec spec =
        LiabilitySpec::call(Eigen::Vector3d(0.0, 1.0, 0.0), strike, 3.0);
    CHECK(spec.evaluate(Eigen::Vector3d(1.0, strike, 9.0)) == 0.0);
}

TEST_CASE("put on a basket pays the shortfall times size") {
    // weights (0.5, 0, 1), strike k, basket one unit below the strike,
    // size 2 -> due 2.
    const double k2 = 12.0;
    const LiabilitySpec spec =
        LiabilitySpec::put(Eigen::Vector3d(0.5, 0.0, 1.0), k2, 2.0);
    // 0.5 a1 + a3 = k2 - 1 -> due = size * 1.
    const Eigen::Vector3d a(2.0, 99.0, k2 - 2.0);
    CHECK(spec.evaluate(a) == doctest::Approx(2.0));
    const Eigen::Vector3d at_money(2.0, 0.0, k2 - 1.0);
    CHECK(spec.evaluate(at_money) == 0.0);
}

TEST_CASE("evaluate_liabilities fills the seniority by firm grid") {
    std::vector<std::vector<LiabilitySpec>> grid;
    grid.push_back({LiabilitySpec::constant(100.0)});
    grid.push_back({LiabilitySpec::call(Eigen::Vector2d(1.0, 0.0), 2.0, 1.5)});
    const FirmSystem system = simple_system(std::move(grid), 2);
    const Scenario scenario(Eigen::Vector2d(6.0, 1.0));
    const Eigen::MatrixXd dues =
        evaluate_liabilities(system, StateVector::zero(2, 1), scenario);
    REQUIRE(dues.rows() == 1);
    REQUIRE(dues.cols() == 2);
    CHECK(dues(0, 0) == 100.0);
    CHECK(dues(0, 1) == doctest::Approx(1.5 * 4.0));
}

TEST_CASE("spec construction rejects bad parameters") {
    CHECK_THROWS_AS(LiabilitySpec::constant(-1.0), Error);
    CHECK_THROWS_AS(LiabilitySpec::call(Eigen::Vector2d(1.0, 0.0), 1.0, 0.0), Error);
    CHECK_THROWS_AS(LiabilitySpec::put(Eigen::Vector2d(1.0, 0.0), 1.0, -2.0), Error);
}

TEST_CASE("DSL systems classify contractive") {
    std::vector<std::vector<LiabilitySpec>> grid;
    grid.push_back({LiabilitySpec::constant(1.0)});
    grid.push_back({LiabilitySpec::put(Eigen::Vector2d(0.5, 1.0), 3.0, 2.0)});
    const FirmSystem bonds_and_options = simple_system(std::move(grid), 2);
    CHECK(classify_assumptions(bonds_and_options) == AssumptionClass::A2Contractive);

    std::vector<std::vector<LiabilitySpec>> zeros;
    zeros.push_back({LiabilitySpec()});
    zeros.push_back({LiabilitySpec()});
    CHECK(classify_assumptions(simple_system(std::move(zeros), 2)) ==
          AssumptionClass::A2Contractive);
}

TEST_CASE("a state-dependent hook classifies Unknown") {
    std::vector<std::vector<LiabilitySpec>> grid;
    grid.push_back({LiabilitySpec()});
    grid.push_back({LiabilitySpec()});
    const FirmSystem system = simple_system(std::move(grid), 2);
    const LiabilityEvaluator hook = [](const FirmSystem& sys, const StateVector& state,
                                       const Scenario&) {
        Eigen::MatrixXd dues(1, sys.firms());
        for (Eigen::Index k = 0; k < sys.firms(); ++k) {
            const double gap = state.r[0][sys.firms() - 1 - k] - 2.0;
            dues(0, k) = gap * gap;
        }
        return dues;
    };
    CHECK(classify_assumptions(system, hook) == AssumptionClass::Unknown);
    CHECK(classify_assumptions(system, {}) == AssumptionClass::A2Contractive);
}

TEST_CASE("waterfall worked examples") {
    const WaterfallResult full = waterfall(10.0, Eigen::Vector3d(3.0, 4.0, 5.0));
    CHECK(full.payments[0] == 3.0);
    CHECK(full.payments[1] == 4.0);
    CHECK(full.payments[2] == 3.0);
    CHECK(full.residual == 0.0);
    CHECK(full.payments.sum() + full.residual == doctest::Approx(10.0));

    const WaterfallResult debt_hole = waterfall(-5.0, Eigen::Vector2d(3.0, 4.0));
    CHECK(debt_hole.payments[0] == -5.0);
    CHECK(debt_hole.payments[1] == 0.0);
    CHECK(debt_hole.residual == 0.0);

    const WaterfallResult empty = waterfall(0.0, Eigen::Vector3d::Zero());
    CHECK(empty.payments.isZero(0.0));
    CHECK(empty.residual == 0.0);
}

TEST_CASE("waterfall conservation holds for any real wealth") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> wealth(-50.0, 50.0);
    std::uniform_real_distribution<double> due(0.0, 20.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 5);
        Eigen::VectorXd dues(m);
        for (Eigen::Index i = 0; i < m; ++i) dues[i] = due(rng);
        const double x = wealth(rng);
        const WaterfallResult out = waterfall(x, dues);
        CHECK(std::abs(out.payments.sum() + out.residual - x) <= 1e-12);
        CHECK(out.residual >= 0.0);
        for (Eigen::Index i = 0; i < m; ++i) CHECK(out.payments[i] <= dues[i]);
    }
}

TEST_CASE("per-firm split difference equals the wealth difference") {
    // With constant dues, the l1 distance of two waterfall outputs equals
    // the distance of the inputs exactly.
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> base(-20.0, 20.0);
    std::uniform_real_distribution<double> endo(-10.0, 10.0);
    std::uniform_real_distribution<double> due(0.0, 15.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 4);
        Eigen::VectorXd dues(m);
        for (Eigen::Index i = 0; i < m; ++i) dues[i] = due(rng);
        const double x = base(rng);
        const double y1 = endo(rng);
        const double y2 = endo(rng);
        const WaterfallResult one = waterfall(x + y1, dues);
        const WaterfallResult two = waterfall(x + y2, dues);
        const double split = (one.payments - two.payments).cwiseAbs().sum() +
                             std::abs(one.residual - two.residual);
        CHECK(std::abs(split - std::abs(y1 - y2)) <= 1e-12);
    }
}

TEST_CASE("call dues grow and put dues shrink with the assets") {
    const LiabilitySpec call = LiabilitySpec::call(Eigen::Vector2d(1.0, 0.5), 3.0, 2.0);
    const LiabilitySpec put = LiabilitySpec::put(Eigen::Vector2d(1.0, 0.5), 3.0, 2.0);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> px(0.0, 6.0);
    for (int trial = 0; trial < 300; ++trial) {
        Eigen::Vector2d lo(px(rng), px(rng));
        Eigen::Vector2d hi = lo + Eigen::Vector2d(px(rng), px(rng));
        CHECK(call.evaluate(hi) >= call.evaluate(lo));
        CHECK(put.evaluate(hi) <= put.evaluate(lo));
    }
}

TEST_CASE("evaluated dues are never negative") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> px(0.0, 8.0);
    for (int trial = 0; trial < 200; ++trial) {
        auto draw = testgen::random_system(rng, 4, 3, 3, 0.8, true);
        const Eigen::MatrixXd dues = evaluate_liabilities(
            draw.system, StateVector::zero(draw.system.firms(), draw.system.seniorities()),
            draw.scenario);
        CHECK(dues.minCoeff() >= 0.0);
        CHECK(dues.allFinite());
    }
}
