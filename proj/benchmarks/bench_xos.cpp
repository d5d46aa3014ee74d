#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include <xos/xos.hpp>

namespace {

using namespace xos;

// Ring of n firms: each holds 30% of the next firm's equity and 40% of its
// debt, everything else exogenous. Contraction modulus 0.4.
FirmSystem ring_system(Eigen::Index n, std::size_t m) {
    Eigen::MatrixXd ms = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd md = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        ms((k + 1) % n, k) = 0.3;
        md((k + 1) % n, k) = 0.4;
    }
    std::vector<OwnershipMatrix> debt(m, OwnershipMatrix(md, MatrixKind::StrictSubstochastic));
    std::vector<std::vector<LiabilitySpec>> grid(
        static_cast<std::size_t>(n), std::vector<LiabilitySpec>(m, LiabilitySpec::constant(5.0)));
    return FirmSystem(OwnershipMatrix(ms, MatrixKind::StrictSubstochastic), std::move(debt),
                      OwnershipMatrix(Eigen::MatrixXd::Identity(n, n), MatrixKind::ColumnBounded),
                      std::move(grid));
}

void BM_waterfall(benchmark::State& state) {
    const Eigen::Index m = state.range(0);
    Eigen::VectorXd dues(m);
    for (Eigen::Index i = 0; i < m; ++i) dues[i] = 1.0 + double(i);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> wealth(-5.0, 30.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(waterfall(wealth(rng), dues));
    }
}
BENCHMARK(BM_waterfall)->Arg(1)->Arg(4)->Arg(16);

void BM_apply_phi(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    const FirmSystem system = ring_system(n, 2);
    const Scenario scenario(Eigen::VectorXd::Constant(n, 10.0));
    StateVector x = StateVector::zero(n, 2);
    for (auto _ : state) {
        x = apply_phi(system, scenario, x);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_apply_phi)->Arg(2)->Arg(8)->Arg(32)->Arg(128);

void BM_solve(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    const FirmSystem system = ring_system(n, 2);
    const Scenario scenario(Eigen::VectorXd::Constant(n, 10.0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve(system, scenario));
    }
}
BENCHMARK(BM_solve)->Arg(2)->Arg(8)->Arg(32)->Arg(128);

void BM_price(benchmark::State& state) {
    const Eigen::Index n = 4;
    const FirmSystem system = ring_system(n, 1);
    MarketModel model;
    model.spot = Eigen::VectorXd::Constant(n, 10.0);
    model.vols = Eigen::VectorXd::Constant(n, 0.25);
    model.correlation =
        Eigen::MatrixXd::Identity(n, n) + 0.3 * (Eigen::MatrixXd::Ones(n, n) -
                                                 Eigen::MatrixXd::Identity(n, n));
    model.rate = 0.03;
    model.maturity = 1.0;
    PricingConfig config;
    config.paths = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(price(system, model, config));
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_price)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
