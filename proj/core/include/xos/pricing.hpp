#pragma once

#include <cstdint>

#include "xos/equilibrium.hpp"
#include "xos/system.hpp"

namespace xos {

// Risk-neutral market for the exogenous assets: correlated geometric
// Brownian motions under the money market numeraire e^{rate t}. Prices are
// discounted expectations of the equilibrium claim values at maturity.
struct MarketModel {
    Eigen::VectorXd spot;        // per asset, non-negative
    Eigen::VectorXd vols;        // per asset, non-negative
    Eigen::MatrixXd correlation; // symmetric, unit diagonal, PSD
    double rate = 0.0;
    double maturity = 1.0;       // year fraction, positive
};

// How the report's leverage expectations are formed: Expectation averages
// the per-path ratio, PriceSubstitution substitutes the priced component
// means into the ratio (equivalently, a path-wealth weighted average).
enum class MetricMode {
    Expectation,
    PriceSubstitution,
};

struct PricingConfig {
    std::size_t paths = 100000;
    std::uint64_t seed = kDefaultSeed;
    SolverConfig solver;
    // 0 picks a hardware-based worker count. Path draws are keyed by path
    // index and accumulation always runs in path order, so results are
    // byte-identical for any worker count.
    unsigned workers = 0;
    // Forces single-threaded evaluation on top of the fixed-order
    // accumulation.
    bool reproducible = false;
    MetricMode metric_mode = MetricMode::Expectation;
};

struct PriceReport {
    StateVector means;      // discounted component prices
    StateVector std_errors; // Monte Carlo standard errors of the means
    std::size_t paths = 0;
    std::uint64_t seed = 0;
    double expected_L = 0.0;
    double expected_I = 0.0;
    MetricMode metric_mode = MetricMode::Expectation;
};

// Checks model shape and factorizes the correlation matrix. A matrix whose
// smallest eigenvalue is no worse than -1e-10 is repaired with a 1e-10
// diagonal jitter; anything worse throws NonPSDCorrelation. Returns the
// Cholesky factor used to correlate draws.
Eigen::MatrixXd correlation_factor(const MarketModel& model);

// Terminal asset values, one column per path. Draw p depends only on
// (seed, p), never on evaluation order.
Eigen::MatrixXd simulate_terminal(const MarketModel& model, std::size_t paths,
                                  std::uint64_t seed);

// Monte Carlo prices of every claim in the system at time zero. Each path
// solves the equilibrium at the simulated terminal assets; discounted
// component means and standard errors come back per claim. Throws
// NonContractiveSystem unless the liabilities classify contractive,
// InvalidSystem on validation failure, and NoConvergence naming the failing
// path if any path solve exhausts its budget.
PriceReport price(const FirmSystem& system, const MarketModel& model,
                  const PricingConfig& config = {});

} // namespace xos
