#pragma once

#include <cstdint>
#include <vector>

#include "xos/liabilities.hpp"
#include "xos/system.hpp"

namespace xos {

// Fixed default seed so batch runs are reproducible without configuration.
inline constexpr std::uint64_t kDefaultSeed = 424242;

struct SolverConfig {
    double tol = 1e-10;
    std::size_t max_iter = 1000000;
    std::size_t starts = 16;
    std::uint64_t seed = kDefaultSeed;
    double dedup_threshold = 1e-6;
};

// Result of one fixed point computation. balance_residual holds the
// componentwise defect of the accounting identity s + sum_i r^i = wealth;
// it vanishes at an exact fixed point whether or not firms default.
struct Equilibrium {
    StateVector state;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
    Eigen::VectorXd balance_residual;
    // True when the system validated strictly substochastic and the
    // liabilities classify contractive, so the fixed point is the unique
    // equilibrium.
    bool uniqueness_guaranteed = false;
    // Iteration count sufficient for convergence predicted from the
    // contraction modulus and the first step; NaN when no contraction bound
    // applies, 0 when the first step already lands on the fixed point.
    double apriori_iteration_bound = 0.0;
};

// Largest l1 operator norm among the endogenous ownership matrices (equity
// and every liability level). This is the contraction modulus of the price
// map when dues do not react to prices, and the degree bound I_max in the
// leverage metrics.
double contraction_rate(const FirmSystem& system);

// One application of the price map: wealth w = M^a a + M^s s + sum_i M^d_i
// r^i is allocated through each firm's seniority waterfall; level payments
// become the new recoveries, the residual the new equity value.
StateVector apply_phi(const FirmSystem& system, const Scenario& scenario,
                      const StateVector& state);

// As above with dues supplied by `hook` instead of the liability DSL.
StateVector apply_phi(const FirmSystem& system, const Scenario& scenario,
                      const StateVector& state, const LiabilityEvaluator& hook);

// Picard iteration from the zero state until the l1 step falls to
// config.tol. Throws InvalidSystem when ownership validation fails and
// NoConvergence when max_iter is exhausted. Bit-identical across runs for
// identical inputs.
Equilibrium solve(const FirmSystem& system, const Scenario& scenario,
                  const SolverConfig& config = {});
Equilibrium solve(const FirmSystem& system, const Scenario& scenario, const SolverConfig& config,
                  const LiabilityEvaluator& hook);

// Heuristic sweep for multiple equilibria. Runs Picard from config.starts
// points sampled uniformly from the box
// [0, (L_max + 1) |M^a a|_1]^(n(m+1)) that contains every equilibrium,
// then sweeps default patterns (which firm defaults at which seniority
// level), solving each pattern's smooth subsystem directly: linearly for
// DSL dues, by damped Newton for hook dues. Pattern enumeration makes
// repelling fixed points reachable; plain Picard can only ever land on
// attracting ones. Candidates are verified against the true map,
// deduplicated by l1 distance below config.dedup_threshold, and returned
// sorted by l1 norm then lexicographically. An empty result with no
// converged start signals possible non-existence. Deterministic for a
// fixed seed. Pattern sweeps are skipped for systems with more than 2^16
// patterns.
std::vector<Equilibrium> scan_equilibria(const FirmSystem& system, const Scenario& scenario,
                                         const SolverConfig& config = {},
                                         const LiabilityEvaluator& hook = {});

// Componentwise accounting defect (s + sum_i r^i) - w of `state`, where w
// is the wealth M^a a + M^s s + sum_i M^d_i r^i. Dues do not enter the
// identity, so it applies to hook-evaluated systems unchanged; it vanishes
// at every exact fixed point.
Eigen::VectorXd balance_check(const FirmSystem& system, const Scenario& scenario,
                              const StateVector& state);

} // namespace xos
