#pragma once

#include <optional>
#include <utility>

#include "xos/system.hpp"

namespace xos {

// Leverage and cross-ownership measures evaluated at one price state.
struct LeverageReport {
    double leverage = 0.0;                    // L: internally held over exogenous
    double degree = 0.0;                      // I: internally held over total claims
    std::optional<double> external_leverage;  // L_ex, empty when undefined
    double max_degree = 0.0;                  // I_max from the ownership matrices alone
    double max_leverage = 0.0;                // L_max = I_max / (1 - I_max)
    double total_claims = 0.0;                // |s|_1 + sum_i |r^i|_1
    double exogenous_total = 0.0;             // |M^a a|_1
};

// Internal leverage L: value of claims held inside the system relative to
// the exogenous base M^a a. Throws ZeroExogenousBase when the base is zero.
double internal_leverage(const FirmSystem& system, const Scenario& scenario,
                         const StateVector& state);

// Cross-ownership degree I: internally held value over total claim value.
// Equals L / (L + 1) at any balanced state. Throws ZeroClaims when no
// claims have value.
double cross_ownership_degree(const FirmSystem& system, const Scenario& scenario,
                              const StateVector& state);

// State-free bounds (I_max, L_max) from the ownership matrices. I_max is
// the largest l1 column norm among the endogenous matrices; L_max is
// I_max / (1 - I_max), reported as +infinity when I_max reaches one.
std::pair<double, double> leverage_bounds(const FirmSystem& system);

// External leverage L_ex: debt held outside the system relative to equity
// held outside the system. Undefined (empty) when the external equity slice
// is zero.
std::optional<double> external_leverage(const FirmSystem& system, const StateVector& state);

// All measures above in one pass; what cmd_metrics prints.
LeverageReport leverage_report(const FirmSystem& system, const Scenario& scenario,
                               const StateVector& state);

} // namespace xos
