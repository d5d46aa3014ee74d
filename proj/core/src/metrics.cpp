#include "xos/metrics.hpp"

#include <limits>

#include "xos/equilibrium.hpp"

namespace xos {

namespace {

double internally_held(const FirmSystem& system, const StateVector& state) {
    double held = l1_norm(system.equity_ownership().entries * state.s);
    for (std::size_t i = 0; i < system.seniorities(); ++i) {
        held += l1_norm(system.liability_ownership(i).entries * state.r[i]);
    }
    return held;
}

double total_claims(const StateVector& state) {
    double total = l1_norm(state.s);
    for (const auto& ri : state.r) total += l1_norm(ri);
    return total;
}

} // namespace

double internal_leverage(const FirmSystem& system, const Scenario& scenario,
                         const StateVector& state) {
    system.check_state(state);
    const double exo = l1_norm(system.exogenous_wealth(scenario));
    if (exo == 0.0) {
        throw ZeroExogenousBase("internal_leverage: no exogenous assets back the system");
    }
    return internally_held(system, state) / exo;
}

double cross_ownership_degree(const FirmSystem& system, const Scenario& scenario,
                              const StateVector& state) {
    system.check_state(state);
    (void)system.exogenous_wealth(scenario);
    const double total = total_claims(state);
    if (total == 0.0) {
        throw ZeroClaims("cross_ownership_degree: total claim value is zero");
    }
    return internally_held(system, state) / total;
}

std::pair<double, double> leverage_bounds(const FirmSystem& system) {
    const double i_max = contraction_rate(system);
    const double l_max = i_max < 1.0 ? i_max / (1.0 - i_max)
                                     : std::numeric_limits<double>::infinity();
    return {i_max, l_max};
}

std::optional<double> external_leverage(const FirmSystem& system, const StateVector& state) {
    system.check_state(state);
    double debt_external = 0.0;
    for (std::size_t i = 0; i < system.seniorities(); ++i) {
        debt_external += l1_norm(state.r[i]) -
                         l1_norm(system.liability_ownership(i).entries * state.r[i]);
    }
    const double equity_external =
        l1_norm(state.s) - l1_norm(system.equity_ownership().entries * state.s);
    if (equity_external == 0.0) return std::nullopt;
    return debt_external / equity_external;
}

LeverageReport leverage_report(const FirmSystem& system, const Scenario& scenario,
                               const StateVector& state) {
    LeverageReport report;
    report.leverage = internal_leverage(system, scenario, state);
    report.degree = cross_ownership_degree(system, scenario, state);
    report.external_leverage = external_leverage(system, state);
    const auto [i_max, l_max] = leverage_bounds(system);
    report.max_degree = i_max;
    report.max_leverage = l_max;
    report.total_claims = total_claims(state);
    report.exogenous_total = l1_norm(system.exogenous_wealth(scenario));
    return report;
}

} // namespace xos
