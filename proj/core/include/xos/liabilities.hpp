#pragma once

#include <Eigen/Dense>
#include <functional>
#include <variant>
#include <vector>

#include "xos/errors.hpp"

namespace xos {

class FirmSystem;
struct Scenario;
struct StateVector;

// Fixed nominal due, independent of everything.
struct ConstantTerm {
    double nominal = 0.0;
};

// size * (weights . a - strike)^+ on the exogenous asset vector a.
struct CallTerm {
    Eigen::VectorXd weights;
    double strike = 0.0;
    double size = 1.0;
};

// size * (weights . a - strike)^- on the exogenous asset vector a.
struct PutTerm {
    Eigen::VectorXd weights;
    double strike = 0.0;
    double size = 1.0;
};

using PayoffTerm = std::variant<ConstantTerm, CallTerm, PutTerm>;

// One liability cell: a sum of payoff terms, all depending on the exogenous
// assets only. An empty term list is the zero liability. Construction
// rejects negative nominals, non-positive option sizes and non-finite
// parameters, so an evaluated due is always non-negative.
class LiabilitySpec {
public:
    LiabilitySpec() = default;
    explicit LiabilitySpec(std::vector<PayoffTerm> terms);

    static LiabilitySpec constant(double nominal);
    static LiabilitySpec call(Eigen::VectorXd weights, double strike, double size);
    static LiabilitySpec put(Eigen::VectorXd weights, double strike, double size);

    const std::vector<PayoffTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Due amount under asset realisation `assets`. Throws DimensionMismatch
    // when an option weight vector disagrees with the asset count.
    double evaluate(const Eigen::VectorXd& assets) const;

private:
    std::vector<PayoffTerm> terms_;
};

// Which hypotheses of the equilibrium theory a system satisfies.
//
// A2Contractive implies A1Continuous: dues that never react to prices make
// the price map a strict l1 contraction whenever the ownership matrices are
// strictly substochastic, so existence and uniqueness are guaranteed.
// Unknown means no guarantee is claimed; the solver still runs.
enum class AssumptionClass {
    A1Continuous,
    A2Contractive,
    Unknown,
};

// Callback that replaces DSL evaluation for liabilities depending on the
// endogenous state (recoveries or equity). Must return an m x n matrix of
// non-negative dues: row i holds the seniority-i dues of every firm.
using LiabilityEvaluator =
    std::function<Eigen::MatrixXd(const FirmSystem&, const StateVector&, const Scenario&)>;

// Evaluates the full liability grid of `system` under `scenario`. The state
// argument is unused by the v1 DSL but keeps the signature aligned with the
// general map; hook-based evaluation goes through LiabilityEvaluator.
// Returns an m x n matrix (seniority by firm).
Eigen::MatrixXd evaluate_liabilities(const FirmSystem& system, const StateVector& state,
                                     const Scenario& scenario);

// v1 DSL terms depend on exogenous assets only, so a pure-DSL system is
// always A2Contractive.
AssumptionClass classify_assumptions(const FirmSystem& system);

// With a hook in play the dues may react to the endogenous state, and no
// contraction property can be claimed.
AssumptionClass classify_assumptions(const FirmSystem& system, const LiabilityEvaluator& hook);

struct WaterfallResult {
    Eigen::VectorXd payments;
    double residual = 0.0;
};

// Allocates `wealth` over the dues in seniority order. payments[0] is
// min(dues[0], wealth) with no floor, deeper levels receive
// min(dues[j], max(wealth - dues paid above, 0)) and the equity residual is
// max(wealth - total dues, 0). payments.sum() + residual == wealth holds
// for every real wealth, including negative ones. Dues must be
// non-negative.
WaterfallResult waterfall(double wealth, const Eigen::VectorXd& dues);

} // namespace xos
