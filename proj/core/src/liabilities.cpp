#include "xos/liabilities.hpp"

#include <algorithm>
#include <cmath>

#include "xos/system.hpp"

namespace xos {

namespace {

void check_term(const PayoffTerm& term) {
    if (const auto* c = std::get_if<ConstantTerm>(&term)) {
        if (!std::isfinite(c->nominal) || c->nominal < 0.0) {
            throw Error("liability term: nominal must be finite and non-negative");
        }
        return;
    }
    const auto check_option = [](const Eigen::VectorXd& weights, double strike, double size) {
        if (!std::isfinite(strike)) throw Error("liability term: strike must be finite");
        if (!std::isfinite(size) || size <= 0.0) {
            throw Error("liability term: size must be finite and positive");
        }
        if (!weights.allFinite()) throw Error("liability term: weights must be finite");
    };
    if (const auto* c = std::get_if<CallTerm>(&term)) {
        check_option(c->weights, c->strike, c->size);
    } else {
        const auto& p = std::get<PutTerm>(term);
        check_option(p.weights, p.strike, p.size);
    }
}

double basket(const Eigen::VectorXd& weights, const Eigen::VectorXd& assets) {
    if (weights.size() != assets.size()) {
        throw DimensionMismatch("liability term: weight vector does not match asset count");
    }
    return weights.dot(assets);
}

} // namespace

LiabilitySpec::LiabilitySpec(std::vector<PayoffTerm> terms) : terms_(std::move(terms)) {
    for (const auto& term : terms_) check_term(term);
}

LiabilitySpec LiabilitySpec::constant(double nominal) {
    return LiabilitySpec({PayoffTerm(ConstantTerm{nominal})});
}

LiabilitySpec LiabilitySpec::call(Eigen::VectorXd weights, double strike, double size) {
    return LiabilitySpec({PayoffTerm(CallTerm{std::move(weights), strike, size})});
}

LiabilitySpec LiabilitySpec::put(Eigen::VectorXd weights, double strike, double size) {
    return LiabilitySpec({PayoffTerm(PutTerm{std::move(weights), strike, size})});
}

double LiabilitySpec::evaluate(const Eigen::VectorXd& assets) const {
    double due = 0.0;
    for (const auto& term : terms_) {
        if (const auto* c = std::get_if<ConstantTerm>(&term)) {
            due += c->nominal;
        } else if (const auto* call = std::get_if<CallTerm>(&term)) {
            due += call->size * std::max(basket(call->weights, assets) - call->strike, 0.0);
        } else {
            const auto& put = std::get<PutTerm>(term);
            due += put.size * std::max(put.strike - basket(put.weights, assets), 0.0);
        }
    }
    return due;
}

Eigen::MatrixXd evaluate_liabilities(const FirmSystem& system, const StateVector& state,
                                     const Scenario& scenario) {
    if (scenario.size() != system.assets()) {
        throw DimensionMismatch("evaluate_liabilities: scenario asset count mismatch");
    }
    system.check_state(state);
    const Eigen::Index n = system.firms();
    const auto m = system.seniorities();
    Eigen::MatrixXd dues(static_cast<Eigen::Index>(m), n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < m; ++i) {
            dues(static_cast<Eigen::Index>(i), k) =
                system.liability(k, i).evaluate(scenario.assets);
        }
    }
    return dues;
}

AssumptionClass classify_assumptions(const FirmSystem&) {
    return AssumptionClass::A2Contractive;
}

AssumptionClass classify_assumptions(const FirmSystem& system, const LiabilityEvaluator& hook) {
    if (hook) return AssumptionClass::Unknown;
    return classify_assumptions(system);
}

WaterfallResult waterfall(double wealth, const Eigen::VectorXd& dues) {
    for (Eigen::Index i = 0; i < dues.size(); ++i) {
        if (!(dues[i] >= 0.0)) throw Error("waterfall: dues must be non-negative");
    }
    WaterfallResult out;
    out.payments.resize(dues.size());
    // Telescoped form of the seniority rule: carrying the unpaid capacity
    // down the stack is algebraically identical to the textbook
    // min(due, (wealth - senior dues)^+) and keeps the conservation
    // identity payments.sum() + residual == wealth tight in floating point.
    // The top level is deliberately unfloored so the identity extends to
    // negative wealth.
    double capacity = wealth;
    for (Eigen::Index i = 0; i < dues.size(); ++i) {
        const double paid = i == 0 ? std::min(dues[i], capacity)
                                   : std::min(dues[i], std::max(capacity, 0.0));
        out.payments[i] = paid;
        capacity -= paid;
    }
    out.residual = std::max(capacity, 0.0);
    return out;
}

} // namespace xos
