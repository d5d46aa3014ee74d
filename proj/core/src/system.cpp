#include "xos/system.hpp"

#include <cmath>
#include <sstream>

namespace xos {

Scenario::Scenario(Eigen::VectorXd a) : assets(std::move(a)) {
    for (Eigen::Index i = 0; i < assets.size(); ++i) {
        if (!(assets[i] >= 0.0) || !std::isfinite(assets[i])) {
            throw Error("scenario: asset values must be finite and non-negative");
        }
    }
}

StateVector StateVector::zero(Eigen::Index firms, std::size_t seniorities) {
    StateVector x;
    x.r.assign(seniorities, Eigen::VectorXd::Zero(firms));
    x.s = Eigen::VectorXd::Zero(firms);
    return x;
}

double StateVector::l1() const {
    double total = l1_norm(s);
    for (const auto& ri : r) total += l1_norm(ri);
    return total;
}

Eigen::VectorXd StateVector::flatten() const {
    const Eigen::Index n = firms();
    Eigen::VectorXd x(n * static_cast<Eigen::Index>(seniorities() + 1));
    Eigen::Index at = 0;
    for (const auto& ri : r) {
        x.segment(at, n) = ri;
        at += n;
    }
    x.segment(at, n) = s;
    return x;
}

StateVector StateVector::unflatten(const Eigen::VectorXd& x, Eigen::Index firms,
                                   std::size_t seniorities) {
    if (x.size() != firms * static_cast<Eigen::Index>(seniorities + 1)) {
        throw DimensionMismatch("unflatten: flat state has the wrong length");
    }
    StateVector out;
    out.r.reserve(seniorities);
    Eigen::Index at = 0;
    for (std::size_t i = 0; i < seniorities; ++i) {
        out.r.push_back(x.segment(at, firms));
        at += firms;
    }
    out.s = x.segment(at, firms);
    return out;
}

double l1_distance(const StateVector& a, const StateVector& b) {
    if (a.seniorities() != b.seniorities() || a.firms() != b.firms()) {
        throw DimensionMismatch("l1_distance: states do not conform");
    }
    double total = (a.s - b.s).cwiseAbs().sum();
    for (std::size_t i = 0; i < a.r.size(); ++i) {
        total += (a.r[i] - b.r[i]).cwiseAbs().sum();
    }
    return total;
}

FirmSystem::FirmSystem(OwnershipMatrix equity_ownership,
                       std::vector<OwnershipMatrix> liability_ownership,
                       OwnershipMatrix asset_ownership,
                       std::vector<std::vector<LiabilitySpec>> liabilities)
    : equity_ownership_(std::move(equity_ownership)),
      liability_ownership_(std::move(liability_ownership)),
      asset_ownership_(std::move(asset_ownership)),
      liabilities_(std::move(liabilities)) {
    n_ = equity_ownership_.rows();
    m_ = liability_ownership_.size();
    q_ = asset_ownership_.cols();
    if (n_ < 1) throw DimensionMismatch("firm system: needs at least one firm");
    if (m_ < 1) throw DimensionMismatch("firm system: needs at least one seniority level");
    if (q_ < 1) throw DimensionMismatch("firm system: needs at least one exogenous asset");
    if (equity_ownership_.cols() != n_) {
        throw DimensionMismatch("firm system: equity ownership must be n x n");
    }
    for (const auto& d : liability_ownership_) {
        if (d.rows() != n_ || d.cols() != n_) {
            throw DimensionMismatch("firm system: liability ownership must be n x n");
        }
    }
    if (asset_ownership_.rows() != n_) {
        throw DimensionMismatch("firm system: asset ownership must have one row per firm");
    }
    if (liabilities_.size() != static_cast<std::size_t>(n_)) {
        throw DimensionMismatch("firm system: liability grid must have one row per firm");
    }
    for (const auto& row : liabilities_) {
        if (row.size() != m_) {
            throw DimensionMismatch(
                "firm system: liability grid must have one cell per seniority");
        }
    }
}

ValidationReport FirmSystem::validate(double margin) const {
    ValidationReport combined;
    const auto merge = [&combined](const ValidationReport& part, const std::string& label) {
        for (auto v : part.violations) {
            v.reason = label + ": " + v.reason;
            combined.violations.push_back(std::move(v));
        }
    };
    merge(validate_ownership(equity_ownership_, margin), "equity ownership");
    for (std::size_t i = 0; i < liability_ownership_.size(); ++i) {
        std::ostringstream label;
        label << "liability ownership " << (i + 1);
        merge(validate_ownership(liability_ownership_[i], margin), label.str());
    }
    merge(validate_ownership(asset_ownership_, margin), "asset ownership");
    combined.valid = combined.violations.empty();
    return combined;
}

Eigen::VectorXd FirmSystem::exogenous_wealth(const Scenario& scenario) const {
    if (scenario.size() != q_) {
        throw DimensionMismatch("scenario: expected one value per exogenous asset");
    }
    return asset_ownership_.entries * scenario.assets;
}

void FirmSystem::check_state(const StateVector& state) const {
    if (state.firms() != n_ || state.seniorities() != m_) {
        throw DimensionMismatch("state: does not conform to the firm system");
    }
    for (const auto& ri : state.r) {
        if (ri.size() != n_) {
            throw DimensionMismatch("state: recovery block does not conform");
        }
    }
}

} // namespace xos
