#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "xos/errors.hpp"
#include "xos/liabilities.hpp"
#include "xos/ownership.hpp"

namespace xos {

// Realisation of the exogenous asset values, one non-negative entry per
// asset.
struct Scenario {
    Eigen::VectorXd assets;

    Scenario() = default;
    explicit Scenario(Eigen::VectorXd a);

    Eigen::Index size() const { return assets.size(); }
};

// Endogenous prices of one firm system: r[i] holds the recovery values of
// the seniority-(i+1) liabilities of every firm, s the equity values.
// Seniority 1 is the most senior claim.
struct StateVector {
    std::vector<Eigen::VectorXd> r;
    Eigen::VectorXd s;

    StateVector() = default;
    StateVector(std::vector<Eigen::VectorXd> r, Eigen::VectorXd s)
        : r(std::move(r)), s(std::move(s)) {}

    static StateVector zero(Eigen::Index firms, std::size_t seniorities);

    std::size_t seniorities() const { return r.size(); }
    Eigen::Index firms() const { return s.size(); }

    double l1() const;

    // Flat layout used by scan sampling and file output: r[0], ..., r[m-1]
    // then s, each block in firm order.
    Eigen::VectorXd flatten() const;
    static StateVector unflatten(const Eigen::VectorXd& x, Eigen::Index firms,
                                 std::size_t seniorities);
};

// l1 distance between two conforming states.
double l1_distance(const StateVector& a, const StateVector& b);

// A closed system of firms connected by cross-ownership: n firms, m
// seniority levels, q exogenous assets.
//
//   equity_ownership      n x n, strictly substochastic. Entry (k, j) is the
//                         fraction of firm j's equity held by firm k.
//   liability_ownership   m matrices, n x n each, strictly substochastic.
//                         Matrix i distributes the seniority-(i+1)
//                         recoveries across holder firms.
//   asset_ownership       n x q, column bounded. Entry (k, j) is the
//                         fraction of exogenous asset j held by firm k.
//   liabilities           per-firm, per-seniority payoff specs; grid(k, i)
//                         is the seniority-(i+1) liability issued by firm k.
//
// Construction checks dimensions only. Column-sum validation is reported by
// validate() and enforced at the solver entry points, so an invalid system
// can be built, inspected and rejected with a full report.
class FirmSystem {
public:
    FirmSystem(OwnershipMatrix equity_ownership, std::vector<OwnershipMatrix> liability_ownership,
               OwnershipMatrix asset_ownership,
               std::vector<std::vector<LiabilitySpec>> liabilities);

    Eigen::Index firms() const { return n_; }
    std::size_t seniorities() const { return m_; }
    Eigen::Index assets() const { return q_; }

    const OwnershipMatrix& equity_ownership() const { return equity_ownership_; }
    const OwnershipMatrix& liability_ownership(std::size_t i) const {
        return liability_ownership_.at(i);
    }
    const std::vector<OwnershipMatrix>& liability_ownerships() const {
        return liability_ownership_;
    }
    const OwnershipMatrix& asset_ownership() const { return asset_ownership_; }
    const LiabilitySpec& liability(Eigen::Index firm, std::size_t seniority) const {
        return liabilities_.at(static_cast<std::size_t>(firm)).at(seniority);
    }

    // Validates every ownership matrix; the report concatenates the
    // per-matrix column violations with a matrix label.
    ValidationReport validate(double margin = kStrictMargin) const;

    // Exogenous wealth M^a a of each firm. Throws DimensionMismatch when the
    // scenario has the wrong asset count.
    Eigen::VectorXd exogenous_wealth(const Scenario& scenario) const;

    void check_state(const StateVector& state) const;

private:
    Eigen::Index n_ = 0;
    std::size_t m_ = 0;
    Eigen::Index q_ = 0;
    OwnershipMatrix equity_ownership_;
    std::vector<OwnershipMatrix> liability_ownership_;
    OwnershipMatrix asset_ownership_;
    std::vector<std::vector<LiabilitySpec>> liabilities_;
};

} // namespace xos
