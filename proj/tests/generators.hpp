#pragma once

// Random model inputs shared by the property suites and the acceptance gate.

#include <random>
#include <vector>

#include <xos/xos.hpp>

namespace xos::testgen {

// Non-negative matrix whose column sums are uniform in [0, cap].
inline Eigen::MatrixXd substochastic(std::mt19937_64& rng, Eigen::Index rows,
                                     Eigen::Index cols, double cap) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < rows; ++i) {
            m(i, j) = unit(rng);
            total += m(i, j);
        }
        const double target = cap * unit(rng);
        if (total > 0.0) m.col(j) *= target / total;
    }
    return m;
}

struct SystemDraw {
    FirmSystem system;
    Scenario scenario;
};

// Random DSL system: constant liabilities, optional option terms, column
// sums at most col_cap so the contraction modulus stays away from one.
inline SystemDraw random_system(std::mt19937_64& rng, Eigen::Index max_n, std::size_t max_m,
                                Eigen::Index max_q, double col_cap, bool with_options = false) {
    std::uniform_int_distribution<Eigen::Index> n_draw(1, max_n);
    std::uniform_int_distribution<std::size_t> m_draw(1, max_m);
    std::uniform_int_distribution<Eigen::Index> q_draw(1, max_q);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Eigen::Index n = n_draw(rng);
    const std::size_t m = m_draw(rng);
    const Eigen::Index q = q_draw(rng);

    OwnershipMatrix equity(substochastic(rng, n, n, col_cap),
                           MatrixKind::StrictSubstochastic);
    std::vector<OwnershipMatrix> debt;
    for (std::size_t i = 0; i < m; ++i) {
        debt.emplace_back(substochastic(rng, n, n, col_cap),
                          MatrixKind::StrictSubstochastic);
    }
    OwnershipMatrix assets(substochastic(rng, n, q, 1.0), MatrixKind::ColumnBounded);

    std::vector<std::vector<LiabilitySpec>> grid;
    for (Eigen::Index k = 0; k < n; ++k) {
        std::vector<LiabilitySpec> row;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<PayoffTerm> terms;
            terms.push_back(ConstantTerm{5.0 * unit(rng)});
            if (with_options && unit(rng) < 0.3) {
                Eigen::VectorXd weights(q);
                for (Eigen::Index j = 0; j < q; ++j) weights[j] = unit(rng);
                if (unit(rng) < 0.5) {
                    terms.push_back(CallTerm{weights, 2.0 * unit(rng), 0.5 + unit(rng)});
                } else {
                    terms.push_back(PutTerm{weights, 2.0 * unit(rng), 0.5 + unit(rng)});
                }
            }
            row.emplace_back(std::move(terms));
        }
        grid.push_back(std::move(row));
    }

    Eigen::VectorXd a(q);
    for (Eigen::Index j = 0; j < q; ++j) a[j] = 5.0 * unit(rng);
    return SystemDraw{FirmSystem(std::move(equity), std::move(debt), std::move(assets),
                                 std::move(grid)),
                      Scenario(a)};
}

// State with components uniform in [lo, hi].
inline StateVector random_state(std::mt19937_64& rng, Eigen::Index firms,
                                std::size_t seniorities, double lo, double hi) {
    std::uniform_real_distribution<double> comp(lo, hi);
    StateVector state = StateVector::zero(firms, seniorities);
    for (auto& ri : state.r) {
        for (Eigen::Index k = 0; k < firms; ++k) ri[k] = comp(rng);
    }
    for (Eigen::Index k = 0; k < firms; ++k) state.s[k] = comp(rng);
    return state;
}

} // namespace xos::testgen
