#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "xos/errors.hpp"

namespace xos {

// Default margin below 1 that a strictly substochastic column sum must keep.
inline constexpr double kStrictMargin = 1e-9;

// How an ownership matrix is allowed to distribute a claim across holders.
//
// StrictSubstochastic: every column sum must stay strictly below one, so some
// slice of each claim is always held outside the modelled firms.  Required
// for equity and liability cross-holdings.
//
// ColumnBounded: column sums may reach one exactly.  Used for exogenous asset
// holdings, where a single firm may own an asset outright.
enum class MatrixKind {
    StrictSubstochastic,
    ColumnBounded,
};

// Dense non-negative ownership matrix. Rows index holders, columns index the
// owned claim. The carrier itself does not enforce the column-sum invariant;
// validate_ownership reports violations and the solver entry points refuse
// to run on invalid systems.
struct OwnershipMatrix {
    Eigen::MatrixXd entries;
    MatrixKind kind = MatrixKind::StrictSubstochastic;

    OwnershipMatrix() = default;
    OwnershipMatrix(Eigen::MatrixXd entries, MatrixKind kind)
        : entries(std::move(entries)), kind(kind) {}

    Eigen::Index rows() const { return entries.rows(); }
    Eigen::Index cols() const { return entries.cols(); }

    static OwnershipMatrix zero(Eigen::Index rows, Eigen::Index cols,
                                MatrixKind kind = MatrixKind::StrictSubstochastic) {
        return OwnershipMatrix(Eigen::MatrixXd::Zero(rows, cols), kind);
    }
};

struct ColumnViolation {
    std::size_t column = 0;
    double column_sum = 0.0;
    std::string reason;
};

// Outcome of validating one ownership matrix. Never thrown; solver entry
// points convert a failed report into InvalidSystem.
struct ValidationReport {
    bool valid = true;
    std::vector<ColumnViolation> violations;

    std::string describe() const;
};

// Checks entry bounds and column sums of `m` against its kind.
// StrictSubstochastic demands column sums <= 1 - margin; ColumnBounded
// demands column sums <= 1 + margin slack for rounding. Entries must be
// finite, non-negative and at most one.
ValidationReport validate_ownership(const OwnershipMatrix& m, double margin = kStrictMargin);

// l1 norm of a vector: sum of absolute component values.
double l1_norm(const Eigen::VectorXd& v);

// Operator l1 norm of a matrix: maximum absolute column sum.
double matrix_l1_norm(const Eigen::MatrixXd& m);

// Inverse of (I - M) for a strictly substochastic M, computed by a direct
// LU solve. The result is entrywise non-negative with diagonal entries at
// least one. Throws NotStrictlySubstochastic when M fails validation.
Eigen::MatrixXd neumann_inverse(const OwnershipMatrix& m, double margin = kStrictMargin);

} // namespace xos
