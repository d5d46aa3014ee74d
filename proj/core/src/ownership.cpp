#include "xos/ownership.hpp"

#include <cmath>
#include <sstream>

namespace xos {

std::string ValidationReport::describe() const {
    if (valid) return "ok";
    std::ostringstream out;
    out << violations.size() << " column violation(s):";
    for (const auto& v : violations) {
        out << " [col " << v.column << " sum " << v.column_sum << ": " << v.reason << "]";
    }
    return out.str();
}

ValidationReport validate_ownership(const OwnershipMatrix& m, double margin) {
    ValidationReport report;
    const Eigen::MatrixXd& e = m.entries;
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
        double sum = 0.0;
        bool entry_bad = false;
        std::string reason;
        for (Eigen::Index i = 0; i < e.rows(); ++i) {
            const double x = e(i, j);
            if (!std::isfinite(x)) {
                entry_bad = true;
                reason = "non-finite entry";
                break;
            }
            if (x < 0.0) {
                entry_bad = true;
                reason = "negative entry";
                break;
            }
            if (x > 1.0) {
                entry_bad = true;
                reason = "entry above one";
                break;
            }
            sum += x;
        }
        if (entry_bad) {
            report.violations.push_back({static_cast<std::size_t>(j), sum, reason});
            continue;
        }
        if (m.kind == MatrixKind::StrictSubstochastic) {
            if (sum > 1.0 - margin) {
                report.violations.push_back(
                    {static_cast<std::size_t>(j), sum, "column sum not strictly below one"});
            }
        } else {
            if (sum > 1.0 + margin) {
                report.violations.push_back(
                    {static_cast<std::size_t>(j), sum, "column sum above one"});
            }
        }
    }
    report.valid = report.violations.empty();
    return report;
}

double l1_norm(const Eigen::VectorXd& v) {
    return v.cwiseAbs().sum();
}

double matrix_l1_norm(const Eigen::MatrixXd& m) {
    if (m.cols() == 0) return 0.0;
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

Eigen::MatrixXd neumann_inverse(const OwnershipMatrix& m, double margin) {
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("neumann_inverse requires a square matrix");
    }
    OwnershipMatrix strict = m;
    strict.kind = MatrixKind::StrictSubstochastic;
    const ValidationReport report = validate_ownership(strict, margin);
    if (!report.valid) {
        throw NotStrictlySubstochastic("neumann_inverse: " + report.describe());
    }
    const Eigen::Index n = m.rows();
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - m.entries;
    return lhs.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
}

} // namespace xos
