#include "xos/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace xos {

namespace {

Eigen::MatrixXd dues_for(const FirmSystem& system, const Scenario& scenario,
                         const StateVector& state, const LiabilityEvaluator& hook) {
    if (!hook) return evaluate_liabilities(system, state, scenario);
    Eigen::MatrixXd dues = hook(system, state, scenario);
    if (dues.rows() != static_cast<Eigen::Index>(system.seniorities()) ||
        dues.cols() != system.firms()) {
        throw DimensionMismatch("liability hook: expected an m x n due matrix");
    }
    return dues;
}

Eigen::VectorXd wealth_of(const FirmSystem& system, const Scenario& scenario,
                          const StateVector& state) {
    Eigen::VectorXd w = system.exogenous_wealth(scenario);
    w += system.equity_ownership().entries * state.s;
    for (std::size_t i = 0; i < system.seniorities(); ++i) {
        w += system.liability_ownership(i).entries * state.r[i];
    }
    return w;
}

StateVector phi(const FirmSystem& system, const Scenario& scenario, const StateVector& state,
                const LiabilityEvaluator& hook) {
    system.check_state(state);
    const Eigen::VectorXd w = wealth_of(system, scenario, state);
    const Eigen::MatrixXd dues = dues_for(system, scenario, state, hook);
    const Eigen::Index n = system.firms();
    const auto m = system.seniorities();
    StateVector next = StateVector::zero(n, m);
    for (Eigen::Index k = 0; k < n; ++k) {
        const WaterfallResult wf = waterfall(w[k], dues.col(k));
        for (std::size_t i = 0; i < m; ++i) {
            next.r[i][k] = wf.payments[static_cast<Eigen::Index>(i)];
        }
        next.s[k] = wf.residual;
    }
    return next;
}

double apriori_bound(double rate, double tol, double first_step) {
    if (first_step <= tol) return 0.0;
    if (rate <= 0.0) return 1.0;
    if (rate >= 1.0) return std::numeric_limits<double>::quiet_NaN();
    const double arg = tol * (1.0 - rate) / first_step;
    return std::ceil(std::log(arg) / std::log(rate));
}

// Picard iteration without the validation and throw-on-failure policy of
// solve(); scan reuses it on many start points.
Equilibrium picard_from(const FirmSystem& system, const Scenario& scenario,
                        const SolverConfig& config, const LiabilityEvaluator& hook,
                        StateVector x) {
    Equilibrium out;
    const double rate = contraction_rate(system);
    double first_step = -1.0;
    for (std::size_t it = 1; it <= config.max_iter; ++it) {
        StateVector next = phi(system, scenario, x, hook);
        const double step = l1_distance(next, x);
        x = std::move(next);
        if (first_step < 0.0) {
            first_step = step;
            out.apriori_iteration_bound = hook ? std::numeric_limits<double>::quiet_NaN()
                                               : apriori_bound(rate, config.tol, step);
        }
        out.iterations = it;
        out.residual = step;
        if (step <= config.tol) {
            out.converged = true;
            break;
        }
    }
    out.state = std::move(x);
    out.balance_residual = balance_check(system, scenario, out.state);
    return out;
}

} // namespace

double contraction_rate(const FirmSystem& system) {
    double rate = matrix_l1_norm(system.equity_ownership().entries);
    for (const auto& d : system.liability_ownerships()) {
        rate = std::max(rate, matrix_l1_norm(d.entries));
    }
    return rate;
}

StateVector apply_phi(const FirmSystem& system, const Scenario& scenario,
                      const StateVector& state) {
    return phi(system, scenario, state, {});
}

StateVector apply_phi(const FirmSystem& system, const Scenario& scenario,
                      const StateVector& state, const LiabilityEvaluator& hook) {
    return phi(system, scenario, state, hook);
}

Equilibrium solve(const FirmSystem& system, const Scenario& scenario,
                  const SolverConfig& config) {
    return solve(system, scenario, config, {});
}

Equilibrium solve(const FirmSystem& system, const Scenario& scenario, const SolverConfig& config,
                  const LiabilityEvaluator& hook) {
    const ValidationReport report = system.validate();
    if (!report.valid) {
        throw InvalidSystem("solve: ownership validation failed: " + report.describe());
    }
    Equilibrium eq = picard_from(system, scenario, config, hook,
                                 StateVector::zero(system.firms(), system.seniorities()));
    if (!eq.converged) {
        std::ostringstream what;
        what << "solve: no convergence after " << eq.iterations
             << " iterations, last step " << eq.residual;
        throw NoConvergence(what.str(), eq.iterations, eq.residual);
    }
    eq.uniqueness_guaranteed =
        classify_assumptions(system, hook) == AssumptionClass::A2Contractive;
    return eq;
}

Eigen::VectorXd balance_check(const FirmSystem& system, const Scenario& scenario,
                              const StateVector& state) {
    system.check_state(state);
    Eigen::VectorXd claims = state.s;
    for (const auto& ri : state.r) claims += ri;
    return claims - wealth_of(system, scenario, state);
}

namespace {

// ---- pattern sweep ------------------------------------------------------
//
// A fixed point assigns each firm a marginal seniority level: every level
// above it is paid in full, the marginal level absorbs the remaining
// wealth, everything below (including equity) gets nothing. Level m means
// fully solvent. Fixing the pattern removes the min/max kinks and leaves a
// smooth square system in the state, so all of its roots can be hunted
// directly and checked against the true map afterwards. This is what makes
// repelling equilibria findable at all.

struct PatternProblem {
    const FirmSystem& system;
    const Scenario& scenario;
    const LiabilityEvaluator& hook;
    std::vector<std::size_t> marginal; // per firm, in [0, m]
};

// Residual of the pattern's smooth equations at flat state x.
Eigen::VectorXd pattern_residual(const PatternProblem& p, const Eigen::VectorXd& x) {
    const Eigen::Index n = p.system.firms();
    const auto m = p.system.seniorities();
    const StateVector state = StateVector::unflatten(x, n, m);
    const Eigen::VectorXd w = wealth_of(p.system, p.scenario, state);
    const Eigen::MatrixXd dues = dues_for(p.system, p.scenario, state, p.hook);
    Eigen::VectorXd res(x.size());
    for (Eigen::Index k = 0; k < n; ++k) {
        const std::size_t marginal = p.marginal[static_cast<std::size_t>(k)];
        double senior = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const Eigen::Index row = static_cast<Eigen::Index>(i) * n + k;
            const double due = dues(static_cast<Eigen::Index>(i), k);
            if (i < marginal) {
                res[row] = state.r[i][k] - due;
            } else if (i == marginal) {
                res[row] = state.r[i][k] - (w[k] - senior);
            } else {
                res[row] = state.r[i][k];
            }
            senior += due;
        }
        const Eigen::Index srow = static_cast<Eigen::Index>(m) * n + k;
        res[srow] = marginal == m ? state.s[k] - (w[k] - senior) : state.s[k];
    }
    return res;
}

// The pattern equations are affine in the state whenever the dues are.
// Extract A and b from residual evaluations so DSL systems solve exactly.
bool solve_pattern_linear(const PatternProblem& p, Eigen::VectorXd& root) {
    const Eigen::Index dim =
        p.system.firms() * static_cast<Eigen::Index>(p.system.seniorities() + 1);
    const Eigen::VectorXd b = pattern_residual(p, Eigen::VectorXd::Zero(dim));
    Eigen::MatrixXd a(dim, dim);
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        unit[j] = 1.0;
        a.col(j) = pattern_residual(p, unit) - b;
        unit[j] = 0.0;
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) return false;
    root = lu.solve(-b);
    return true;
}

// Damped Newton with a forward-difference Jacobian for hook dues, where the
// pattern equations need not be affine.
bool solve_pattern_newton(const PatternProblem& p, const Eigen::VectorXd& start,
                          Eigen::VectorXd& root) {
    const Eigen::Index dim = start.size();
    Eigen::VectorXd x = start;
    Eigen::VectorXd res = pattern_residual(p, x);
    for (int it = 0; it < 60; ++it) {
        const double norm = res.cwiseAbs().sum();
        if (norm <= 1e-12 * (1.0 + x.cwiseAbs().sum())) {
            root = x;
            return true;
        }
        Eigen::MatrixXd jac(dim, dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double h = 1e-7 * (1.0 + std::abs(x[j]));
            Eigen::VectorXd bumped = x;
            bumped[j] += h;
            jac.col(j) = (pattern_residual(p, bumped) - res) / h;
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible()) return false;
        const Eigen::VectorXd step = lu.solve(-res);
        double alpha = 1.0;
        bool advanced = false;
        while (alpha > 1e-4) {
            const Eigen::VectorXd trial = x + alpha * step;
            const Eigen::VectorXd trial_res = pattern_residual(p, trial);
            if (trial_res.cwiseAbs().sum() < (1.0 - 1e-4 * alpha) * norm) {
                x = trial;
                res = trial_res;
                advanced = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!advanced) return false;
    }
    return false;
}

// Checks a pattern root against the side conditions the smooth equations
// dropped: non-negative components, marginal payment within its due, and
// non-negative equity for solvent firms. True fixed point membership is
// re-verified against phi by the caller, so the slack here only prunes.
bool pattern_consistent(const PatternProblem& p, const Eigen::VectorXd& x) {
    const Eigen::Index n = p.system.firms();
    const auto m = p.system.seniorities();
    const double slack = 1e-7 * (1.0 + x.cwiseAbs().sum());
    if ((x.array() < -slack).any()) return false;
    const StateVector state = StateVector::unflatten(x, n, m);
    const Eigen::MatrixXd dues = dues_for(p.system, p.scenario, state, p.hook);
    for (Eigen::Index k = 0; k < n; ++k) {
        const std::size_t marginal = p.marginal[static_cast<std::size_t>(k)];
        if (marginal < m) {
            const double due = dues(static_cast<Eigen::Index>(marginal), k);
            if (state.r[marginal][k] > due + slack) return false;
        }
    }
    return true;
}

} // namespace

std::vector<Equilibrium> scan_equilibria(const FirmSystem& system, const Scenario& scenario,
                                         const SolverConfig& config,
                                         const LiabilityEvaluator& hook) {
    const ValidationReport report = system.validate();
    if (!report.valid) {
        throw InvalidSystem("scan_equilibria: ownership validation failed: " +
                            report.describe());
    }
    const Eigen::Index n = system.firms();
    const auto m = system.seniorities();
    const Eigen::Index dim = n * static_cast<Eigen::Index>(m + 1);

    const double rate = contraction_rate(system);
    const double exo = l1_norm(system.exogenous_wealth(scenario));
    const double box = exo / (1.0 - rate);

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> coord(0.0, box);
    std::vector<Eigen::VectorXd> starts;
    starts.reserve(config.starts);
    for (std::size_t sidx = 0; sidx < config.starts; ++sidx) {
        Eigen::VectorXd x(dim);
        for (Eigen::Index j = 0; j < dim; ++j) x[j] = coord(rng);
        starts.push_back(std::move(x));
    }

    struct Candidate {
        StateVector state;
        std::size_t iterations;
        double residual;
    };
    std::vector<Candidate> candidates;
    const auto admit = [&](StateVector state, std::size_t iterations) {
        for (auto& ri : state.r) ri = ri.cwiseMax(0.0);
        state.s = state.s.cwiseMax(0.0);
        const double residual = l1_distance(apply_phi(system, scenario, state, hook), state);
        if (residual > std::max(config.tol, 1e-12 * (1.0 + state.l1()))) return;
        candidates.push_back({std::move(state), iterations, residual});
    };

    for (const auto& start : starts) {
        Equilibrium eq = picard_from(system, scenario, config, hook,
                                     StateVector::unflatten(start, n, m));
        if (eq.converged) admit(std::move(eq.state), eq.iterations);
    }

    double patterns = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) patterns *= static_cast<double>(m + 1);
    if (patterns <= 65536.0) {
        std::vector<Eigen::VectorXd> newton_starts;
        if (hook) {
            newton_starts.push_back(Eigen::VectorXd::Zero(dim));
            newton_starts.push_back(Eigen::VectorXd::Constant(dim, box / 2.0));
            for (std::size_t sidx = 0; sidx < std::min<std::size_t>(starts.size(), 8); ++sidx) {
                newton_starts.push_back(starts[sidx]);
            }
        }
        std::vector<std::size_t> marginal(static_cast<std::size_t>(n), 0);
        for (std::size_t code = 0; code < static_cast<std::size_t>(patterns); ++code) {
            std::size_t rem = code;
            for (auto& level : marginal) {
                level = rem % (m + 1);
                rem /= (m + 1);
            }
            const PatternProblem problem{system, scenario, hook, marginal};
            if (!hook) {
                Eigen::VectorXd root;
                if (solve_pattern_linear(problem, root) && pattern_consistent(problem, root)) {
                    admit(StateVector::unflatten(root, n, m), 0);
                }
            } else {
                for (const auto& nstart : newton_starts) {
                    Eigen::VectorXd root;
                    if (solve_pattern_newton(problem, nstart, root) &&
                        pattern_consistent(problem, root)) {
                        admit(StateVector::unflatten(root, n, m), 0);
                    }
                }
            }
        }
    }

    // Deduplicate, keeping the sharpest representative of each cluster.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                         return a.residual < b.residual;
                     });
    std::vector<Candidate> distinct;
    for (auto& c : candidates) {
        bool seen = false;
        for (const auto& kept : distinct) {
            if (l1_distance(c.state, kept.state) <= config.dedup_threshold) {
                seen = true;
                break;
            }
        }
        if (!seen) distinct.push_back(std::move(c));
    }

    std::vector<Equilibrium> out;
    out.reserve(distinct.size());
    for (auto& c : distinct) {
        Equilibrium eq;
        eq.state = std::move(c.state);
        eq.iterations = c.iterations;
        eq.residual = c.residual;
        eq.converged = true;
        eq.balance_residual = balance_check(system, scenario, eq.state);
        eq.uniqueness_guaranteed = false;
        eq.apriori_iteration_bound = std::numeric_limits<double>::quiet_NaN();
        out.push_back(std::move(eq));
    }
    std::sort(out.begin(), out.end(), [](const Equilibrium& a, const Equilibrium& b) {
        const double na = a.state.l1();
        const double nb = b.state.l1();
        if (na != nb) return na < nb;
        const Eigen::VectorXd fa = a.state.flatten();
        const Eigen::VectorXd fb = b.state.flatten();
        for (Eigen::Index j = 0; j < fa.size(); ++j) {
            if (fa[j] != fb[j]) return fa[j] < fb[j];
        }
        return false;
    });
    return out;
}

} // namespace xos
