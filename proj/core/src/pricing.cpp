#include "xos/pricing.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

namespace xos {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void check_model(const MarketModel& model) {
    const Eigen::Index q = model.spot.size();
    if (q < 1) throw DimensionMismatch("market model: needs at least one asset");
    if (model.vols.size() != q) {
        throw DimensionMismatch("market model: vols must match the asset count");
    }
    if (model.correlation.rows() != q || model.correlation.cols() != q) {
        throw DimensionMismatch("market model: correlation must be q x q");
    }
    if (!model.spot.allFinite() || (model.spot.array() < 0.0).any()) {
        throw Error("market model: spots must be finite and non-negative");
    }
    if (!model.vols.allFinite() || (model.vols.array() < 0.0).any()) {
        throw Error("market model: vols must be finite and non-negative");
    }
    if (!std::isfinite(model.rate)) throw Error("market model: rate must be finite");
    if (!std::isfinite(model.maturity) || model.maturity <= 0.0) {
        throw Error("market model: maturity must be positive");
    }
    if (!model.correlation.allFinite()) {
        throw Error("market model: correlation must be finite");
    }
    for (Eigen::Index i = 0; i < q; ++i) {
        if (std::abs(model.correlation(i, i) - 1.0) > 1e-12) {
            throw Error("market model: correlation diagonal must be one");
        }
        for (Eigen::Index j = 0; j < i; ++j) {
            if (std::abs(model.correlation(i, j) - model.correlation(j, i)) > 1e-12) {
                throw Error("market model: correlation must be symmetric");
            }
        }
    }
}

// Terminal value of every asset on one path. Path draws use an engine
// seeded from (seed, path) alone so any execution order reproduces them.
Eigen::VectorXd terminal_for_path(const MarketModel& model, const Eigen::MatrixXd& chol,
                                  std::uint64_t seed, std::size_t path) {
    const Eigen::Index q = model.spot.size();
    std::mt19937_64 rng(splitmix64(splitmix64(seed) + path));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(q);
    for (Eigen::Index j = 0; j < q; ++j) z[j] = normal(rng);
    const Eigen::VectorXd y = chol * z;
    const double t = model.maturity;
    Eigen::VectorXd out(q);
    for (Eigen::Index j = 0; j < q; ++j) {
        const double vol = model.vols[j];
        out[j] = model.spot[j] *
                 std::exp((model.rate - 0.5 * vol * vol) * t + vol * std::sqrt(t) * y[j]);
    }
    return out;
}

} // namespace

Eigen::MatrixXd correlation_factor(const MarketModel& model) {
    check_model(model);
    Eigen::LLT<Eigen::MatrixXd> llt(model.correlation);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(model.correlation);
    const double lambda_min = eigs.eigenvalues().minCoeff();
    if (lambda_min < -1e-10) {
        std::ostringstream what;
        what << "correlation matrix is not PSD: smallest eigenvalue " << lambda_min;
        throw NonPSDCorrelation(what.str());
    }
    const Eigen::Index q = model.correlation.rows();
    Eigen::LLT<Eigen::MatrixXd> jittered(
        model.correlation + 1e-10 * Eigen::MatrixXd::Identity(q, q));
    if (jittered.info() != Eigen::Success) {
        throw NonPSDCorrelation("correlation matrix failed factorization after jitter");
    }
    return jittered.matrixL();
}

Eigen::MatrixXd simulate_terminal(const MarketModel& model, std::size_t paths,
                                  std::uint64_t seed) {
    const Eigen::MatrixXd chol = correlation_factor(model);
    Eigen::MatrixXd out(model.spot.size(), static_cast<Eigen::Index>(paths));
    for (std::size_t p = 0; p < paths; ++p) {
        out.col(static_cast<Eigen::Index>(p)) = terminal_for_path(model, chol, seed, p);
    }
    return out;
}

PriceReport price(const FirmSystem& system, const MarketModel& model,
                  const PricingConfig& config) {
    const Eigen::MatrixXd chol = correlation_factor(model);
    if (model.spot.size() != system.assets()) {
        throw DimensionMismatch("price: market model asset count must match the system");
    }
    if (config.paths < 1) throw Error("price: needs at least one path");
    if (classify_assumptions(system) != AssumptionClass::A2Contractive) {
        throw NonContractiveSystem("price: liabilities must classify contractive");
    }
    const ValidationReport report = system.validate();
    if (!report.valid) {
        throw InvalidSystem("price: ownership validation failed: " + report.describe());
    }

    const Eigen::Index n = system.firms();
    const auto m = system.seniorities();
    const Eigen::Index dim = n * static_cast<Eigen::Index>(m + 1);
    const std::size_t paths = config.paths;

    // Per-path component values land in a fixed slot, so the later
    // reduction never depends on how paths were distributed over workers.
    Eigen::MatrixXd values(dim, static_cast<Eigen::Index>(paths));
    Eigen::VectorXd internal(static_cast<Eigen::Index>(paths));
    Eigen::VectorXd exogenous(static_cast<Eigen::Index>(paths));
    Eigen::VectorXd claims(static_cast<Eigen::Index>(paths));

    // The smallest detected failing path wins the report.
    std::mutex failure_lock;
    std::size_t failed_path = paths;
    std::size_t failed_iterations = 0;
    double failed_residual = 0.0;
    std::atomic<bool> failed{false};

    const auto worker_body = [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            if (failed.load(std::memory_order_relaxed)) return;
            const Scenario scenario(terminal_for_path(model, chol, config.seed, p));
            Equilibrium eq;
            try {
                eq = solve(system, scenario, config.solver);
            } catch (const NoConvergence& err) {
                const std::lock_guard<std::mutex> guard(failure_lock);
                failed.store(true);
                if (p < failed_path) {
                    failed_path = p;
                    failed_iterations = err.iterations;
                    failed_residual = err.residual;
                }
                return;
            }
            values.col(static_cast<Eigen::Index>(p)) = eq.state.flatten();
            double held = l1_norm(system.equity_ownership().entries * eq.state.s);
            for (std::size_t i = 0; i < m; ++i) {
                held += l1_norm(system.liability_ownership(i).entries * eq.state.r[i]);
            }
            internal[static_cast<Eigen::Index>(p)] = held;
            exogenous[static_cast<Eigen::Index>(p)] =
                l1_norm(system.exogenous_wealth(scenario));
            claims[static_cast<Eigen::Index>(p)] = eq.state.l1();
        }
    };

    unsigned workers = config.reproducible ? 1 : config.workers;
    if (workers == 0) {
        workers = std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
    }
    workers = static_cast<unsigned>(
        std::min<std::size_t>(workers, std::max<std::size_t>(paths, 1)));
    if (workers <= 1) {
        worker_body(0, paths);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (paths + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = static_cast<std::size_t>(w) * chunk;
            const std::size_t end = std::min(paths, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(worker_body, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    if (failed.load()) {
        std::ostringstream what;
        what << "price: path " << failed_path << " failed to converge after "
             << failed_iterations << " iterations, last step " << failed_residual;
        throw NoConvergence(what.str(), failed_iterations, failed_residual);
    }

    const double discount = std::exp(-model.rate * model.maturity);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (std::size_t p = 0; p < paths; ++p) {
        mean += values.col(static_cast<Eigen::Index>(p));
    }
    mean /= static_cast<double>(paths);
    Eigen::VectorXd variance = Eigen::VectorXd::Zero(dim);
    if (paths > 1) {
        for (std::size_t p = 0; p < paths; ++p) {
            const Eigen::VectorXd dev = values.col(static_cast<Eigen::Index>(p)) - mean;
            variance += dev.cwiseProduct(dev);
        }
        variance /= static_cast<double>(paths - 1);
    }

    PriceReport out;
    out.means = StateVector::unflatten(discount * mean, n, m);
    out.std_errors = StateVector::unflatten(
        discount * (variance / static_cast<double>(paths)).cwiseSqrt(), n, m);
    out.paths = paths;
    out.seed = config.seed;
    out.metric_mode = config.metric_mode;

    if (config.metric_mode == MetricMode::Expectation) {
        double sum_l = 0.0;
        double sum_i = 0.0;
        for (std::size_t p = 0; p < paths; ++p) {
            const auto pi = static_cast<Eigen::Index>(p);
            if (exogenous[pi] == 0.0) {
                throw ZeroExogenousBase("price: a path has no exogenous wealth");
            }
            if (claims[pi] == 0.0) {
                throw ZeroClaims("price: a path has no claim value");
            }
            sum_l += internal[pi] / exogenous[pi];
            sum_i += internal[pi] / claims[pi];
        }
        out.expected_L = sum_l / static_cast<double>(paths);
        out.expected_I = sum_i / static_cast<double>(paths);
    } else {
        const double sum_internal = internal.sum();
        const double sum_exo = exogenous.sum();
        const double sum_claims = claims.sum();
        if (sum_exo == 0.0) {
            throw ZeroExogenousBase("price: no exogenous wealth across paths");
        }
        if (sum_claims == 0.0) throw ZeroClaims("price: no claim value across paths");
        out.expected_L = sum_internal / sum_exo;
        out.expected_I = sum_internal / sum_claims;
    }
    return out;
}

} // namespace xos
