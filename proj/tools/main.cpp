#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using xos::cli::CommonOptions;
using xos::cli::Format;

void add_common(CLI::App* cmd, CommonOptions& options) {
    cmd->add_option("input", options.input,
                    "Scenario file path, or '-' to read from standard input");
    const std::map<std::string, Format> formats{
        {"text", Format::Text}, {"json", Format::Json}, {"csv", Format::Csv}};
    cmd->add_option("-f,--format", options.format, "Output format")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
}

void add_solver(CLI::App* cmd, CommonOptions& options) {
    cmd->add_option("--tol", options.tol, "Convergence tolerance override");
    cmd->add_option("--max-iter", options.max_iter, "Iteration cap override");
    cmd->add_option("--seed", options.seed, "Random seed override");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-ownership equilibrium toolkit"};
    app.require_subcommand(1);

    CommonOptions check_opts;
    CLI::App* check = app.add_subcommand(
        "check", "Validate a scenario file and report assumption class and bounds");
    add_common(check, check_opts);

    CommonOptions solve_opts;
    CLI::App* solve =
        app.add_subcommand("solve", "Compute the price equilibrium for each scenario");
    add_common(solve, solve_opts);
    add_solver(solve, solve_opts);
    solve->add_flag("--parallel", solve_opts.parallel, "Solve scenarios across threads");

    CommonOptions scan_opts;
    CLI::App* scan = app.add_subcommand(
        "scan", "Search for multiple equilibria from randomized starting points");
    add_common(scan, scan_opts);
    add_solver(scan, scan_opts);
    scan->add_option("--starts", scan_opts.starts, "Number of randomized starts");
    scan->add_flag("--parallel", scan_opts.parallel, "Scan scenarios across threads");

    CommonOptions metrics_opts;
    CLI::App* metrics = app.add_subcommand(
        "metrics", "Solve each scenario and report leverage and cross-ownership metrics");
    add_common(metrics, metrics_opts);
    add_solver(metrics, metrics_opts);
    metrics->add_flag("--parallel", metrics_opts.parallel,
                      "Process scenarios across threads");

    CommonOptions price_opts;
    CLI::App* price = app.add_subcommand(
        "price", "Monte Carlo risk-neutral pricing of recovery and equity claims");
    add_common(price, price_opts);
    add_solver(price, price_opts);
    price->add_option("--paths", price_opts.paths, "Number of Monte Carlo paths")
        ->check(CLI::PositiveNumber);
    price->add_flag("--parallel", price_opts.parallel, "Simulate paths across threads");
    price->add_flag("--reproducible", price_opts.reproducible,
                    "Force sequential simulation for byte-identical output");
    const std::map<std::string, xos::MetricMode> modes{
        {"expectation", xos::MetricMode::Expectation},
        {"price-substitution", xos::MetricMode::PriceSubstitution}};
    price->add_option("--metric-mode", price_opts.metric_mode,
                      "Aggregate metric estimator")
        ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return xos::cli::cmd_check(check_opts);
        if (solve->parsed()) return xos::cli::cmd_solve(solve_opts);
        if (scan->parsed()) return xos::cli::cmd_scan(scan_opts);
        if (metrics->parsed()) return xos::cli::cmd_metrics(metrics_opts);
        if (price->parsed()) return xos::cli::cmd_price(price_opts);
    } catch (const xos::ParseError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return xos::cli::kExitInvalidInput;
    } catch (const xos::NoConvergence& err) {
        std::cerr << "error: " << err.what() << "\n";
        return xos::cli::kExitSolverFailure;
    } catch (const xos::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return xos::cli::kExitInvalidInput;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return xos::cli::kExitInvalidInput;
    }
    return xos::cli::kExitOk;
}
