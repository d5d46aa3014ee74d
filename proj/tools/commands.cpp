#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "scenario_io.hpp"

namespace xos::cli {

namespace {

using nlohmann::ordered_json;

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("XOS_LOG");
        if (!env) return 0;
        const std::string value(env);
        if (value == "info") return 1;
        if (value == "debug") return 2;
        return 0;
    }();
    return level;
}

void log_info(const std::string& message) {
    if (log_level() >= 1) std::cerr << "[info] " << message << "\n";
}

void log_debug(const std::string& message) {
    if (log_level() >= 2) std::cerr << "[debug] " << message << "\n";
}

// All numeric output carries 12 significant digits.
std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string csv_field(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (const char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void print_text(std::ostream& out) const {
        std::vector<std::size_t> widths(header.size());
        for (std::size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                widths[c] = std::max(widths[c], row[c].size());
            }
        }
        const auto print_row = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                out << row[c];
                if (c + 1 < row.size()) {
                    out << std::string(widths[c] - row[c].size() + 2, ' ');
                }
            }
            out << "\n";
        };
        print_row(header);
        for (const auto& row : rows) print_row(row);
    }

    void print_csv(std::ostream& out) const {
        const auto print_row = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out << ",";
                out << csv_field(row[c]);
            }
            out << "\r\n";
        };
        print_row(header);
        for (const auto& row : rows) print_row(row);
    }
};

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read input file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

ScenarioFile load(const CommonOptions& options) {
    ScenarioFile file = parse_scenario_file(read_input(options.input));
    std::ostringstream summary;
    summary << "loaded system: " << file.system.firms() << " firm(s), "
            << file.system.seniorities() << " seniority level(s), " << file.system.assets()
            << " asset(s), " << file.scenarios.size() << " scenario(s)";
    log_info(summary.str());
    return file;
}

SolverConfig resolve_solver(const ScenarioFile& file, const CommonOptions& options) {
    SolverConfig config = file.solver;
    if (options.tol) config.tol = *options.tol;
    if (options.max_iter) config.max_iter = *options.max_iter;
    if (options.starts) config.starts = *options.starts;
    if (options.seed) config.seed = *options.seed;
    return config;
}

std::string class_name(AssumptionClass cls) {
    switch (cls) {
        case AssumptionClass::A1Continuous: return "A1_Continuous";
        case AssumptionClass::A2Contractive: return "A2_Contractive";
        default: return "Unknown";
    }
}

std::string metric_mode_name(MetricMode mode) {
    return mode == MetricMode::Expectation ? "expectation" : "price_substitution";
}

// Runs one job per scenario, optionally across threads, and surfaces the
// first failure by scenario order. Results always come back in input order.
template <typename T, typename Fn>
std::vector<T> per_scenario(const std::vector<Scenario>& scenarios, bool parallel, Fn&& fn) {
    std::vector<T> results(scenarios.size());
    if (!parallel || scenarios.size() < 2) {
        for (std::size_t i = 0; i < scenarios.size(); ++i) results[i] = fn(i);
        return results;
    }
    std::vector<std::future<T>> futures;
    futures.reserve(scenarios.size());
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        futures.push_back(std::async(std::launch::async, fn, i));
    }
    for (std::size_t i = 0; i < scenarios.size(); ++i) results[i] = futures[i].get();
    return results;
}

} // namespace

int cmd_check(const CommonOptions& options) {
    const ScenarioFile file = load(options);
    const ValidationReport report = file.system.validate();
    const AssumptionClass cls = classify_assumptions(file.system, file.make_hook());
    const auto [i_max, l_max] = leverage_bounds(file.system);

    if (options.format == Format::Json) {
        ordered_json doc;
        doc["command"] = "check";
        doc["valid"] = report.valid;
        ordered_json violations = ordered_json::array();
        for (const auto& v : report.violations) {
            ordered_json item;
            item["column"] = v.column;
            item["column_sum"] = v.column_sum;
            item["reason"] = v.reason;
            violations.push_back(std::move(item));
        }
        doc["violations"] = std::move(violations);
        doc["assumption_class"] = class_name(cls);
        doc["max_degree"] = i_max;
        doc["max_leverage"] = l_max;
        doc["firms"] = file.system.firms();
        doc["seniorities"] = static_cast<Eigen::Index>(file.system.seniorities());
        doc["assets"] = file.system.assets();
        doc["scenarios"] = file.scenarios.size();
        std::cout << doc.dump(2) << "\n";
    } else if (options.format == Format::Csv) {
        Table table;
        table.header = {"field", "value"};
        table.rows.push_back({"valid", report.valid ? "true" : "false"});
        for (const auto& v : report.violations) {
            std::ostringstream desc;
            desc << v.reason << " (column " << v.column << ", sum " << num(v.column_sum)
                 << ")";
            table.rows.push_back({"violation", desc.str()});
        }
        table.rows.push_back({"assumption_class", class_name(cls)});
        table.rows.push_back({"max_degree", num(i_max)});
        table.rows.push_back({"max_leverage", num(l_max)});
        table.print_csv(std::cout);
    } else {
        std::cout << "system: " << file.system.firms() << " firm(s), "
                  << file.system.seniorities() << " seniority level(s), "
                  << file.system.assets() << " asset(s), " << file.scenarios.size()
                  << " scenario(s)\n";
        if (report.valid) {
            std::cout << "validation: ok\n";
        } else {
            std::cout << "validation: failed\n";
            for (const auto& v : report.violations) {
                std::cout << "  column " << v.column << " sum " << num(v.column_sum) << ": "
                          << v.reason << "\n";
            }
        }
        std::cout << "assumption class: " << class_name(cls) << "\n";
        std::cout << "I_max: " << num(i_max) << "\n";
        std::cout << "L_max: " << num(l_max) << "\n";
    }

    if (!report.valid) return kExitInvalidInput;
    if (cls != AssumptionClass::A2Contractive) return kExitUnknownClass;
    return kExitOk;
}

int cmd_solve(const CommonOptions& options) {
    const ScenarioFile file = load(options);
    const ValidationReport report = file.system.validate();
    if (!report.valid) {
        std::cerr << "solve: ownership validation failed: " << report.describe() << "\n";
        return kExitInvalidInput;
    }
    const SolverConfig config = resolve_solver(file, options);
    const LiabilityEvaluator hook = file.make_hook();

    std::vector<Equilibrium> results;
    try {
        results = per_scenario<Equilibrium>(
            file.scenarios, options.parallel, [&](std::size_t i) {
                log_debug("solving scenario " + std::to_string(i));
                return solve(file.system, file.scenarios[i], config, hook);
            });
    } catch (const NoConvergence& err) {
        std::cerr << "solve: " << err.what() << "\n";
        return kExitSolverFailure;
    }

    const auto m = file.system.seniorities();
    if (options.format == Format::Json) {
        ordered_json doc;
        doc["command"] = "solve";
        ordered_json scenarios = ordered_json::array();
        for (std::size_t i = 0; i < results.size(); ++i) {
            const Equilibrium& eq = results[i];
            ordered_json entry;
            entry["index"] = i;
            ordered_json assets = ordered_json::array();
            for (Eigen::Index j = 0; j < file.scenarios[i].size(); ++j) {
                assets.push_back(file.scenarios[i].assets[j]);
            }
            entry["assets"] = std::move(assets);
            entry["iterations"] = eq.iterations;
            entry["residual"] = eq.residual;
            entry["converged"] = eq.converged;
            entry["uniqueness_guaranteed"] = eq.uniqueness_guaranteed;
            ordered_json firms = ordered_json::array();
            for (Eigen::Index k = 0; k < file.system.firms(); ++k) {
                ordered_json firm;
                firm["firm"] = k;
                firm["s"] = eq.state.s[k];
                ordered_json recoveries = ordered_json::array();
                for (std::size_t level = 0; level < m; ++level) {
                    recoveries.push_back(eq.state.r[level][k]);
                }
                firm["r"] = std::move(recoveries);
                firm["balance_residual"] = eq.balance_residual[k];
                firms.push_back(std::move(firm));
            }
            entry["firms"] = std::move(firms);
            scenarios.push_back(std::move(entry));
        }
        doc["scenarios"] = std::move(scenarios);
        std::cout << doc.dump(2) << "\n";
        return kExitOk;
    }

    Table table;
    table.header = {"scenario", "firm", "s"};
    for (std::size_t level = 0; level < m; ++level) {
        table.header.push_back("r" + std::to_string(level + 1));
    }
    table.header.push_back("balance_residual");
    table.header.push_back("iterations");
    for (std::size_t i = 0; i < results.size(); ++i) {
        const Equilibrium& eq = results[i];
        for (Eigen::Index k = 0; k < file.system.firms(); ++k) {
            std::vector<std::string> row;
            row.push_back(std::to_string(i));
            row.push_back(std::to_string(k));
            row.push_back(num(eq.state.s[k]));
            for (std::size_t level = 0; level < m; ++level) {
                row.push_back(num(eq.state.r[level][k]));
            }
            row.push_back(num(eq.balance_residual[k]));
            row.push_back(std::to_string(eq.iterations));
            table.rows.push_back(std::move(row));
        }
    }
    if (options.format == Format::Csv) {
        table.print_csv(std::cout);
    } else {
        table.print_text(std::cout);
    }
    return kExitOk;
}

int cmd_scan(const CommonOptions& options) {
    const ScenarioFile file = load(options);
    const ValidationReport report = file.system.validate();
    if (!report.valid) {
        std::cerr << "scan: ownership validation failed: " << report.describe() << "\n";
        return kExitInvalidInput;
    }
    const SolverConfig config = resolve_solver(file, options);
    const LiabilityEvaluator hook = file.make_hook();

    const auto scans = per_scenario<std::vector<Equilibrium>>(
        file.scenarios, options.parallel, [&](std::size_t i) {
            log_debug("scanning scenario " + std::to_string(i));
            return scan_equilibria(file.system, file.scenarios[i], config, hook);
        });

    const auto m = file.system.seniorities();
    if (options.format == Format::Json) {
        ordered_json doc;
        doc["command"] = "scan";
        doc["starts"] = config.starts;
        doc["seed"] = config.seed;
        ordered_json scenarios = ordered_json::array();
        for (std::size_t i = 0; i < scans.size(); ++i) {
            ordered_json entry;
            entry["index"] = i;
            ordered_json equilibria = ordered_json::array();
            for (const Equilibrium& eq : scans[i]) {
                ordered_json item;
                item["l1_norm"] = eq.state.l1();
                item["residual"] = eq.residual;
                ordered_json firms = ordered_json::array();
                for (Eigen::Index k = 0; k < file.system.firms(); ++k) {
                    ordered_json firm;
                    firm["firm"] = k;
                    firm["s"] = eq.state.s[k];
                    ordered_json recoveries = ordered_json::array();
                    for (std::size_t level = 0; level < m; ++level) {
                        recoveries.push_back(eq.state.r[level][k]);
                    }
                    firm["r"] = std::move(recoveries);
                    firms.push_back(std::move(firm));
                }
                item["firms"] = std::move(firms);
                equilibria.push_back(std::move(item));
            }
            entry["equilibria"] = std::move(equilibria);
            scenarios.push_back(std::move(entry));
        }
        doc["scenarios"] = std::move(scenarios);
        std::cout << doc.dump(2) << "\n";
        return kExitOk;
    }

    if (options.format == Format::Csv) {
        Table table;
        table.header = {"scenario", "equilibrium", "firm", "s"};
        for (std::size_t level = 0; level < m; ++level) {
            table.header.push_back("r" + std::to_string(level + 1));
        }
        table.header.push_back("l1_norm");
        table.header.push_back("residual");
        for (std::size_t i = 0; i < scans.size(); ++i) {
            for (std::size_t e = 0; e < scans[i].size(); ++e) {
                const Equilibrium& eq = scans[i][e];
                for (Eigen::Index k = 0; k < file.system.firms(); ++k) {
                    std::vector<std::string> row;
                    row.push_back(std::to_string(i));
                    row.push_back(std::to_string(e));
                    row.push_back(std::to_string(k));
                    row.push_back(num(eq.state.s[k]));
                    for (std::size_t level = 0; level < m; ++level) {
                        row.push_back(num(eq.state.r[level][k]));
                    }
                    row.push_back(num(eq.state.l1()));
                    row.push_back(num(eq.residual));
                    table.rows.push_back(std::move(row));
                }
            }
        }
        table.print_csv(std::cout);
        return kExitOk;
    }

    for (std::size_t i = 0; i < scans.size(); ++i) {
        std::cout << "scenario " << i << ": " << scans[i].size() << " equilibria\n";
        for (std::size_t e = 0; e < scans[i].size(); ++e) {
            const Equilibrium& eq = scans[i][e];
            std::cout << "  equilibrium " << e << " (l1 " << num(eq.state.l1())
                      << ", residual " << num(eq.residual) << ")\n";
            for (Eigen::Index k = 0; k < file.system.firms(); ++k) {
                std::cout << "    firm " << k << ": s " << num(eq.state.s[k]);
                for (std::size_t level = 0; level < m; ++level) {
                    std::cout << ", r" << (level + 1) << " " << num(eq.state.r[level][k]);
                }
                std::cout << "\n";
            }
        }
    }
    return kExitOk;
}

int cmd_metrics(const CommonOptions& options) {
    const ScenarioFile file = load(options);
    const ValidationReport report = file.system.validate();
    if (!report.valid) {
        std::cerr << "metrics: ownership validation failed: " << report.describe() << "\n";
        return kExitInvalidInput;
    }
    const SolverConfig config = resolve_solver(file, options);
    const LiabilityEvaluator hook = file.make_hook();

    struct Row {
        std::optional<LeverageReport> metrics;
        std::string error;
    };
    std::vector<Row> rows;
    try {
        rows = per_scenario<Row>(file.scenarios, options.parallel, [&](std::size_t i) {
            const Equilibrium eq = solve(file.system, file.scenarios[i], config, hook);
            Row row;
            try {
                row.metrics = leverage_report(file.system, file.scenarios[i], eq.state);
            } catch (const ZeroExogenousBase& err) {
                row.error = err.what();
            } catch (const ZeroClaims& err) {
                row.error = err.what();
            }
            return row;
        });
    } catch (const NoConvergence& err) {
        std::cerr << "metrics: " << err.what() << "\n";
        return kExitSolverFailure;
    }

    if (options.format == Format::Json) {
        ordered_json doc;
        doc["command"] = "metrics";
        ordered_json scenarios = ordered_json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            ordered_json entry;
            entry["index"] = i;
            if (rows[i].metrics) {
                const LeverageReport& m = *rows[i].metrics;
                entry["leverage"] = m.leverage;
                entry["degree"] = m.degree;
                if (m.external_leverage) {
                    entry["external_leverage"] = *m.external_leverage;
                } else {
                    entry["external_leverage"] = nullptr;
                }
                entry["max_degree"] = m.max_degree;
                entry["max_leverage"] = m.max_leverage;
                entry["total_claims"] = m.total_claims;
                entry["exogenous_total"] = m.exogenous_total;
            } else {
                entry["error"] = rows[i].error;
            }
            scenarios.push_back(std::move(entry));
        }
        doc["scenarios"] = std::move(scenarios);
        std::cout << doc.dump(2) << "\n";
        return kExitOk;
    }

    Table table;
    table.header = {"scenario", "L",           "I",
                    "L_ex",     "I_max",       "L_max",
                    "claims",   "exogenous",   "error"};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<std::string> row;
        row.push_back(std::to_string(i));
        if (rows[i].metrics) {
            const LeverageReport& m = *rows[i].metrics;
            row.push_back(num(m.leverage));
            row.push_back(num(m.degree));
            row.push_back(m.external_leverage ? num(*m.external_leverage) : "undef");
            row.push_back(num(m.max_degree));
            row.push_back(num(m.max_leverage));
            row.push_back(num(m.total_claims));
            row.push_back(num(m.exogenous_total));
            row.push_back("");
        } else {
            for (int c = 0; c < 7; ++c) row.push_back("");
            row.push_back(rows[i].error);
        }
        table.rows.push_back(std::move(row));
    }
    if (options.format == Format::Csv) {
        table.print_csv(std::cout);
    } else {
        table.print_text(std::cout);
    }
    return kExitOk;
}

int cmd_price(const CommonOptions& options) {
    const ScenarioFile file = load(options);
    if (!file.market) {
        std::cerr << "price: scenario file has no market section\n";
        return kExitInvalidInput;
    }
    if (classify_assumptions(file.system, file.make_hook()) !=
        AssumptionClass::A2Contractive) {
        std::cerr << "price: liabilities must classify contractive (A2), file classifies "
                  << class_name(classify_assumptions(file.system, file.make_hook())) << "\n";
        return kExitUnknownClass;
    }

    PricingConfig config;
    config.paths = options.paths;
    config.seed = options.seed.value_or(file.solver.seed);
    config.solver = resolve_solver(file, options);
    config.workers = options.parallel ? 0 : 1;
    config.reproducible = options.reproducible;
    config.metric_mode = options.metric_mode;

    PriceReport priced = price(file.system, *file.market, config);

    const auto m = file.system.seniorities();
    if (options.format == Format::Json) {
        ordered_json doc;
        doc["command"] = "price";
        doc["paths"] = priced.paths;
        doc["seed"] = priced.seed;
        doc["metric_mode"] = metric_mode_name(priced.metric_mode);
        ordered_json components = ordered_json::array();
        for (std::size_t level = 0; level < m; ++level) {
            for (Eigen::Index k = 0; k < file.system.firms(); ++k) {
                ordered_json item;
                item["component"] = "r" + std::to_string(level + 1);
                item["firm"] = k;
                item["mean"] = priced.means.r[level][k];
                item["std_error"] = priced.std_errors.r[level][k];
                components.push_back(std::move(item));
            }
        }
        for (Eigen::Index k = 0; k < file.system.firms(); ++k) {
            ordered_json item;
            item["component"] = "s";
            item["firm"] = k;
            item["mean"] = priced.means.s[k];
            item["std_error"] = priced.std_errors.s[k];
            components.push_back(std::move(item));
        }
        doc["components"] = std::move(components);
        doc["expected_L"] = priced.expected_L;
        doc["expected_I"] = priced.expected_I;
        std::cout << doc.dump(2) << "\n";
        return kExitOk;
    }

    Table table;
    table.header = {"component", "firm", "mean", "std_error"};
    for (std::size_t level = 0; level < m; ++level) {
        for (Eigen::Index k = 0; k < file.system.firms(); ++k) {
            table.rows.push_back({"r" + std::to_string(level + 1), std::to_string(k),
                                  num(priced.means.r[level][k]),
                                  num(priced.std_errors.r[level][k])});
        }
    }
    for (Eigen::Index k = 0; k < file.system.firms(); ++k) {
        table.rows.push_back(
            {"s", std::to_string(k), num(priced.means.s[k]), num(priced.std_errors.s[k])});
    }
    table.rows.push_back({"E[L]", "", num(priced.expected_L), ""});
    table.rows.push_back({"E[I]", "", num(priced.expected_I), ""});
    if (options.format == Format::Csv) {
        table.print_csv(std::cout);
    } else {
        table.print_text(std::cout);
        std::cout << "paths " << priced.paths << ", seed " << priced.seed << ", metric mode "
                  << metric_mode_name(priced.metric_mode) << "\n";
    }
    return kExitOk;
}

} // namespace xos::cli
