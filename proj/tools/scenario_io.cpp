#include "scenario_io.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace xos::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ParseError("scenario file: " + where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
    return *it;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            fail(where, "unknown field '" + item.key() + "'");
        }
    }
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(where, "expected a finite number");
    return x;
}

Eigen::Index integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<Eigen::Index>();
}

Eigen::VectorXd vector(const json& v, Eigen::Index size, const std::string& where) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != size) {
        fail(where, "expected an array of " + std::to_string(size) + " numbers");
    }
    Eigen::VectorXd out(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        out[i] = number(v[static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]");
    }
    return out;
}

Eigen::MatrixXd matrix(const json& v, Eigen::Index rows, Eigen::Index cols,
                       const std::string& where) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows) {
        fail(where, "expected " + std::to_string(rows) + " rows");
    }
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        out.row(i) =
            vector(v[static_cast<std::size_t>(i)], cols, where + "[" + std::to_string(i) + "]")
                .transpose();
    }
    return out;
}

LiabilitySpec parse_spec(const json& v, Eigen::Index assets, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of payoff terms");
    std::vector<PayoffTerm> terms;
    terms.reserve(v.size());
    for (std::size_t t = 0; t < v.size(); ++t) {
        const std::string term_where = where + "[" + std::to_string(t) + "]";
        const json& term = v[t];
        const json& type = field(term, "type", term_where);
        if (!type.is_string()) fail(term_where, "field 'type' must be a string");
        const std::string kind = type.get<std::string>();
        if (kind == "constant") {
            reject_unknown(term, {"type", "nominal"}, term_where);
            terms.push_back(
                ConstantTerm{number(field(term, "nominal", term_where), term_where)});
        } else if (kind == "call" || kind == "put") {
            reject_unknown(term, {"type", "weights", "strike", "size"}, term_where);
            Eigen::VectorXd weights =
                vector(field(term, "weights", term_where), assets, term_where + ".weights");
            const double strike = number(field(term, "strike", term_where), term_where);
            const double size = number(field(term, "size", term_where), term_where);
            if (kind == "call") {
                terms.push_back(CallTerm{std::move(weights), strike, size});
            } else {
                terms.push_back(PutTerm{std::move(weights), strike, size});
            }
        } else {
            fail(term_where, "unknown term type '" + kind + "'");
        }
    }
    try {
        return LiabilitySpec(std::move(terms));
    } catch (const Error& err) {
        fail(where, err.what());
    }
}

FirmSystem parse_system(const json& v) {
    const std::string where = "system";
    reject_unknown(v,
                   {"firms", "seniorities", "assets", "equity_ownership",
                    "liability_ownership", "asset_ownership", "liabilities"},
                   where);
    const Eigen::Index n = integer(field(v, "firms", where), where + ".firms");
    const Eigen::Index m = integer(field(v, "seniorities", where), where + ".seniorities");
    const Eigen::Index q = integer(field(v, "assets", where), where + ".assets");
    if (n < 1) fail(where + ".firms", "must be at least one");
    if (m < 1) fail(where + ".seniorities", "must be at least one");
    if (q < 1) fail(where + ".assets", "must be at least one");

    OwnershipMatrix equity(matrix(field(v, "equity_ownership", where), n, n,
                                  where + ".equity_ownership"),
                           MatrixKind::StrictSubstochastic);
    const json& lo = field(v, "liability_ownership", where);
    if (!lo.is_array() || static_cast<Eigen::Index>(lo.size()) != m) {
        fail(where + ".liability_ownership", "expected one matrix per seniority level");
    }
    std::vector<OwnershipMatrix> liability;
    liability.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        liability.emplace_back(
            matrix(lo[static_cast<std::size_t>(i)], n, n,
                   where + ".liability_ownership[" + std::to_string(i) + "]"),
            MatrixKind::StrictSubstochastic);
    }
    OwnershipMatrix asset(
        matrix(field(v, "asset_ownership", where), n, q, where + ".asset_ownership"),
        MatrixKind::ColumnBounded);

    const json& grid = field(v, "liabilities", where);
    if (!grid.is_array() || static_cast<Eigen::Index>(grid.size()) != n) {
        fail(where + ".liabilities", "expected one row per firm");
    }
    std::vector<std::vector<LiabilitySpec>> specs;
    specs.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        const json& row = grid[static_cast<std::size_t>(k)];
        const std::string row_where = where + ".liabilities[" + std::to_string(k) + "]";
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) {
            fail(row_where, "expected one spec per seniority level");
        }
        std::vector<LiabilitySpec> cells;
        cells.reserve(static_cast<std::size_t>(m));
        for (Eigen::Index i = 0; i < m; ++i) {
            cells.push_back(parse_spec(row[static_cast<std::size_t>(i)], q,
                                       row_where + "[" + std::to_string(i) + "]"));
        }
        specs.push_back(std::move(cells));
    }
    try {
        return FirmSystem(std::move(equity), std::move(liability), std::move(asset),
                          std::move(specs));
    } catch (const Error& err) {
        fail(where, err.what());
    }
}

MarketModel parse_market(const json& v, Eigen::Index assets) {
    const std::string where = "market";
    reject_unknown(v, {"spot", "vols", "correlation", "rate", "maturity", "numeraire"},
                   where);
    MarketModel model;
    model.spot = vector(field(v, "spot", where), assets, where + ".spot");
    model.vols = vector(field(v, "vols", where), assets, where + ".vols");
    model.correlation =
        matrix(field(v, "correlation", where), assets, assets, where + ".correlation");
    model.rate = number(field(v, "rate", where), where + ".rate");
    model.maturity = number(field(v, "maturity", where), where + ".maturity");
    if (v.contains("numeraire")) {
        const json& numeraire = v["numeraire"];
        if (!numeraire.is_string() || numeraire.get<std::string>() != "money-market") {
            fail(where + ".numeraire", "only 'money-market' is supported");
        }
    }
    return model;
}

SolverConfig parse_solver(const json& v) {
    const std::string where = "solver";
    reject_unknown(v, {"tol", "max_iter", "starts", "seed", "dedup_threshold"}, where);
    SolverConfig config;
    if (v.contains("tol")) {
        config.tol = number(v["tol"], where + ".tol");
        if (config.tol <= 0.0) fail(where + ".tol", "must be positive");
    }
    if (v.contains("max_iter")) {
        const Eigen::Index it = integer(v["max_iter"], where + ".max_iter");
        if (it < 1) fail(where + ".max_iter", "must be at least one");
        config.max_iter = static_cast<std::size_t>(it);
    }
    if (v.contains("starts")) {
        const Eigen::Index st = integer(v["starts"], where + ".starts");
        if (st < 1) fail(where + ".starts", "must be at least one");
        config.starts = static_cast<std::size_t>(st);
    }
    if (v.contains("seed")) {
        if (!v["seed"].is_number_integer()) fail(where + ".seed", "expected an integer");
        config.seed = v["seed"].get<std::uint64_t>();
    }
    if (v.contains("dedup_threshold")) {
        config.dedup_threshold = number(v["dedup_threshold"], where + ".dedup_threshold");
        if (config.dedup_threshold <= 0.0) fail(where + ".dedup_threshold", "must be positive");
    }
    return config;
}

HookSpec parse_hook(const json& v, Eigen::Index firms, std::size_t seniorities) {
    const std::string where = "hook";
    reject_unknown(v, {"name", "shift", "source_firms"}, where);
    HookSpec hook;
    const json& name = field(v, "name", where);
    if (!name.is_string()) fail(where + ".name", "expected a string");
    hook.name = name.get<std::string>();
    if (hook.name != "recovery_gap_squared") {
        fail(where + ".name", "unknown hook '" + hook.name + "'");
    }
    if (seniorities != 1) {
        fail(where, "recovery_gap_squared requires a single seniority level");
    }
    hook.shift = number(field(v, "shift", where), where + ".shift");
    const json& sources = field(v, "source_firms", where);
    if (!sources.is_array() || static_cast<Eigen::Index>(sources.size()) != firms) {
        fail(where + ".source_firms", "expected one source firm per firm");
    }
    for (std::size_t k = 0; k < sources.size(); ++k) {
        const Eigen::Index src =
            integer(sources[k], where + ".source_firms[" + std::to_string(k) + "]");
        if (src < 0 || src >= firms) {
            fail(where + ".source_firms[" + std::to_string(k) + "]", "firm index out of range");
        }
        hook.source_firms.push_back(src);
    }
    return hook;
}

ordered_json dump_matrix(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json dump_vector(const Eigen::VectorXd& v) {
    ordered_json out = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

ordered_json dump_spec(const LiabilitySpec& spec) {
    ordered_json terms = ordered_json::array();
    for (const auto& term : spec.terms()) {
        ordered_json t;
        if (const auto* c = std::get_if<ConstantTerm>(&term)) {
            t["type"] = "constant";
            t["nominal"] = c->nominal;
        } else if (const auto* call = std::get_if<CallTerm>(&term)) {
            t["type"] = "call";
            t["weights"] = dump_vector(call->weights);
            t["strike"] = call->strike;
            t["size"] = call->size;
        } else {
            const auto& put = std::get<PutTerm>(term);
            t["type"] = "put";
            t["weights"] = dump_vector(put.weights);
            t["strike"] = put.strike;
            t["size"] = put.size;
        }
        terms.push_back(std::move(t));
    }
    return terms;
}

} // namespace

LiabilityEvaluator ScenarioFile::make_hook() const {
    if (!hook.present()) return {};
    const double shift = hook.shift;
    const std::vector<Eigen::Index> sources = hook.source_firms;
    return [shift, sources](const FirmSystem& sys, const StateVector& state,
                            const Scenario&) {
        Eigen::MatrixXd dues(1, sys.firms());
        for (Eigen::Index k = 0; k < sys.firms(); ++k) {
            const double gap = state.r[0][sources[static_cast<std::size_t>(k)]] - shift;
            dues(0, k) = gap * gap;
        }
        return dues;
    };
}

ScenarioFile parse_scenario_file(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& err) {
        throw ParseError(std::string("scenario file: invalid JSON: ") + err.what());
    }
    reject_unknown(doc, {"version", "system", "scenarios", "market", "solver", "hook"},
                   "document");
    const json& version = field(doc, "version", "document");
    if (!version.is_number_integer() || version.get<int>() != 1) {
        fail("document.version", "only version 1 is supported");
    }

    ScenarioFile file(parse_system(field(doc, "system", "document")));
    file.version = 1;

    const json& scenarios = field(doc, "scenarios", "document");
    if (!scenarios.is_array() || scenarios.empty()) {
        fail("document.scenarios", "expected a non-empty array");
    }
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const std::string where = "scenarios[" + std::to_string(i) + "]";
        Eigen::VectorXd a = vector(scenarios[i], file.system.assets(), where);
        if ((a.array() < 0.0).any()) fail(where, "asset values must be non-negative");
        file.scenarios.emplace_back(std::move(a));
    }

    if (doc.contains("market")) {
        file.market = parse_market(doc["market"], file.system.assets());
    }
    if (doc.contains("solver")) file.solver = parse_solver(doc["solver"]);
    if (doc.contains("hook")) {
        file.hook = parse_hook(doc["hook"], file.system.firms(), file.system.seniorities());
    }
    return file;
}

std::string serialize_scenario_file(const ScenarioFile& file) {
    ordered_json doc;
    doc["version"] = file.version;

    ordered_json system;
    system["firms"] = file.system.firms();
    system["seniorities"] = static_cast<Eigen::Index>(file.system.seniorities());
    system["assets"] = file.system.assets();
    system["equity_ownership"] = dump_matrix(file.system.equity_ownership().entries);
    ordered_json lo = ordered_json::array();
    for (const auto& d : file.system.liability_ownerships()) {
        lo.push_back(dump_matrix(d.entries));
    }
    system["liability_ownership"] = std::move(lo);
    system["asset_ownership"] = dump_matrix(file.system.asset_ownership().entries);
    ordered_json grid = ordered_json::array();
    for (Eigen::Index k = 0; k < file.system.firms(); ++k) {
        ordered_json row = ordered_json::array();
        for (std::size_t i = 0; i < file.system.seniorities(); ++i) {
            row.push_back(dump_spec(file.system.liability(k, i)));
        }
        grid.push_back(std::move(row));
    }
    system["liabilities"] = std::move(grid);
    doc["system"] = std::move(system);

    ordered_json scenarios = ordered_json::array();
    for (const auto& scenario : file.scenarios) {
        scenarios.push_back(dump_vector(scenario.assets));
    }
    doc["scenarios"] = std::move(scenarios);

    if (file.market) {
        ordered_json market;
        market["spot"] = dump_vector(file.market->spot);
        market["vols"] = dump_vector(file.market->vols);
        market["correlation"] = dump_matrix(file.market->correlation);
        market["rate"] = file.market->rate;
        market["maturity"] = file.market->maturity;
        market["numeraire"] = "money-market";
        doc["market"] = std::move(market);
    }

    ordered_json solver;
    solver["tol"] = file.solver.tol;
    solver["max_iter"] = file.solver.max_iter;
    solver["starts"] = file.solver.starts;
    solver["seed"] = file.solver.seed;
    solver["dedup_threshold"] = file.solver.dedup_threshold;
    doc["solver"] = std::move(solver);

    if (file.hook.present()) {
        ordered_json hook;
        hook["name"] = file.hook.name;
        hook["shift"] = file.hook.shift;
        ordered_json sources = ordered_json::array();
        for (const auto src : file.hook.source_firms) sources.push_back(src);
        hook["source_firms"] = std::move(sources);
        doc["hook"] = std::move(hook);
    }
    return doc.dump(2) + "\n";
}

} // namespace xos::cli
