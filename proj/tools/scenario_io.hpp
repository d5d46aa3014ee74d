#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xos/xos.hpp"

namespace xos::cli {

// Optional built-in liability hook a file may name. The only registered
// hook, "recovery_gap_squared", prices the state-dependent due
// d_k = (r_{source_firms[k]} - shift)^2 for single-seniority systems and
// exists so non-uniqueness studies can run from plain files. Hooked files
// classify Unknown.
struct HookSpec {
    std::string name;
    double shift = 0.0;
    std::vector<Eigen::Index> source_firms;

    bool present() const { return !name.empty(); }
};

// In-memory form of the versioned scenario document: the firm system, at
// least one asset scenario, and optional market/solver/hook sections.
struct ScenarioFile {
    int version = 1;
    FirmSystem system;
    std::vector<Scenario> scenarios;
    std::optional<MarketModel> market;
    SolverConfig solver;
    HookSpec hook;

    explicit ScenarioFile(FirmSystem sys) : system(std::move(sys)) {}

    // Evaluator for the named hook; an empty function when none is set.
    LiabilityEvaluator make_hook() const;
};

// Parses a version-1 JSON document. The schema is strict: unknown fields,
// a missing version, or any dimension disagreement raise ParseError with
// the offending location in the message.
ScenarioFile parse_scenario_file(const std::string& text);

// Canonical serialization with stable key order; parse(serialize(f))
// reproduces f exactly.
std::string serialize_scenario_file(const ScenarioFile& file);

} // namespace xos::cli
