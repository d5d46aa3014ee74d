#include <doctest.h>

#include <string>

#include "scenario_io.hpp"

using namespace xos;
using xos::cli::parse_scenario_file;
using xos::cli::serialize_scenario_file;

namespace {

const char* kBondFile = R"({
  "version": 1,
  "system": {
    "firms": 2,
    "seniorities": 1,
    "assets": 2,
    "equity_ownership": [[0, 0.5], [0.5, 0]],
    "liability_ownership": [[[0, 0.25], [0.25, 0]]],
    "asset_ownership": [[1, 0], [0, 1]],
    "liabilities": [
      [[{"type": "constant", "nominal": 100},
        {"type": "call", "weights": [0, 1], "strike": 20, "size": 1.5}]],
      [[{"type": "put", "weights": [0.5, 1], "strike": 30, "size": 2}]]
    ]
  },
  "scenarios": [[100, 100], [50, 50]],
  "market": {
    "spot": [100, 40],
    "vols": [0.2, 0.3],
    "correlation": [[1, 0.1], [0.1, 1]],
    "rate": 0.05,
    "maturity": 1,
    "numeraire": "money-market"
  },
  "solver": {"tol": 1e-11, "max_iter": 500000, "starts": 24, "seed": 7}
})";

} // namespace

TEST_CASE("parse reads dimensions, matrices and terms") {
    const auto file = parse_scenario_file(kBondFile);
    CHECK(file.system.firms() == 2);
    CHECK(file.system.seniorities() == 1);
    CHECK(file.system.assets() == 2);
    CHECK(file.system.equity_ownership().entries(0, 1) == 0.5);
    CHECK(file.system.liability_ownership(0).entries(1, 0) == 0.25);
    CHECK(file.scenarios.size() == 2);
    CHECK(file.scenarios[1].assets[0] == 50.0);
    REQUIRE(file.market.has_value());
    CHECK(file.market->rate == 0.05);
    CHECK(file.solver.tol == 1e-11);
    CHECK(file.solver.starts == 24);
    CHECK(file.solver.seed == 7);
    CHECK_FALSE(file.hook.present());
    CHECK(file.system.liability(0, 0).terms().size() == 2);
    CHECK(file.system.liability(1, 0).terms().size() == 1);
}

TEST_CASE("round-trip preserves the document") {
    const auto first = parse_scenario_file(kBondFile);
    const std::string canonical = serialize_scenario_file(first);
    const auto second = parse_scenario_file(canonical);
    CHECK(serialize_scenario_file(second) == canonical);
    CHECK(second.system.firms() == first.system.firms());
    CHECK((second.system.equity_ownership().entries -
           first.system.equity_ownership().entries)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(second.scenarios.size() == first.scenarios.size());
    REQUIRE(second.market.has_value());
    CHECK(second.market->spot == first.market->spot);
    CHECK(second.solver.tol == first.solver.tol);
}

TEST_CASE("unknown fields are rejected everywhere") {
    CHECK_THROWS_AS(parse_scenario_file(R"({"version": 1, "mystery": 2})"), ParseError);
    std::string with_extra(kBondFile);
    with_extra.replace(with_extra.find("\"firms\""), 7, "\"firm_count\"");
    CHECK_THROWS_AS(parse_scenario_file(with_extra), ParseError);
}

TEST_CASE("version is mandatory and pinned") {
    CHECK_THROWS_AS(parse_scenario_file(R"({"scenarios": []})"), ParseError);
    std::string v2(kBondFile);
    v2.replace(v2.find("\"version\": 1"), 12, "\"version\": 2");
    CHECK_THROWS_AS(parse_scenario_file(v2), ParseError);
}

TEST_CASE("dimension mismatches are parse errors") {
    std::string wide(kBondFile);
    wide.replace(wide.find("[[1, 0], [0, 1]]"), 16, "[[1, 0, 0], [0, 1, 0]]");
    CHECK_THROWS_AS(parse_scenario_file(wide), ParseError);

    std::string missing_row(kBondFile);
    missing_row.replace(missing_row.find("[[0, 0.5], [0.5, 0]]"), 20, "[[0, 0.5]]");
    CHECK_THROWS_AS(parse_scenario_file(missing_row), ParseError);
}

TEST_CASE("scenario vectors must be non-negative and well-sized") {
    std::string negative(kBondFile);
    negative.replace(negative.find("[100, 100]"), 10, "[-1, 100]");
    CHECK_THROWS_AS(parse_scenario_file(negative), ParseError);

    std::string short_vec(kBondFile);
    short_vec.replace(short_vec.find("[100, 100]"), 10, "[100]");
    CHECK_THROWS_AS(parse_scenario_file(short_vec), ParseError);
}

TEST_CASE("malformed JSON surfaces as ParseError") {
    CHECK_THROWS_AS(parse_scenario_file("{"), ParseError);
    CHECK_THROWS_AS(parse_scenario_file(""), ParseError);
}

TEST_CASE("hook section parses and produces an evaluator") {
    const char* hooked = R"({
      "version": 1,
      "system": {
        "firms": 2,
        "seniorities": 1,
        "assets": 2,
        "equity_ownership": [[0, 0], [0, 0]],
        "liability_ownership": [[[0, 0.8], [0.8, 0]]],
        "asset_ownership": [[1, 0], [0, 1]],
        "liabilities": [
          [[{"type": "constant", "nominal": 0}]],
          [[{"type": "constant", "nominal": 0}]]
        ]
      },
      "scenarios": [[1, 1]],
      "hook": {"name": "recovery_gap_squared", "shift": 2, "source_firms": [1, 0]}
    })";
    const auto file = parse_scenario_file(hooked);
    REQUIRE(file.hook.present());
    const LiabilityEvaluator eval = file.make_hook();
    REQUIRE(static_cast<bool>(eval));
    StateVector state = StateVector::zero(2, 1);
    state.r[0] << 5.0, 3.0;
    const Eigen::MatrixXd dues =
        eval(file.system, state, Scenario(Eigen::Vector2d(1.0, 1.0)));
    CHECK(dues(0, 0) == doctest::Approx(1.0));
    CHECK(dues(0, 1) == doctest::Approx(9.0));

    std::string unknown_hook(hooked);
    unknown_hook.replace(unknown_hook.find("recovery_gap_squared"), 20, "mystery_hook_name_xx");
    CHECK_THROWS_AS(parse_scenario_file(unknown_hook), ParseError);
}

TEST_CASE("market section validates its own fields") {
    std::string bad_numeraire(kBondFile);
    bad_numeraire.replace(bad_numeraire.find("money-market"), 12, "asset-number");
    CHECK_THROWS_AS(parse_scenario_file(bad_numeraire), ParseError);

    std::string bad_tol(kBondFile);
    bad_tol.replace(bad_tol.find("1e-11"), 5, "0.000");
    CHECK_THROWS_AS(parse_scenario_file(bad_tol), ParseError);
}
