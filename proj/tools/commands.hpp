#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "xos/pricing.hpp"

namespace xos::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 1;
inline constexpr int kExitUnknownClass = 2;
inline constexpr int kExitSolverFailure = 3;

enum class Format { Text, Json, Csv };

// Options shared by the subcommands; unset optionals fall back to the
// scenario file's solver section, which falls back to built-in defaults.
struct CommonOptions {
    std::string input = "-";
    Format format = Format::Text;
    std::optional<double> tol;
    std::optional<std::size_t> max_iter;
    std::optional<std::size_t> starts;
    std::optional<std::uint64_t> seed;
    std::size_t paths = 100000;
    bool parallel = false;
    bool reproducible = false;
    MetricMode metric_mode = MetricMode::Expectation;
};

int cmd_check(const CommonOptions& options);
int cmd_solve(const CommonOptions& options);
int cmd_scan(const CommonOptions& options);
int cmd_metrics(const CommonOptions& options);
int cmd_price(const CommonOptions& options);

} // namespace xos::cli
