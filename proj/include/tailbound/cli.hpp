#pragma once

// Command implementations behind the `tailbound` executable. Each command
// returns its full output text and exit status so it can be driven from tests.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tailbound/dist_model.hpp"
#include "tailbound/sharp_bounds.hpp"

namespace tailbound::cli {

enum ExitCode : int {
    kOk = 0,
    kGenericError = 1,
    kParseError = 2,
    kHypothesisViolation = 3,
    kVerificationFailure = 4,
};

enum class OutputFormat { csv, json };

/// "a:b:steps" -> steps points from a to b inclusive ("a" alone -> {a}).
std::vector<double> parse_grid(const std::string& spec);

/// Every bound group `cmd_bounds` knows, in output order.
const std::vector<std::string>& bound_groups();

struct SweepSpec {
    std::vector<double> x_grid;
    /// Empty means all groups.
    std::set<std::string> bounds_selected;
    OutputFormat output_format = OutputFormat::csv;
    BerryEsseenConstants constants;
    C3Policy c3_policy = C3Policy::universal;
    double delta = 1.0;
    bool strict = true;
    /// Overrides the default B (B_ratio) used by the moment-based theorems.
    std::optional<double> B;
};

struct CommandResult {
    int exit_code = kOk;
    std::string output;
    std::string diagnostics;
};

/// Formats a double with 17 significant digits; empty for NaN.
std::string format_number(double v);

CommandResult cmd_bounds(const SumModel& model, const SweepSpec& sweep);

/// Rademacher ratio sweep. x_max <= 0 selects 0.606 sqrt(n) per n.
CommandResult cmd_figure1(const std::vector<std::int64_t>& n_list, double x_max, int points);

struct VerifySpec {
    std::optional<double> B;
    double delta = 1.0;
    BerryEsseenConstants constants;
    std::vector<double> lambda_grid;
    /// Points per theorem range for the oracle containment sweep.
    int x_points = 25;
};

CommandResult cmd_verify(const SumModel& model, const VerifySpec& spec);

CommandResult cmd_rate(const SumModel& model, const std::vector<double>& y_grid);

enum class McMethod { mc, tilted };

CommandResult cmd_mc(const SumModel& model, double x, std::int64_t samples, std::uint64_t seed,
                     McMethod method, bool strict);

}  // namespace tailbound::cli
