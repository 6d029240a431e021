#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace systolic::cli {

enum ExitCode : int { ok = 0, verification_failure = 1, usage_error = 2, numerical_breakdown = 3 };

/// Runs the command line `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct UtilisationReport {
    std::int64_t first_tick = 0;
    std::int64_t last_tick = -1;
    std::size_t cells = 0;
    double mean = 0;           ///< mean active fraction over cells
    double diagonal_mean = 0;  ///< over cells with row == col (grid traces)
    std::vector<std::pair<std::pair<int, int>, double>> per_cell;
};

/// Utilisation of a newline-delimited trace; throws std::runtime_error on
/// malformed records.
UtilisationReport trace_stats(std::istream& in);

}  // namespace systolic::cli
