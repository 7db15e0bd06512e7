#pragma once

// Command-line front end. Each run_* returns the exit code and the report
// text instead of writing to stdout, so tests can call them directly.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "invclt/rng.hpp"

namespace invclt {

enum ExitCode : int {
    kExitOk = 0,
    kExitVerifyFailed = 1,
    kExitInput = 2,
    kExitDegenerate = 3,
};

inline constexpr int kSchemaVersion = 1;
inline constexpr int kDefaultExactCap = 12;

struct RunConfig {
    std::string command;
    std::optional<std::filesystem::path> input;
    std::uint64_t seed = kDefaultSeed;
    std::size_t draws = 100'000;
    std::vector<double> p_list = {1.0, 2.0, std::numeric_limits<double>::infinity()};
    bool symmetrize = false;
    int cap = kDefaultExactCap;  // exact mode when n <= cap
    std::optional<std::string> only;
    std::optional<std::filesystem::path> emit_cdf;
    std::size_t dump_draws = 0;
    std::filesystem::path dump_file = "zero_bias_draws.json";
    unsigned threads = 0;
    std::vector<int> n_list;
    std::optional<std::filesystem::path> output;
    std::optional<std::filesystem::path> csv;
};

struct RunResult {
    int exit_code = kExitOk;
    std::string output;  // report body (JSON or CSV)
    std::string error;   // diagnostic for non-zero exits
};

/// "1,2,inf" -> {1, 2, inf}; throws InvalidP or ParseError.
std::vector<double> parse_p_list(std::string_view text);

RunResult run_analyze(const RunConfig& config);
RunResult run_verify(const RunConfig& config);
RunResult run_simulate(const RunConfig& config);
RunResult run_lowerbound(const RunConfig& config);

/// Parses argv, dispatches, writes the report to --output or `out`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace invclt
