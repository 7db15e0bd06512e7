#pragma once

// Self-verification suite: every exact oracle of the library run on
// seeded random arrays, one record per check.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "invclt/array_core.hpp"
#include "invclt/rng.hpp"

namespace invclt {

/// Symmetric array with standard-normal entries, standardized.
CenteredArray random_centered_array(int n, Rng& rng);

/// Symmetric array with independent +-1 entries, standardized. Its beta
/// sits close to the Hoelder minimum.
CenteredArray random_sign_array(int n, Rng& rng);

struct CheckRecord {
    std::string family;
    std::string name;
    int n = 0;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = kDefaultSeed;
    std::optional<std::string> only;  // family name
    unsigned threads = 0;
};

/// Family names in execution order.
const std::vector<std::string>& check_families();

/// Throws ParseError for an unknown `only` family.
std::vector<CheckRecord> run_checks(const VerifyOptions& options);

nlohmann::json to_json(const CheckRecord& r);

/// Counts of each of the |Pi_n| involutions (canonical order) among m
/// sampled draws; chunked like every other Monte Carlo loop.
std::vector<std::uint64_t> sampler_cell_counts(int n, std::size_t m, std::uint64_t seed, unsigned threads = 0);

/// Pearson statistic against the uniform law.
double chi_square_uniform(const std::vector<std::uint64_t>& counts);

/// Upper quantile of chi-square with `dof` degrees of freedom.
double chi_square_quantile(double dof, double level);

}  // namespace invclt
