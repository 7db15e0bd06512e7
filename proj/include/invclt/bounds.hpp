#pragma once

// Explicit error bounds, the truncation operator and the lattice
// lower-bound family.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "invclt/array_core.hpp"

namespace invclt {

inline constexpr double kK1 = 379.0;
inline constexpr double kKInf = 61'702'446.0;
/// Regime of the conditional truncation inequalities.
inline constexpr double kEpsilon0 = 1.0 / 90.0;
inline constexpr int kN0 = 1000;

/// K_p = 379^{1/p} * 61702446^{1-1/p}; p may be kInfinity. Throws InvalidP.
double kp(double p);

struct BoundReport {
    int n = 0;
    double beta = 0.0;
    std::vector<std::pair<double, double>> kp;     // (p, K_p)
    std::vector<std::pair<double, double>> bound;  // (p, K_p beta / n)
    double l1_refined = 0.0;
    double gap_bound = 0.0;
    bool valid = false;         // n >= 9
    bool valid_strict = false;  // n > 9
};

BoundReport theorem_bounds(int n, double beta, std::span<const double> p_list);
BoundReport theorem_bounds(const CenteredArray& d, std::span<const double> p_list);

/// Outcome of one inequality check; `applicable` is false when the
/// inequality is only claimed under preconditions that do not hold.
struct InequalityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool applicable = true;
    bool holds = true;
};

struct TruncationResult {
    SquareMatrix d_prime;
    std::vector<std::pair<int, int>> gamma;
    std::vector<std::vector<int>> gamma_rows;
    double beta = 0.0;  // beta of the input array
    std::vector<double> row_cubes;  // sum_j |d_ij|^3
    double dprime_total = 0.0;
    std::vector<double> dprime_row_sums;
    double mu_prime = 0.0;
    double sigma2_prime = 0.0;
    std::optional<double> beta_prime;
    double collision_prob_bound = 0.0;  // 16 beta / n
    bool preconditions = false;         // beta/n <= 1/90 and n >= 1000
    std::vector<InequalityCheck> checks;

    /// True when every applicable check holds.
    bool all_hold() const noexcept;
};

TruncationResult truncate(const CenteredArray& d);

struct CollisionReport {
    double probability = 0.0;  // P(pi hits Gamma) under uniform pi
    double bound = 0.0;
    /// Involutions with Y_{D'} != Y_D that avoid Gamma (must be zero).
    std::uint64_t identity_violations = 0;
};

/// Exact over Pi_n; throws CapExceeded beyond `cap`.
CollisionReport exact_collision(const CenteredArray& d, const TruncationResult& t, int cap = 12);

/// Entries in {-1, 0, 1}, every row sum zero.
SymmetricArray lower_bound_array(int n);

struct LowerBoundReport {
    int n = 0;
    std::size_t draws = 0;
    double sigma = 0.0;
    double sigma2_formula = 0.0;
    double floor = 0.0;  // (1 - eps)/2 * phi(1/sigma) / sigma at eps = 0.1
    double ks = 0.0;
    double slack = 0.0;  // DKW at confidence 0.999
    double beta_over_n = 0.0;
    bool lattice_ok = true;  // every sampled Y an even integer
    bool passes = false;     // ks >= floor - slack
};

inline constexpr double kLowerBoundEpsilon = 0.1;
inline constexpr double kLowerBoundConfidence = 0.999;

/// sqrt(ln(2/(1 - confidence)) / (2m)).
double dkw_slack(std::size_t m, double confidence = kLowerBoundConfidence);

LowerBoundReport lower_bound_experiment(int n, std::size_t m, std::uint64_t seed, unsigned threads = 0);

nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const TruncationResult& r);
nlohmann::json to_json(const LowerBoundReport& r);
std::string lower_bound_csv_header();
std::string lower_bound_csv_row(const LowerBoundReport& r);

}  // namespace invclt
