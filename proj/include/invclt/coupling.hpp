#pragma once

// Stein exchangeable pair, square-bias quadruple law, the ten-case
// construction of pi-dagger, and the zero-bias variable W*.
//
// Permutations are 0-based image arrays. Products compose right to left:
// (sigma tau)(x) = sigma(tau(x)), so right-multiplying by a transposition
// (a b) swaps the entries at positions a and b.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "invclt/array_core.hpp"
#include "invclt/involution.hpp"
#include "invclt/rng.hpp"

namespace invclt {

/// (I†, J†, K†, L†): pairs (I†,K†) and (J†,L†) become cycles of pi-dagger.
struct Quad {
    int i = 0;
    int j = 0;
    int k = 0;
    int l = 0;

    bool distinct() const noexcept { return i != j && i != k && i != l && j != k && j != l && k != l; }
    friend bool operator==(const Quad&, const Quad&) = default;
};

// ---- permutation algebra -------------------------------------------------

/// perm := perm * (a b). The degenerate (a a) is the identity.
inline void right_multiply_transposition(std::span<int> perm, int a, int b) noexcept {
    if (a != b) std::swap(perm[a], perm[b]);
}

/// perm := perm * alpha, alpha = (i base(j)) (j base(i)).
inline void right_multiply_alpha(std::span<int> perm, std::span<const int> base, int i, int j) noexcept {
    const int bi = base[i];
    const int bj = base[j];
    right_multiply_transposition(perm, i, bj);
    right_multiply_transposition(perm, j, bi);
}

/// pi * alpha^pi_{i,j}: replaces cycles (i,pi(i)), (j,pi(j)) by (i,j),
/// (pi(i),pi(j)). Returns pi unchanged when (i,j) is already a cycle.
Involution alpha_compose(const Involution& pi, int i, int j);

// ---- Stein pair ------------------------------------------------------------

/// 2(d(I,pi(I)) + d(J,pi(J)) - d(I,J) - d(pi(I),pi(J)))
double stein_difference(const SquareMatrix& d, std::span<const int> pi, int i, int j) noexcept;

struct SteinPairDraw {
    Involution pi;
    Involution pi_prime;
    int I = 0;
    int J = 0;
    double W = 0.0;
    double W_prime = 0.0;
};

/// lambda in E(W - W' | W) = lambda W
inline double stein_lambda(int n) { return 4.0 / n; }

SteinPairDraw stein_pair_draw(const CenteredArray& d, Rng& rng);

// ---- square-bias law -------------------------------------------------------

/// 1 / (2 (n-1)^2 (n-3))
double square_bias_constant(int n);

/// c_n [d(i,k) + d(j,l) - d(i,j) - d(k,l)]^2, zero unless distinct.
double square_bias_weight(const SquareMatrix& d, const Quad& q) noexcept;

inline constexpr int kDefaultTableCap = 48;

/// Materialized p(i,j,k,l) over all n^4 index tuples with a cumulative
/// table for inversion sampling.
class QuadrupleTable {
public:
    explicit QuadrupleTable(const CenteredArray& d, int cap = kDefaultTableCap);

    int n() const noexcept { return n_; }
    double c_n() const noexcept { return c_n_; }
    double weight(const Quad& q) const noexcept;
    /// Sum of all weights (1 up to rounding).
    double total() const noexcept { return cumulative_.back(); }
    Quad sample(Rng& rng) const;
    const SquareMatrix& array() const noexcept { return d_; }

    /// Visits every quadruple with positive weight in lexicographic order.
    template <class Fn>
    void for_each_positive(Fn&& fn) const {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    for (int l = 0; l < n_; ++l) {
                        const Quad q{i, j, k, l};
                        const double w = square_bias_weight(d_, q);
                        if (w > 0.0) fn(q, w);
                    }
    }

private:
    Quad unflatten(std::size_t idx) const noexcept;

    int n_;
    double c_n_;
    SquareMatrix d_;
    std::vector<double> cumulative_;
};

QuadrupleTable square_bias_table(const CenteredArray& d, int cap = kDefaultTableCap);

/// Draws from p(.) through the table when n <= cap, otherwise by rejection
/// from uniform distinct quadruples accepted with probability
/// [d(i,k) + d(j,l) - d(i,j) - d(k,l)]^2 / (4 max|d|)^2.
class QuadrupleSampler {
public:
    explicit QuadrupleSampler(const CenteredArray& d, int table_cap = kDefaultTableCap);

    Quad sample(Rng& rng) const;
    bool uses_table() const noexcept { return table_.has_value(); }
    const SquareMatrix& array() const noexcept { return d_; }

    /// Rejection path regardless of n (for cross-checks).
    Quad sample_by_rejection(Rng& rng) const;

private:
    SquareMatrix d_;
    double envelope_;
    std::optional<QuadrupleTable> table_;
};

// ---- pi-dagger -------------------------------------------------------------

struct CaseInfo {
    int r1 = 0;
    int r2 = 0;
    int case_id = 0;
};

/// (R1, R2) stated for each row of the case table, rows 1..10.
inline constexpr std::array<std::pair<int, int>, 10> kCaseSignature = {
    {{1, 0}, {1, 0}, {1, 1}, {1, 1}, {0, 1}, {0, 1}, {2, 0}, {0, 2}, {2, 2}, {0, 0}}};

/// Whether row `case_id` (1..10) of the case table applies to (pi, q).
bool case_row_matches(int case_id, std::span<const int> pi, const Quad& q) noexcept;

/// R1 = |{pi(I),pi(J)} & {K,L}|, R2 = |{pi(I),pi(K)} & {J,L}|, and the
/// first matching row. Throws NoCaseMatched if none applies.
CaseInfo classify(std::span<const int> pi, const Quad& q);
inline CaseInfo classify(const Involution& pi, const Quad& q) { return classify(pi.map(), q); }

/// Writes pi-dagger for the given row into `out` (size n).
void apply_pi_dagger(std::span<const int> pi, const Quad& q, int case_id, std::span<int> out) noexcept;

struct PiDagger {
    Involution pi_dagger;
    int case_id = 0;
};

PiDagger pi_dagger(const Involution& pi, const Quad& q);

/// {I,J,K,L,pi(I),pi(J),pi(K),pi(L)} sorted, without repeats.
std::vector<int> coupling_index_set(std::span<const int> pi, const Quad& q);

// ---- zero-bias draw --------------------------------------------------------

struct ZeroBiasDraw {
    Involution pi;
    Quad quad;
    int case_id = 0;
    int r1 = 0;
    int r2 = 0;
    Involution pi_dagger;
    Involution pi_ddagger;
    double U = 0.0;
    double W = 0.0;
    double W_dagger = 0.0;
    double W_ddagger = 0.0;
    double W_star = 0.0;
    double S = 0.0;
    double T = 0.0;
    double T_dagger = 0.0;
    double T_ddagger = 0.0;
    std::vector<int> index_set;
};

/// Deterministic assembly from (pi, quad, U); checks every closure and
/// agreement invariant and throws NoCaseMatched if one fails.
ZeroBiasDraw assemble_zero_bias(const CenteredArray& d, const Involution& pi, const Quad& q, double u);

ZeroBiasDraw zero_bias_draw(const CenteredArray& d, const QuadrupleSampler& sampler, Rng& rng);
ZeroBiasDraw zero_bias_draw(const CenteredArray& d, Rng& rng);

nlohmann::json to_json(const ZeroBiasDraw& z);

/// E_U |w - (U a + (1-U) b)| for U uniform on [0,1).
double expected_abs_gap(double w, double a, double b) noexcept;

/// E_U (U a + (1-U) b)^m
double expected_interpolated_power(double a, double b, int m) noexcept;

// ---- Monte Carlo -------------------------------------------------------------

struct GapEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t draws = 0;
};

inline constexpr std::size_t kDrawsPerChunk = 4096;

/// Mean and standard error of |W - W*| over m coupled draws. Chunk c uses
/// Rng(seed, c); output is independent of `threads`.
GapEstimate estimate_gap(const CenteredArray& d, std::size_t m, std::uint64_t seed, unsigned threads = 0);

/// First `count` draws of the same stream estimate_gap consumes.
std::vector<ZeroBiasDraw> leading_zero_bias_draws(const CenteredArray& d, std::size_t count, std::uint64_t seed);

/// m draws of W = Y_D under uniform pi, chunk-seeded like estimate_gap.
std::vector<double> sample_w(const CenteredArray& d, std::size_t m, std::uint64_t seed, unsigned threads = 0);

// ---- exact verification --------------------------------------------------

struct SteinPairExactReport {
    int n = 0;
    /// max over pi of |mean_{I != J}(W - W') - (4/n) W|
    double max_linearity_error = 0.0;
    /// E(W - W')^2 over Pi_n x ordered pairs
    double second_moment = 0.0;
    /// max |(W - W') - stein_difference|
    double max_difference_formula_error = 0.0;
    /// occupancy of (a, b) equals that of (b, a) for every atom pair
    bool exchangeable = false;
    bool closure_ok = false;
};

SteinPairExactReport exact_stein_pair(const CenteredArray& d, int cap = 10);

struct PiDaggerMarginalReport {
    int n = 0;
    std::size_t quads_checked = 0;
    /// max over (quad, phi) of |P(pi† = phi | quad) - 1/|Pi_{n-4}||
    double max_deviation = 0.0;
    /// every quad hits exactly |Pi_{n-4}| outcomes, each |Pi_n|/|Pi_{n-4}| times
    bool uniform = false;
    std::uint64_t expected_count_per_phi = 0;
    std::uint64_t min_count = 0;
    std::uint64_t max_count = 0;
    /// every pi† is an involution with the planted cycles and agrees with pi off the index set
    bool closure_ok = false;
    /// (pi, quad) pairs matched by zero rows or more than one row
    std::uint64_t unmatched = 0;
    std::uint64_t multiply_matched = 0;
    /// (pi, quad) pairs with a row whose stated (R1,R2) differs from the computed one
    std::uint64_t signature_mismatch = 0;
    /// (R1,R2) in {(2,1),(1,2)}
    std::uint64_t impossible_pairs = 0;
    std::array<std::uint64_t, 10> case_occupancy{};
    /// joint law of (quad, pi(I), pi(J)) against the closed form of p2
    bool p2_exact = false;
    double p2_max_error = 0.0;
    /// structural zeros of p2 observed with zero frequency
    bool p2_zeros_ok = false;
    /// joint law of (quad, pi(I), pi(J), pi(L)) on the region pi(I) = K with six distinct indices
    bool p3_exact = false;
    double p3_max_error = 0.0;
};

PiDaggerMarginalReport exact_pi_dagger_marginal(const CenteredArray& d, int cap = 8);

enum class ZeroBiasRoute {
    /// quadruple x uniform completion of the planted cycles
    ConditionalCompletion,
    /// uniform pi x quadruple through the pi-dagger construction
    Coupling,
};

struct ZeroBiasMomentCheck {
    int k = 0;
    double lhs = 0.0;  // E[W^{k+1}]
    double rhs = 0.0;  // k E[(W*)^{k-1}]
};

std::vector<ZeroBiasMomentCheck> exact_zero_bias_moments(const CenteredArray& d, int k_max,
                                                         ZeroBiasRoute route = ZeroBiasRoute::ConditionalCompletion,
                                                         int cap = 8);

/// E|W - W*| under the coupling, enumerating Pi_n x quadruples with the
/// U-integral in closed form.
double exact_gap(const CenteredArray& d, int cap = 12, unsigned threads = 0);

// ---- index-image laws ------------------------------------------------------

/// P(pi(a_m) = b_m for all m) for uniform pi on Pi_n; zero when the
/// constraints are inconsistent with a fixed-point-free involution.
double image_probability(int n, std::span<const std::pair<int, int>> constraints);

/// Law of (I†,J†,K†,L†,pi(I†),pi(J†)) in closed form.
double index_image_p2(const QuadrupleTable& table, int i, int j, int k, int l, int s, int t);

/// Law of (I†,J†,K†,L†,pi(I†),pi(J†),pi(L†)).
double index_image_p3(const QuadrupleTable& table, int i, int j, int k, int l, int s, int t, int r);

/// p(i,j,k,l) / ((n-1)(n-3)(n-5)) on {s = k, |{i,j,k,l,r,t}| = 6}; empty elsewhere.
std::optional<double> index_image_p3_closed_form(const QuadrupleTable& table, int i, int j, int k, int l, int s,
                                                 int t, int r);

}  // namespace invclt
