#include <cmath>
#include <random>

#include "doctest.h"

#include "invclt/bounds.hpp"
#include "invclt/coupling.hpp"
#include "invclt/distances.hpp"
#include "invclt/error.hpp"
#include "invclt/involution.hpp"
#include "invclt/verify.hpp"
#include "support.hpp"

using namespace invclt;

TEST_CASE("K_p constants") {
    CHECK(kp(1.0) == 379.0);
    CHECK(kp(kInfinity) == 61'702'446.0);
    CHECK(kp(2.0) == doctest::Approx(std::sqrt(379.0 * 61'702'446.0)).epsilon(1e-13));
    CHECK(kp(2.0) == doctest::Approx(1.5292e5).epsilon(1e-4));
    for (double p : {1.0, 1.5, 2.0, 4.0, 10.0}) {
        CHECK(std::log(kp(p)) == doctest::Approx(std::log(379.0) / p + (1 - 1 / p) * std::log(61'702'446.0)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(kp(0.9), Error);
}

TEST_CASE("theorem bounds") {
    const std::vector<double> ps{1.0, 2.0, kInfinity};
    const BoundReport r8 = theorem_bounds(8, 3.0, ps);
    CHECK_FALSE(r8.valid);
    const BoundReport r9 = theorem_bounds(9, 3.0, ps);
    CHECK(r9.valid);
    CHECK_FALSE(r9.valid_strict);
    CHECK(theorem_bounds(10, 3.0, ps).valid_strict);
    const double coef = 224 + 1344 / 9.0 + 384 / 81.0;
    CHECK(coef == doctest::Approx(378.07).epsilon(1e-4));
    CHECK(coef <= 379.0);
    CHECK(r9.l1_refined == doctest::Approx(coef * 3.0 / 9.0));
    CHECK(r9.gap_bound == doctest::Approx(112 * 3.0 / 9 + 672 * 3.0 / 81 + 192 * 3.0 / 729));
    const BoundReport twice = theorem_bounds(9, 6.0, ps);
    for (std::size_t k = 0; k < ps.size(); ++k) CHECK(twice.bound[k].second == doctest::Approx(2 * r9.bound[k].second));
    CHECK(twice.l1_refined == doctest::Approx(2 * r9.l1_refined));
    CHECK(twice.gap_bound == doctest::Approx(2 * r9.gap_bound));
    CHECK(r9.bound[2].second == doctest::Approx(61'702'446.0 * 3.0 / 9.0));
}

TEST_CASE("truncation of a small array is the identity") {
    std::mt19937_64 gen(1);
    // large n spreads mass so every entry is below one half
    const CenteredArray d = support::centered(oracle::random_symmetric(60, gen));
    REQUIRE(d.matrix().max_abs() <= 0.5);
    const TruncationResult t = truncate(d);
    CHECK(t.gamma.empty());
    CHECK(t.d_prime == d.matrix());
    CHECK(t.collision_prob_bound == doctest::Approx(16 * d.beta() / 60));
    CHECK(t.all_hold());
}

TEST_CASE("truncation zeroes exactly the large entries") {
    SquareMatrix m(6);
    m(0, 1) = m(1, 0) = 0.6;
    m(2, 3) = m(3, 2) = -0.2;
    const CenteredArray d = CenteredArray::from_standardized(m);
    const TruncationResult t = truncate(d);
    CHECK(t.gamma == std::vector<std::pair<int, int>>{{0, 1}, {1, 0}});
    CHECK(t.d_prime(0, 1) == 0.0);
    CHECK(t.d_prime(1, 0) == 0.0);
    CHECK(t.d_prime(2, 3) == -0.2);
    CHECK(t.gamma_rows[0] == std::vector<int>{1});
    CHECK(t.gamma_rows[2].empty());
}

TEST_CASE("truncation inequalities on random arrays") {
    Rng rng(2);
    for (int n : {8, 10, 12, 16, 100}) {
        for (int rep = 0; rep < 10; ++rep) {
            const CenteredArray d = random_centered_array(n, rng);
            const TruncationResult t = truncate(d);
            // recompute the claims from the raw entries
            std::size_t gamma = 0;
            double beta = 0.0;
            for (int i = 0; i < n; ++i) {
                std::size_t row = 0;
                double cubes = 0.0, rsum = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double v = d(i, j);
                    cubes += std::fabs(v * v * v);
                    if (std::fabs(v) > 0.5) ++row;
                    else rsum += v;
                }
                CHECK(row <= 8 * cubes);
                CHECK(std::fabs(rsum) <= 4 * cubes + 1e-12);
                gamma += row;
                beta += cubes;
            }
            CHECK(t.gamma.size() == gamma);
            CHECK(gamma <= 8 * beta);
            CHECK(std::fabs(t.mu_prime) <= 8 * beta / n);
            CHECK_FALSE(t.preconditions);
            CHECK(t.all_hold());
            for (const auto& c : t.checks) {
                if (c.name == "sigma2_prime" || c.name == "beta_prime") CHECK_FALSE(c.applicable);
            }
            if (n <= 12) {
                const CollisionReport c = exact_collision(d, t);
                CHECK(c.probability <= c.bound);
                CHECK(c.identity_violations == 0);
                // exact probability against counting matchings that touch Gamma
                std::size_t hit = 0, total = 0;
                oracle::matchings(n, [&](const std::vector<int>& pi) {
                    ++total;
                    for (int i = 0; i < n; ++i) {
                        if (std::fabs(d(i, pi[i])) > 0.5) {
                            ++hit;
                            break;
                        }
                    }
                });
                CHECK(c.probability == doctest::Approx(double(hit) / total));
            }
        }
    }
}

TEST_CASE("conditional truncation inequalities in their regime") {
    // by Hoelder beta/n >= ((n-1)(n-3)/(2(n-2)))^{3/2} / n^2, above 1/90 at n = 1000
    const double n0 = 1000.0;
    CHECK(std::pow((n0 - 1) * (n0 - 3) / (2 * (n0 - 2)), 1.5) / (n0 * n0) > 1.0 / 90.0);
    Rng rng(3);
    const CenteredArray d = random_sign_array(1200, rng);
    REQUIRE(d.beta() / 1200 <= 1.0 / 90.0);
    const TruncationResult t = truncate(d);
    CHECK(t.preconditions);
    for (const auto& c : t.checks) {
        CHECK(c.applicable);
        CHECK(c.holds);
    }
}

TEST_CASE("lattice array") {
    const SymmetricArray e4 = lower_bound_array(4);
    CHECK(e4.matrix() == support::to_square(support::kLattice4));
    for (int n = 4; n <= 200; n += 2) {
        const SymmetricArray e = lower_bound_array(n);
        for (int i = 0; i < n; ++i) {
            CHECK(e.row_sum(i) == 0.0);
            for (int j = 0; j < n; ++j) CHECK((e(i, j) == 0.0 || std::fabs(e(i, j)) == 1.0));
        }
    }
    try {
        lower_bound_array(7);
        FAIL("expected OddDimension");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::OddDimension);
    }
}

TEST_CASE("lattice experiment at n = 100") {
    const LowerBoundReport r = lower_bound_experiment(100, 200'000, 11, 1);
    CHECK(r.lattice_ok);
    CHECK(r.sigma * r.sigma == doctest::Approx(r.sigma2_formula).epsilon(1e-12));
    const oracle::Matrix e = support::to_rows(lower_bound_array(100).matrix());
    CHECK(r.sigma2_formula == doctest::Approx(oracle::sigma2_formula(e)).epsilon(1e-12));
    const double pdf = std::exp(-0.5 / (r.sigma * r.sigma)) / std::sqrt(2 * M_PI);
    CHECK(r.floor == doctest::Approx(0.45 * pdf / r.sigma).epsilon(1e-14));
    CHECK(r.slack == doctest::Approx(std::sqrt(std::log(2000.0) / 400'000.0)).epsilon(1e-14));
    CHECK(r.ks >= r.floor - 3 * r.slack);
    CHECK(r.passes);
    const LowerBoundReport again = lower_bound_experiment(100, 200'000, 11, 3);
    CHECK(again.ks == r.ks);
}
