#include <cmath>
#include <random>
#include <set>

#include "doctest.h"

#include "invclt/coupling.hpp"
#include "invclt/error.hpp"
#include "invclt/involution.hpp"
#include "invclt/verify.hpp"
#include "support.hpp"

using namespace invclt;

TEST_CASE("enumeration counts, validity and distinctness") {
    for (int n : {2, 4, 6, 8, 10, 12}) {
        std::size_t brute = 0;
        oracle::matchings(n, [&](const std::vector<int>&) { ++brute; });
        std::uint64_t odd = 1;
        for (int k = n - 1; k > 1; k -= 2) odd *= k;
        CHECK(involution_count(n) == odd);
        CHECK(brute == odd);

        std::set<std::vector<int>> seen;
        for_each_involution(n, [&](std::span<const int> pi) {
            CHECK(is_fixed_point_free_involution(pi));
            seen.emplace(pi.begin(), pi.end());
        });
        CHECK(seen.size() == odd);
    }
    CHECK(involution_count(8) == 105);
}

TEST_CASE("canonical enumeration order") {
    const auto two = enumerate_involutions(2);
    REQUIRE(two.size() == 1);
    CHECK(two[0].cycles() == std::vector<std::pair<int, int>>{{0, 1}});

    const auto four = enumerate_involutions(4);
    REQUIRE(four.size() == 3);
    CHECK(std::vector<int>(four[0].map().begin(), four[0].map().end()) == std::vector<int>{1, 0, 3, 2});
    CHECK(std::vector<int>(four[1].map().begin(), four[1].map().end()) == std::vector<int>{2, 3, 0, 1});
    CHECK(std::vector<int>(four[2].map().begin(), four[2].map().end()) == std::vector<int>{3, 2, 1, 0});
    const auto six = enumerate_involutions(6);
    CHECK(std::is_sorted(six.begin(), six.end()));
}

TEST_CASE("enumeration errors") {
    CHECK_THROWS_AS(enumerate_involutions(18), Error);
    try {
        enumerate_involutions(18);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CapExceeded);
    }
    try {
        enumerate_involutions(7);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OddDimension);
    }
    try {
        Rng rng(1);
        sample_involution(5, rng);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OddDimension);
    }
    CHECK_THROWS_AS(Involution(std::vector<int>{0, 1}), Error);
    CHECK_THROWS_AS(Involution(std::vector<int>{1, 2, 0}), Error);
}

TEST_CASE("sampling is deterministic and valid") {
    Rng a(42), b(42);
    for (int t = 0; t < 100; ++t) {
        const Involution x = sample_involution(20, a);
        CHECK(x == sample_involution(20, b));
        CHECK(is_fixed_point_free_involution(x.map()));
    }
}

TEST_CASE("sampling frequencies at n = 4") {
    Rng rng(3);
    std::map<std::vector<int>, int> count;
    const int m = 300'000;
    for (int t = 0; t < m; ++t) {
        const Involution x = sample_involution(4, rng);
        ++count[std::vector<int>(x.map().begin(), x.map().end())];
    }
    CHECK(count.size() == 3);
    for (const auto& [k, c] : count) CHECK(std::fabs(c / double(m) - 1.0 / 3.0) < 0.005);
}

TEST_CASE("chi-square uniformity at n = 6") {
    const auto counts = sampler_cell_counts(6, 1'000'000, 99, 1);
    REQUIRE(counts.size() == 15);
    CHECK(chi_square_uniform(counts) < chi_square_quantile(14, 0.999));
    // chi-square quantile against a tabulated value
    CHECK(chi_square_quantile(14, 0.999) == doctest::Approx(36.123).epsilon(1e-4));
}

TEST_CASE("Monte Carlo output independent of thread count") {
    std::mt19937_64 gen(1);
    const CenteredArray d = support::centered(oracle::random_symmetric(12, gen));
    const auto one = sample_w(d, 20'000, 5, 1);
    const auto many = sample_w(d, 20'000, 5, 3);
    CHECK(one == many);
    CHECK(sampler_cell_counts(8, 50'000, 5, 1) == sampler_cell_counts(8, 50'000, 5, 4));
}

TEST_CASE("Y values") {
    const SquareMatrix zero(6);
    Rng rng(0);
    CHECK(y_value(zero, sample_involution(6, rng).map()) == 0.0);

    const SquareMatrix e = support::to_square(support::kLattice4);
    CHECK(y_value(e, std::vector<int>{2, 3, 0, 1}) == 4.0);  // (13)(24)
    CHECK(y_value(e, std::vector<int>{1, 0, 3, 2}) == 0.0);  // (12)(34)
    try {
        y_value(e, std::vector<int>{1, 0});
        FAIL("expected mismatch");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("exact law of the n = 4 lattice array") {
    const CenteredArray d = support::centered(support::kLattice4);
    const ExactDistribution law = exact_w_distribution(d);
    REQUIRE(law.atoms.size() == 3);
    const double a = std::sqrt(1.5);
    CHECK(law.atoms[0].value == doctest::Approx(-a).epsilon(1e-14));
    CHECK(law.atoms[1].value == doctest::Approx(0.0));
    CHECK(law.atoms[2].value == doctest::Approx(a).epsilon(1e-14));
    for (const auto& at : law.atoms) CHECK(at.probability == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(distribution_to_csv(law).rfind("value,probability\n", 0) == 0);
}

TEST_CASE("exact laws are centered with unit variance") {
    std::mt19937_64 gen(21);
    for (int n : {6, 8, 10, 12}) {
        const CenteredArray d = support::centered(oracle::random_symmetric(n, gen));
        const ExactDistribution law = exact_w_distribution(d);
        double mass = 0.0;
        for (std::size_t k = 0; k < law.atoms.size(); ++k) {
            mass += law.atoms[k].probability;
            CHECK(law.atoms[k].probability > 0.0);
            if (k) CHECK(law.atoms[k].value > law.atoms[k - 1].value);
        }
        CHECK(std::fabs(mass - 1.0) < 1e-12);
        CHECK(std::fabs(law.mean()) < 1e-10);
        CHECK(std::fabs(law.variance() - 1.0) < 1e-8);
        CHECK(law.atoms.size() <= involution_count(n));
    }
}

TEST_CASE("JSON round trip is 1-based") {
    const Involution pi(std::vector<int>{1, 0, 3, 2});
    const auto j = to_json(pi);
    CHECK(j.dump() == "[2,1,4,3]");
    CHECK(involution_from_json(j) == pi);
}
