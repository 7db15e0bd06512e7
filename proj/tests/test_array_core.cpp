#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "invclt/array_core.hpp"
#include "invclt/error.hpp"
#include "invclt/matrix_io.hpp"
#include "support.hpp"

using namespace invclt;
using support::to_square;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("validation rejects odd, small and non-finite input") {
    CHECK(code_of([] { validate_and_symmetrize(SquareMatrix(5), false); }) == ErrorCode::OddDimension);
    CHECK(code_of([] { validate_and_symmetrize(SquareMatrix(2), false); }) == ErrorCode::DimensionTooSmall);
    SquareMatrix bad(4);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK(code_of([&] { validate_and_symmetrize(bad, true); }) == ErrorCode::NonFinite);
}

TEST_CASE("zero matrix passes unchanged") {
    const SymmetricArray e = validate_and_symmetrize(SquareMatrix(4), false);
    CHECK(e.matrix() == SquareMatrix(4));
}

TEST_CASE("asymmetry is an error unless symmetrizing") {
    SquareMatrix m(4);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0 + 1e-12;
    const SymmetricArray avg = validate_and_symmetrize(m, true, 1e-9);
    CHECK(avg(0, 1) == avg(1, 0));
    CHECK(avg(0, 1) == doctest::Approx(1.0 + 5e-13).epsilon(1e-15));

    m(1, 0) = 1.5;
    CHECK(code_of([&] { validate_and_symmetrize(m, false); }) == ErrorCode::AsymmetryExceedsTolerance);
    m(1, 0) = 1.0;
    m(2, 2) = 0.3;
    CHECK(code_of([&] { validate_and_symmetrize(m, false); }) == ErrorCode::AsymmetryExceedsTolerance);
    CHECK(validate_and_symmetrize(m, true)(2, 2) == 0.0);
}

TEST_CASE("hat centering matches the term-by-term formula and kills marginals") {
    std::mt19937_64 gen(7);
    for (int n : {4, 6, 8, 12, 30}) {
        const oracle::Matrix e = oracle::random_symmetric(n, gen);
        const HatArray h = center_hat(SymmetricArray(to_square(e)));
        const oracle::Matrix want = oracle::hat(e);
        double scale = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                CHECK(h(i, j) == doctest::Approx(want[i][j]).epsilon(1e-12));
                scale = std::max(scale, std::fabs(h(i, j)));
            }
        for (int i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < n; ++j) {
                r += h(i, j);
                c += h(j, i);
            }
            CHECK(std::fabs(r) <= 1e-9 * n * scale);
            CHECK(std::fabs(c) <= 1e-9 * n * scale);
        }
    }
}

TEST_CASE("constant off-diagonal array centers to zero and is degenerate") {
    SquareMatrix m(6, 2.5);
    for (int i = 0; i < 6; ++i) m(i, i) = 0.0;
    const SymmetricArray e(m);
    const HatArray h = center_hat(e);
    CHECK(h.matrix().max_abs() < 1e-14);
    const MomentSummary s = moments(e);
    CHECK(s.sigma2 == 0.0);
    CHECK_FALSE(s.beta.has_value());
    CHECK(code_of([&] { standardize(e); }) == ErrorCode::DegenerateArray);

    const MomentSummary z = moments(SymmetricArray(SquareMatrix(4)));
    CHECK(z.mu == 0.0);
    CHECK(z.sigma2 == 0.0);
    CHECK_FALSE(z.beta.has_value());
}

TEST_CASE("lattice array at n = 4") {
    const SymmetricArray e(to_square(support::kLattice4));
    const HatArray h = center_hat(e);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(h(i, j) == doctest::Approx(support::kLattice4[i][j]).epsilon(1e-15));
    const MomentSummary s = moments(e);
    CHECK(s.mu == doctest::Approx(0.0));
    CHECK(s.sigma2 == doctest::Approx(32.0 / 3.0).epsilon(1e-14));
    const oracle::Moments brute = oracle::brute_moments(support::kLattice4);
    CHECK(brute.count == 3);
    CHECK(brute.variance == doctest::Approx(32.0 / 3.0).epsilon(1e-14));

    const CenteredArray d = standardize(e);
    CHECK(d.beta() == doctest::Approx(8.0 / std::pow(32.0 / 3.0, 1.5)).epsilon(1e-14));
    CHECK(d.beta() == doctest::Approx(0.2296).epsilon(1e-3));
    CHECK(moments_of(d.matrix()).sigma2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("moments agree with brute force over all matchings") {
    std::mt19937_64 gen(11);
    for (int n : {4, 6, 8, 10}) {
        for (int rep = 0; rep < 3; ++rep) {
            oracle::Matrix e = oracle::random_symmetric(n, gen);
            for (auto& row : e)
                for (auto& v : row) v += 0.75;  // nonzero mean
            for (int i = 0; i < n; ++i) e[i][i] = 0.0;
            const MomentSummary s = moments(SymmetricArray(to_square(e)));
            const oracle::Moments b = oracle::brute_moments(e);
            CHECK(s.mu == doctest::Approx(b.mean).epsilon(1e-9));
            CHECK(s.sigma2 == doctest::Approx(b.variance).epsilon(1e-9));
            CHECK(s.sigma2 == doctest::Approx(oracle::sigma2_formula(e)).epsilon(1e-10));
            const double via_hat = sigma2_from_hat(center_hat(SymmetricArray(to_square(e))));
            CHECK(s.sigma2 == doctest::Approx(via_hat).epsilon(1e-10));
        }
    }
}

TEST_CASE("standardize is invariant under scaling and constant shifts") {
    std::mt19937_64 gen(5);
    for (int n : {6, 10, 20}) {
        const oracle::Matrix e = oracle::random_symmetric(n, gen);
        oracle::Matrix scaled = e, shifted = e;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                scaled[i][j] *= 3.7;
                if (i != j) shifted[i][j] += 4.0;
            }
        const CenteredArray d = support::centered(e);
        const CenteredArray ds = support::centered(scaled);
        const CenteredArray dt = support::centered(shifted);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                CHECK(std::fabs(d(i, j) - ds(i, j)) < 1e-10);
                CHECK(std::fabs(d(i, j) - dt(i, j)) < 1e-10);
            }
        CHECK(d.beta() == doctest::Approx(ds.beta()).epsilon(1e-10));

        // standardized output: zero row sums, unit variance, beta as defined
        const MomentSummary s = moments_of(d.matrix());
        CHECK(s.sigma2 == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(*moments(SymmetricArray(to_square(e))).beta == doctest::Approx(d.beta()).epsilon(1e-10));
        double beta = 0.0;
        const oracle::Matrix ref = oracle::standardized(e);
        for (int i = 0; i < n; ++i) {
            double r = 0.0;
            for (int j = 0; j < n; ++j) {
                r += d(i, j);
                if (i != j) beta += std::pow(std::fabs(ref[i][j]), 3);
            }
            CHECK(std::fabs(r) < 1e-9 * n * d.matrix().max_abs());
        }
        CHECK(d.beta() == doctest::Approx(beta).epsilon(1e-10));
        CHECK(beta_value(d) == d.beta());

        // idempotence
        const CenteredArray again = standardize(SymmetricArray(d.matrix()));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) CHECK(std::fabs(again(i, j) - d(i, j)) < 1e-12);
    }
}

TEST_CASE("matrix parsing") {
    const RawMatrix m = parse_matrix_csv("0,1,2,3\n1,0,4,5\n\n2,4,0,6\n3,5,6,0\n");
    CHECK(m.n() == 4);
    CHECK(m(2, 3) == 6.0);
    CHECK(code_of([] { parse_matrix_csv("0,1\n1,x\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_matrix_csv("0,1,2\n1,0\n"); }) == ErrorCode::NotSquare);

    const RawMatrix j = parse_matrix_json(R"({"n": 4, "entries": [[0,1,2,3],[1,0,4,5],[2,4,0,6],[3,5,6,0]]})");
    CHECK(j == m);
    CHECK(code_of([] { parse_matrix_json(R"({"n": 3, "entries": [[0,1],[1,0]]})"); }) != ErrorCode::IoError);
    CHECK(parse_matrix_csv(matrix_to_csv(m)) == m);
    CHECK(code_of([] { read_matrix("/nonexistent/file.csv"); }) == ErrorCode::IoError);

    const auto js = to_json(moments(SymmetricArray(SquareMatrix(4))));
    CHECK(js.contains("mu"));
    CHECK(js.contains("sigma2"));
    CHECK(js.contains("n"));
    CHECK(js["beta"].is_null());
}
