#pragma once

// Score arrays for the involution statistic Y = sum_i e(i, pi(i)):
// validation, hat-centering, moments and standardization.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace invclt {

/// Dense n x n matrix, row-major, 0-based.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n, double fill = 0.0);
    SquareMatrix(int n, std::vector<double> entries);
    static SquareMatrix from_rows(const std::vector<std::vector<double>>& rows);

    int n() const noexcept { return n_; }
    double operator()(int i, int j) const noexcept { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double& operator()(int i, int j) noexcept { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    std::span<const double> row(int i) const noexcept {
        return {a_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
    }
    std::span<const double> entries() const noexcept { return a_; }

    double max_abs() const noexcept;

    friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

private:
    int n_ = 0;
    std::vector<double> a_;
};

/// Unvalidated user input.
using RawMatrix = SquareMatrix;

/// e(i,j) = e(j,i) exactly, e(i,i) = 0 exactly, n even and >= 4.
class SymmetricArray {
public:
    /// Throws unless `m` already satisfies every invariant exactly.
    explicit SymmetricArray(SquareMatrix m);

    int n() const noexcept { return m_.n(); }
    double operator()(int i, int j) const noexcept { return m_(i, j); }
    const SquareMatrix& matrix() const noexcept { return m_; }

    double row_sum(int i) const;
    double total_sum() const;

private:
    SquareMatrix m_;
};

/// Hat-centered array: every row, column and the total sum vanish.
class HatArray {
public:
    int n() const noexcept { return m_.n(); }
    double operator()(int i, int j) const noexcept { return m_(i, j); }
    const SquareMatrix& matrix() const noexcept { return m_; }

private:
    friend HatArray center_hat(const SymmetricArray& e);
    explicit HatArray(SquareMatrix m) : m_(std::move(m)) {}
    SquareMatrix m_;
};

/// Standardized array D: symmetric, zero diagonal, zero row sums,
/// variance of Y_D over uniform involutions equal to one.
class CenteredArray {
public:
    int n() const noexcept { return m_.n(); }
    double operator()(int i, int j) const noexcept { return m_(i, j); }
    const SquareMatrix& matrix() const noexcept { return m_; }
    /// sum over i != j of |d(i,j)|^3
    double beta() const noexcept { return beta_; }
    /// sigma_E of the array this was standardized from.
    double source_sigma() const noexcept { return source_sigma_; }
    double source_mu() const noexcept { return source_mu_; }

    /// Wraps an array that already satisfies the invariants (within
    /// tolerance); used for re-standardized or synthetic inputs.
    static CenteredArray from_standardized(const SquareMatrix& m);

private:
    friend CenteredArray standardize(const SymmetricArray& e);
    CenteredArray(SquareMatrix m, double sigma, double mu);
    SquareMatrix m_;
    double beta_ = 0.0;
    double source_sigma_ = 1.0;
    double source_mu_ = 0.0;
};

struct MomentSummary {
    int n = 0;
    double mu = 0.0;
    double sigma2 = 0.0;
    /// Undefined when sigma2 is (numerically) zero.
    std::optional<double> beta;
};

inline constexpr double kDefaultSymmetryTol = 1e-9;
/// sigma^2 <= kDegenerateRelTol * max|e|^2 counts as zero variance.
inline constexpr double kDegenerateRelTol = 1e-14;

/// Checks squareness, finiteness and evenness. With `symmetrize`, the
/// output holds (e_ij + e_ji)/2; otherwise asymmetry beyond `tol`
/// (relative to max|e|, absolute when the array is zero) is an error.
/// The diagonal is zeroed in both modes once it passes the tolerance check;
/// with `symmetrize` the diagonal is dropped unconditionally.
SymmetricArray validate_and_symmetrize(const RawMatrix& raw, bool symmetrize, double tol = kDefaultSymmetryTol);

HatArray center_hat(const SymmetricArray& e);

/// sigma^2 computed from the hat array: 2(n-2)/((n-1)(n-3)) * sum ehat^2.
double sigma2_from_hat(const HatArray& hat);

MomentSummary moments(const SymmetricArray& e);

/// Throws DegenerateArray when every hat entry vanishes.
CenteredArray standardize(const SymmetricArray& e);

double beta_value(const CenteredArray& d);

/// Uniform-involution moments evaluated on any symmetric zero-diagonal
/// matrix without re-validation (used on truncated arrays).
MomentSummary moments_of(const SquareMatrix& m);

}  // namespace invclt
