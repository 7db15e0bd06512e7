#include "invclt/array_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "invclt/error.hpp"
#include "invclt/summation.hpp"

namespace invclt {

SquareMatrix::SquareMatrix(int n, double fill) : n_(n), a_(static_cast<std::size_t>(n) * n, fill) {}

SquareMatrix::SquareMatrix(int n, std::vector<double> entries) : n_(n), a_(std::move(entries)) {
    if (n < 0 || a_.size() != static_cast<std::size_t>(n) * n) {
        throw Error(ErrorCode::NotSquare, "expected " + std::to_string(n) + "x" + std::to_string(n) + " entries");
    }
}

SquareMatrix SquareMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(n) * n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<int>(rows[i].size()) != n) {
            throw Error(ErrorCode::NotSquare, "row " + std::to_string(i + 1) + " has " +
                                                  std::to_string(rows[i].size()) + " entries, expected " +
                                                  std::to_string(n));
        }
        flat.insert(flat.end(), rows[i].begin(), rows[i].end());
    }
    return SquareMatrix(n, std::move(flat));
}

double SquareMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::fabs(x));
    return m;
}

namespace {

void require_shape(int n) {
    if (n % 2 != 0) {
        throw Error(ErrorCode::OddDimension, "n = " + std::to_string(n) + " admits no fixed-point-free involution");
    }
    if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "n = " + std::to_string(n) + " < 4");
}

double row_sum_of(const SquareMatrix& m, int i) {
    CompensatedSum s;
    for (double x : m.row(i)) s += x;
    return s.value();
}

double column_sum_of(const SquareMatrix& m, int j) {
    CompensatedSum s;
    for (int i = 0; i < m.n(); ++i) s += m(i, j);
    return s.value();
}

double total_of(const SquareMatrix& m) {
    CompensatedSum s;
    for (double x : m.entries()) s += x;
    return s.value();
}

double sum_of_squares(const SquareMatrix& m) {
    CompensatedSum s;
    for (double x : m.entries()) s += x * x;
    return s.value();
}

double offdiag_abs_cubes(const SquareMatrix& m) {
    CompensatedSum s;
    for (int i = 0; i < m.n(); ++i) {
        for (int j = 0; j < m.n(); ++j) {
            if (i != j) {
                const double a = std::fabs(m(i, j));
                s += a * a * a;
            }
        }
    }
    return s.value();
}

SquareMatrix hat_of(const SquareMatrix& e) {
    const int n = e.n();
    std::vector<double> rows(n), cols(n);
    for (int i = 0; i < n; ++i) {
        rows[i] = row_sum_of(e, i);
        cols[i] = column_sum_of(e, i);
    }
    const double total = total_of(e);
    const double nm2 = n - 2.0;
    const double grand = total / ((n - 1.0) * nm2);
    SquareMatrix hat(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // grouped so a symmetric input gives an exactly symmetric output
            if (i != j) hat(i, j) = e(i, j) - (rows[i] + cols[j]) / nm2 + grand;
        }
    }
    return hat;
}

double hat_sigma2(const SquareMatrix& hat) {
    const double n = hat.n();
    return 2.0 * (n - 2.0) / ((n - 1.0) * (n - 3.0)) * sum_of_squares(hat);
}

bool is_degenerate(double sigma2_hat, double scale) {
    return !(sigma2_hat > kDegenerateRelTol * scale * scale) || scale == 0.0;
}

}  // namespace

SymmetricArray::SymmetricArray(SquareMatrix m) : m_(std::move(m)) {
    require_shape(m_.n());
    for (int i = 0; i < n(); ++i) {
        if (m_(i, i) != 0.0) throw Error(ErrorCode::AsymmetryExceedsTolerance, "nonzero diagonal");
        for (int j = i + 1; j < n(); ++j) {
            if (!std::isfinite(m_(i, j))) throw Error(ErrorCode::NonFinite, "non-finite entry");
            if (m_(i, j) != m_(j, i)) throw Error(ErrorCode::AsymmetryExceedsTolerance, "array is not symmetric");
        }
    }
}

double SymmetricArray::row_sum(int i) const { return row_sum_of(m_, i); }
double SymmetricArray::total_sum() const { return total_of(m_); }

SymmetricArray validate_and_symmetrize(const RawMatrix& raw, bool symmetrize, double tol) {
    const int n = raw.n();
    for (double x : raw.entries()) {
        if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "input contains a non-finite entry");
    }
    require_shape(n);
    const double limit = tol * raw.max_abs();
    SquareMatrix out(n);
    for (int i = 0; i < n; ++i) {
        if (!symmetrize && std::fabs(raw(i, i)) > limit) {
            throw Error(ErrorCode::AsymmetryExceedsTolerance,
                        "diagonal entry " + std::to_string(i + 1) + " is not zero (pass --symmetrize to drop it)");
        }
        for (int j = i + 1; j < n; ++j) {
            const double a = raw(i, j);
            const double b = raw(j, i);
            if (!symmetrize && std::fabs(a - b) > limit) {
                throw Error(ErrorCode::AsymmetryExceedsTolerance,
                            "|e(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") - e(" +
                                std::to_string(j + 1) + "," + std::to_string(i + 1) + ")| exceeds tolerance");
            }
            const double v = symmetrize ? 0.5 * (a + b) : a;
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return SymmetricArray(std::move(out));
}

HatArray center_hat(const SymmetricArray& e) { return HatArray(hat_of(e.matrix())); }

double sigma2_from_hat(const HatArray& hat) { return hat_sigma2(hat.matrix()); }

MomentSummary moments_of(const SquareMatrix& m) {
    const int n = m.n();
    if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "moments need n >= 4");
    const double nd = n;
    const double total = total_of(m);
    CompensatedSum rows2;
    for (int i = 0; i < n; ++i) {
        const double r = row_sum_of(m, i);
        rows2 += r * r;
    }
    MomentSummary out;
    out.n = n;
    out.mu = total / (nd - 1.0);

    const SquareMatrix hat = hat_of(m);
    if (is_degenerate(hat_sigma2(hat), m.max_abs())) {
        out.sigma2 = 0.0;
        return out;
    }
    CompensatedSum bracket;
    bracket += (nd - 2.0) * sum_of_squares(m);
    bracket += total * total / (nd - 1.0);
    bracket += -2.0 * rows2.value();
    out.sigma2 = 2.0 / ((nd - 1.0) * (nd - 3.0)) * bracket.value();
    const double sigma = std::sqrt(out.sigma2);
    out.beta = offdiag_abs_cubes(hat) / (sigma * sigma * sigma);
    return out;
}

MomentSummary moments(const SymmetricArray& e) { return moments_of(e.matrix()); }

CenteredArray::CenteredArray(SquareMatrix m, double sigma, double mu)
    : m_(std::move(m)), beta_(offdiag_abs_cubes(m_)), source_sigma_(sigma), source_mu_(mu) {}

CenteredArray CenteredArray::from_standardized(const SquareMatrix& m) {
    require_shape(m.n());
    return CenteredArray(m, 1.0, 0.0);
}

CenteredArray standardize(const SymmetricArray& e) {
    SquareMatrix hat = hat_of(e.matrix());
    const double s2 = hat_sigma2(hat);
    if (is_degenerate(s2, e.matrix().max_abs())) {
        throw Error(ErrorCode::DegenerateArray, "all hat-centered entries vanish; the statistic is constant");
    }
    const double sigma = std::sqrt(s2);
    const int n = e.n();
    SquareMatrix d(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) d(i, j) = hat(i, j) / sigma;
    }
    return CenteredArray(std::move(d), sigma, e.total_sum() / (n - 1.0));
}

double beta_value(const CenteredArray& d) { return d.beta(); }

}  // namespace invclt
