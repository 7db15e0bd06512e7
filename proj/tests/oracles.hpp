#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's numerical code; only plain data types cross the boundary.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// All perfect matchings of {0..n-1} by a pairing recursion written
/// independently of the library (largest unpaired index first).
inline void matchings(int n, const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> m(n, -1);
    std::function<void()> rec = [&]() {
        int last = -1;
        for (int i = n - 1; i >= 0; --i) {
            if (m[i] < 0) {
                last = i;
                break;
            }
        }
        if (last < 0) {
            visit(m);
            return;
        }
        for (int j = last - 1; j >= 0; --j) {
            if (m[j] >= 0) continue;
            m[last] = j;
            m[j] = last;
            rec();
            m[last] = m[j] = -1;
        }
    };
    rec();
}

inline double y(const Matrix& e, const std::vector<int>& pi) {
    double s = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) s += e[i][pi[i]];
    return s;
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    std::size_t count = 0;
};

/// Mean and variance of Y over all matchings, in long double.
inline Moments brute_moments(const Matrix& e) {
    std::vector<long double> ys;
    matchings(static_cast<int>(e.size()), [&](const std::vector<int>& pi) { ys.push_back(y(e, pi)); });
    long double m = 0;
    for (auto v : ys) m += v;
    m /= ys.size();
    long double v2 = 0;
    for (auto v : ys) v2 += (v - m) * (v - m);
    return {static_cast<double>(m), static_cast<double>(v2 / ys.size()), ys.size()};
}

/// Centering formula written out term by term.
inline Matrix hat(const Matrix& e) {
    const int n = static_cast<int>(e.size());
    std::vector<double> r(n, 0.0);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) r[i] += e[i][j];
        total += r[i];
    }
    Matrix h(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) h[i][j] = e[i][j] - r[i] / (n - 2.0) - r[j] / (n - 2.0) + total / ((n - 1.0) * (n - 2.0));
    return h;
}

/// Variance formula in raw sums.
inline double sigma2_formula(const Matrix& e) {
    const int n = static_cast<int>(e.size());
    long double sq = 0, total = 0, rows = 0;
    for (int i = 0; i < n; ++i) {
        long double r = 0;
        for (int j = 0; j < n; ++j) {
            sq += static_cast<long double>(e[i][j]) * e[i][j];
            r += e[i][j];
        }
        rows += r * r;
        total += r;
    }
    return static_cast<double>(2.0L / ((n - 1.0L) * (n - 3.0L)) *
                               ((n - 2.0L) * sq + total * total / (n - 1.0L) - 2.0L * rows));
}

inline Matrix random_symmetric(int n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix e(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e[i][j] = e[j][i] = u(gen);
    return e;
}

/// hat(e) / sigma, the standardized array.
inline Matrix standardized(const Matrix& e) {
    Matrix h = hat(e);
    const double s = std::sqrt(sigma2_formula(e));
    for (auto& row : h)
        for (auto& v : row) v /= s;
    return h;
}

/// Phi by its Taylor series around zero in long double; accurate to well
/// below 1e-15 for |x| <= 8.
inline double phi_series(double x) {
    const long double xl = x;
    long double term = xl, sum = xl;
    for (int k = 1; k < 400; ++k) {
        term *= xl * xl / (2.0L * k + 1.0L);
        sum += term;
        if (std::fabs(static_cast<double>(term)) < 1e-30) break;
    }
    const long double pdf = std::exp(-xl * xl / 2.0L) / std::sqrt(2.0L * 3.14159265358979323846264338327950288L);
    return static_cast<double>(0.5L + pdf * sum);
}

/// Composite Simpson rule with `steps` (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int steps) {
    const double h = (b - a) / steps;
    double s = f(a) + f(b);
    for (int k = 1; k < steps; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Step CDF from (value, probability) atoms, evaluated at t.
inline double step_at(const std::vector<std::pair<double, double>>& atoms, double t) {
    double c = 0.0;
    for (const auto& [v, p] : atoms)
        if (v <= t) c += p;
    return c;
}

/// Integral of |F - Phi| by Simpson on each piece between atoms and over
/// the tails out to +-12, with the series Phi.
inline double l1_by_quadrature(std::vector<std::pair<double, double>> atoms, int steps_per_piece = 2000) {
    std::sort(atoms.begin(), atoms.end());
    std::vector<double> cuts{std::min(-12.0, atoms.front().first - 12.0)};
    for (const auto& a : atoms) cuts.push_back(a.first);
    cuts.push_back(std::max(12.0, atoms.back().first + 12.0));
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k], b = cuts[k + 1];
        if (b <= a) continue;
        const double c = step_at(atoms, 0.5 * (a + b));
        // |c - Phi| has at most one kink; Simpson converges regardless at this resolution
        total += simpson([&](double t) { return std::fabs(c - phi_series(t)); }, a, b, steps_per_piece);
    }
    return total;
}

/// Probability that a uniform matching maps each a to b, by counting.
inline double image_count_probability(int n, const std::vector<std::pair<int, int>>& constraints) {
    std::size_t hit = 0, total = 0;
    matchings(n, [&](const std::vector<int>& pi) {
        ++total;
        bool ok = true;
        for (const auto& [a, b] : constraints) ok = ok && pi[a] == b;
        if (ok) ++hit;
    });
    return static_cast<double>(hit) / static_cast<double>(total);
}

}  // namespace oracle
