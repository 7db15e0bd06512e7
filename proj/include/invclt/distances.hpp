#pragma once

// Distances between a step distribution function and the standard normal.

#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "invclt/involution.hpp"

namespace invclt {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

double normal_cdf(double x) noexcept;
double normal_pdf(double x) noexcept;

/// Right-continuous step function: F(t) = cum[k] on [x[k], x[k+1]),
/// zero left of x[0], one from x.back() on.
struct StepCDF {
    std::vector<double> x;
    std::vector<double> cum;

    double operator()(double t) const noexcept;
    std::size_t size() const noexcept { return x.size(); }
};

StepCDF step_cdf(const ExactDistribution& dist);

/// Empirical distribution function; throws EmptySample.
StepCDF ecdf(std::vector<double> samples);

/// sup_t |F(t) - Phi(t)|, exact over jump points.
double kolmogorov_distance(const StepCDF& f) noexcept;

/// Root of Phi(t) = c in [a, b] by bisection; requires Phi(a) <= c <= Phi(b).
double normal_crossing(double c, double a, double b) noexcept;

/// Integral of |F - Phi| over the real line, exact per constant piece.
double l1_distance(const StepCDF& f);

/// Interpolation bound (linf^{p-1} l1)^{1/p}; p may be kInfinity. Throws InvalidP.
double lp_upper(double linf, double l1, double p);

/// Direct adaptive quadrature of (integral |F - Phi|^p)^{1/p}, for
/// cross-checking the interpolation bound. Finite p >= 1 only.
double lp_quadrature(const StepCDF& f, double p, double tol = 1e-8);

struct DistanceReport {
    double linf = 0.0;
    double l1 = 0.0;
    std::vector<std::pair<double, double>> lp_upper;  // (p, bound)
    bool exact = true;
    std::size_t samples = 0;  // zero for exact laws
};

DistanceReport distance_report(const StepCDF& f, std::span<const double> p_list, bool exact, std::size_t samples = 0);

/// "1", "2.5", "inf".
std::string p_label(double p);
nlohmann::json to_json(const DistanceReport& r);

/// CSV rows (t, F(t), Phi(t)) at the jump points.
std::string cdf_to_csv(const StepCDF& f);

}  // namespace invclt
