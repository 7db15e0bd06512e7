#include "invclt/distances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "invclt/error.hpp"
#include "invclt/summation.hpp"

namespace invclt {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) noexcept { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double StepCDF::operator()(double t) const noexcept {
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    if (it == x.begin()) return 0.0;
    return cum[static_cast<std::size_t>(it - x.begin()) - 1];
}

StepCDF step_cdf(const ExactDistribution& dist) {
    StepCDF f;
    CompensatedSum acc;
    for (const auto& a : dist.atoms) {
        acc += a.probability;
        f.x.push_back(a.value);
        f.cum.push_back(std::min(acc.value(), 1.0));
    }
    if (!f.cum.empty()) f.cum.back() = 1.0;
    return f;
}

StepCDF ecdf(std::vector<double> samples) {
    if (samples.empty()) throw Error(ErrorCode::EmptySample, "empirical CDF of an empty sample");
    std::sort(samples.begin(), samples.end());
    const double m = static_cast<double>(samples.size());
    StepCDF f;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
        f.x.push_back(samples[i]);
        f.cum.push_back(static_cast<double>(i + 1) / m);
    }
    return f;
}

double kolmogorov_distance(const StepCDF& f) noexcept {
    double sup = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double phi = normal_cdf(f.x[k]);
        sup = std::max({sup, std::fabs(f.cum[k] - phi), std::fabs(phi - prev)});
        prev = f.cum[k];
    }
    return sup;
}

double normal_crossing(double c, double a, double b) noexcept {
    for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::fabs(a)); ++it) {
        const double mid = 0.5 * (a + b);
        if (normal_cdf(mid) < c) a = mid;
        else b = mid;
    }
    return 0.5 * (a + b);
}

namespace {

/// Antiderivative of Phi.
double int_cdf(double t) noexcept { return t * normal_cdf(t) + normal_pdf(t); }

/// Integral of (1 - Phi) over [t, inf).
double upper_tail(double t) noexcept { return normal_pdf(t) - t * normal_cdf(-t); }

/// Integral of |c - Phi| over [a, b].
double piece(double c, double a, double b) noexcept {
    auto signed_int = [c](double lo, double hi) { return int_cdf(hi) - int_cdf(lo) - c * (hi - lo); };
    const double pa = normal_cdf(a);
    const double pb = normal_cdf(b);
    if (c <= pa) return signed_int(a, b);
    if (c >= pb) return -signed_int(a, b);
    const double t = normal_crossing(c, a, b);
    return -signed_int(a, t) + signed_int(t, b);
}

}  // namespace

double l1_distance(const StepCDF& f) {
    if (f.size() == 0) throw Error(ErrorCode::EmptySample, "L1 distance of an empty distribution");
    CompensatedSum total;
    total += int_cdf(f.x.front());  // F = 0 left of the first jump
    for (std::size_t k = 0; k + 1 < f.size(); ++k) total += piece(f.cum[k], f.x[k], f.x[k + 1]);
    total += upper_tail(f.x.back());  // F = 1 from the last jump on
    return total.value();
}

double lp_upper(double linf, double l1, double p) {
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidP, "p must be at least 1");
    if (p == 1.0) return l1;
    if (std::isinf(p)) return linf;
    return std::pow(std::pow(linf, p - 1.0) * l1, 1.0 / p);
}

double lp_quadrature(const StepCDF& f, double p, double tol) {
    if (!(p >= 1.0) || std::isinf(p)) throw Error(ErrorCode::InvalidP, "quadrature needs finite p >= 1");
    if (f.size() == 0) throw Error(ErrorCode::EmptySample, "L^p distance of an empty distribution");
    using boost::math::quadrature::gauss_kronrod;
    // integrate each smooth piece separately; beyond +-40 the integrand is below 1e-300
    std::vector<double> cuts;
    cuts.push_back(std::min(-40.0, f.x.front() - 40.0));
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double lo = f.x[k];
        const double hi = k + 1 < f.size() ? f.x[k + 1] : lo;
        cuts.push_back(lo);
        if (hi > lo && normal_cdf(lo) < f.cum[k] && f.cum[k] < normal_cdf(hi)) {
            cuts.push_back(normal_crossing(f.cum[k], lo, hi));
        }
    }
    cuts.push_back(std::max(40.0, f.x.back() + 40.0));
    CompensatedSum total;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k], b = cuts[k + 1];
        if (b <= a) continue;
        const double c = f(0.5 * (a + b));
        auto g = [&](double t) { return std::pow(std::fabs(c - normal_cdf(t)), p); };
        total += gauss_kronrod<double, 31>::integrate(g, a, b, 15, tol);
    }
    return std::pow(total.value(), 1.0 / p);
}

DistanceReport distance_report(const StepCDF& f, std::span<const double> p_list, bool exact, std::size_t samples) {
    DistanceReport r;
    r.linf = kolmogorov_distance(f);
    r.l1 = l1_distance(f);
    for (double p : p_list) r.lp_upper.emplace_back(p, lp_upper(r.linf, r.l1, p));
    r.exact = exact;
    r.samples = samples;
    return r;
}

std::string p_label(double p) {
    if (std::isinf(p)) return "inf";
    std::ostringstream s;
    s << p;
    return s.str();
}

nlohmann::json to_json(const DistanceReport& r) {
    nlohmann::json lp = nlohmann::json::object();
    for (const auto& [p, v] : r.lp_upper) lp[p_label(p)] = v;
    nlohmann::json j{{"linf", r.linf}, {"l1", r.l1}, {"lp_upper", lp}, {"exact", r.exact}};
    if (!r.exact) j["samples"] = r.samples;
    return j;
}

std::string cdf_to_csv(const StepCDF& f) {
    std::ostringstream out;
    out.precision(17);
    out << "t,F,Phi\n";
    for (std::size_t k = 0; k < f.size(); ++k) out << f.x[k] << ',' << f.cum[k] << ',' << normal_cdf(f.x[k]) << '\n';
    return out.str();
}

}  // namespace invclt
