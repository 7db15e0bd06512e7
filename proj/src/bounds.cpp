#include "invclt/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "invclt/coupling.hpp"
#include "invclt/distances.hpp"
#include "invclt/error.hpp"
#include "invclt/involution.hpp"
#include "invclt/parallel.hpp"
#include "invclt/summation.hpp"

namespace invclt {

double kp(double p) {
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidP, "p must be at least 1");
    if (std::isinf(p)) return kKInf;
    if (p == 1.0) return kK1;
    return std::exp(std::log(kK1) / p + (1.0 - 1.0 / p) * std::log(kKInf));
}

BoundReport theorem_bounds(int n, double beta, std::span<const double> p_list) {
    BoundReport r;
    r.n = n;
    r.beta = beta;
    const double ratio = beta / n;
    for (double p : p_list) {
        const double k = kp(p);
        r.kp.emplace_back(p, k);
        r.bound.emplace_back(p, k * ratio);
    }
    const double dn = n;
    r.l1_refined = (224.0 + 1344.0 / dn + 384.0 / (dn * dn)) * ratio;
    r.gap_bound = 112.0 * ratio + 672.0 * beta / (dn * dn) + 192.0 * beta / (dn * dn * dn);
    r.valid = n >= 9;
    r.valid_strict = n > 9;
    return r;
}

BoundReport theorem_bounds(const CenteredArray& d, std::span<const double> p_list) {
    return theorem_bounds(d.n(), d.beta(), p_list);
}

bool TruncationResult::all_hold() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const InequalityCheck& c) { return !c.applicable || c.holds; });
}

TruncationResult truncate(const CenteredArray& d) {
    const int n = d.n();
    const SquareMatrix& m = d.matrix();
    TruncationResult r;
    r.d_prime = SquareMatrix(n);
    r.gamma_rows.resize(n);
    r.row_cubes.assign(n, 0.0);
    r.dprime_row_sums.assign(n, 0.0);
    CompensatedSum total, beta;
    for (int i = 0; i < n; ++i) {
        CompensatedSum row, cubes;
        for (int j = 0; j < n; ++j) {
            const double v = m(i, j);
            cubes += std::fabs(v * v * v);
            if (std::fabs(v) > 0.5) {
                r.gamma.emplace_back(i, j);
                r.gamma_rows[i].push_back(j);
            } else {
                r.d_prime(i, j) = v;
                row += v;
            }
        }
        r.row_cubes[i] = cubes.value();
        r.dprime_row_sums[i] = row.value();
        total += row;
        beta += cubes;
    }
    r.beta = beta.value();
    r.dprime_total = total.value();
    const MomentSummary mom = moments_of(r.d_prime);
    r.mu_prime = mom.mu;
    r.sigma2_prime = mom.sigma2;
    r.beta_prime = mom.beta;
    r.collision_prob_bound = 16.0 * r.beta / n;
    r.preconditions = r.beta / n <= kEpsilon0 && n >= kN0;

    auto add = [&](std::string name, double lhs, double rhs, bool applicable) {
        r.checks.push_back({std::move(name), lhs, rhs, applicable, lhs <= rhs});
    };
    add("gamma_size", static_cast<double>(r.gamma.size()), 8.0 * r.beta, true);
    double worst_row = -kInfinity, worst_row_sum = -kInfinity;
    int worst_i = 0, worst_j = 0;
    for (int i = 0; i < n; ++i) {
        const double slack = static_cast<double>(r.gamma_rows[i].size()) - 8.0 * r.row_cubes[i];
        if (slack > worst_row) {
            worst_row = slack;
            worst_i = i;
        }
        const double slack_sum = std::fabs(r.dprime_row_sums[i]) - 4.0 * r.row_cubes[i];
        if (slack_sum > worst_row_sum) {
            worst_row_sum = slack_sum;
            worst_j = i;
        }
    }
    add("gamma_row_size", static_cast<double>(r.gamma_rows[worst_i].size()), 8.0 * r.row_cubes[worst_i], true);
    add("dprime_total", std::fabs(r.dprime_total), 4.0 * r.beta, true);
    add("dprime_row_sum", std::fabs(r.dprime_row_sums[worst_j]), 4.0 * r.row_cubes[worst_j], true);
    add("mu_prime", std::fabs(r.mu_prime), 8.0 * r.beta / n, true);
    add("sigma2_prime", std::fabs(r.sigma2_prime - 1.0), 10.0 * r.beta / n, r.preconditions);
    add("beta_prime", r.beta_prime.value_or(kInfinity), 22.0 * r.beta, r.preconditions);
    return r;
}

CollisionReport exact_collision(const CenteredArray& d, const TruncationResult& t, int cap) {
    const int n = d.n();
    if (n > cap) {
        throw Error(ErrorCode::CapExceeded, "exact collision probability at n = " + std::to_string(n));
    }
    std::vector<char> in_gamma(static_cast<std::size_t>(n) * n, 0);
    for (const auto& [i, j] : t.gamma) in_gamma[static_cast<std::size_t>(i) * n + j] = 1;
    CollisionReport r;
    std::uint64_t hits = 0, total = 0;
    for_each_involution(
        n,
        [&](std::span<const int> pi) {
            ++total;
            bool hit = false;
            for (int i = 0; i < n && !hit; ++i) hit = in_gamma[static_cast<std::size_t>(i) * n + pi[i]];
            if (hit) ++hits;
            else if (y_value(d.matrix(), pi) != y_value(t.d_prime, pi)) ++r.identity_violations;
        },
        cap);
    r.probability = static_cast<double>(hits) / static_cast<double>(total);
    r.bound = t.collision_prob_bound;
    return r;
}

SymmetricArray lower_bound_array(int n) {
    if (n % 2 != 0) throw Error(ErrorCode::OddDimension, "n = " + std::to_string(n) + " is odd");
    if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "lower-bound array needs n >= 4");
    SquareMatrix m(n);
    // 1-based (i, j) with j >= i
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            double v;
            if (i % 2 == 1 && j == i + 1) v = 0.0;
            else if ((j - i) % 2 == 0) v = 1.0;
            else v = -1.0;
            m(i - 1, j - 1) = v;
            m(j - 1, i - 1) = v;
        }
    }
    return SymmetricArray(std::move(m));
}

double dkw_slack(std::size_t m, double confidence) {
    return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(m)));
}

LowerBoundReport lower_bound_experiment(int n, std::size_t m, std::uint64_t seed, unsigned threads) {
    const SymmetricArray e = lower_bound_array(n);
    const CenteredArray d = standardize(e);
    const MomentSummary mom = moments(e);
    LowerBoundReport r;
    r.n = n;
    r.draws = m;
    r.sigma = d.source_sigma();
    r.sigma2_formula = mom.sigma2;
    r.beta_over_n = d.beta() / n;

    std::vector<double> w(m);
    const std::size_t chunks = (m + kDrawsPerChunk - 1) / kDrawsPerChunk;
    std::vector<char> lattice(chunks, 1);
    for_each_chunk(chunks, threads, [&](std::size_t c) {
        Rng rng(seed, c);
        std::vector<int> pi(n), pool(n), where(n);
        const std::size_t end = std::min(m, (c + 1) * kDrawsPerChunk);
        for (std::size_t t = c * kDrawsPerChunk; t < end; ++t) {
            sample_involution_into(pi, pool, where, rng);
            const double y = y_value(e.matrix(), pi);
            if (std::fmod(y, 2.0) != 0.0) lattice[c] = 0;
            w[t] = (y - d.source_mu()) / r.sigma;
        }
    });
    r.lattice_ok = std::all_of(lattice.begin(), lattice.end(), [](char x) { return x != 0; });
    r.ks = kolmogorov_distance(ecdf(std::move(w)));
    r.floor = 0.5 * (1.0 - kLowerBoundEpsilon) * normal_pdf(1.0 / r.sigma) / r.sigma;
    r.slack = dkw_slack(m);
    r.passes = r.ks >= r.floor - r.slack;
    return r;
}

namespace {

nlohmann::json p_map(const std::vector<std::pair<double, double>>& v) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [p, x] : v) j[p_label(p)] = x;
    return j;
}

}  // namespace

nlohmann::json to_json(const BoundReport& r) {
    return {{"n", r.n},
            {"beta", r.beta},
            {"kp", p_map(r.kp)},
            {"bound", p_map(r.bound)},
            {"l1_refined", r.l1_refined},
            {"gap_bound", r.gap_bound},
            {"valid", r.valid},
            {"valid_strict", r.valid_strict}};
}

nlohmann::json to_json(const TruncationResult& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"lhs", c.lhs},
                          {"rhs", c.rhs},
                          {"status", !c.applicable ? "not applicable" : (c.holds ? "pass" : "fail")}});
    }
    nlohmann::json j{{"gamma_size", r.gamma.size()},
                     {"dprime_total", r.dprime_total},
                     {"mu_prime", r.mu_prime},
                     {"sigma2_prime", r.sigma2_prime},
                     {"collision_prob_bound", r.collision_prob_bound},
                     {"preconditions", r.preconditions},
                     {"checks", checks}};
    j["beta_prime"] = r.beta_prime ? nlohmann::json(*r.beta_prime) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const LowerBoundReport& r) {
    return {{"n", r.n},           {"draws", r.draws},     {"sigma", r.sigma}, {"floor", r.floor},
            {"ks", r.ks},         {"slack", r.slack},     {"beta_over_n", r.beta_over_n},
            {"lattice_ok", r.lattice_ok}, {"passes", r.passes}};
}

std::string lower_bound_csv_header() { return "n,sigma,ks,floor,beta_over_n\n"; }

std::string lower_bound_csv_row(const LowerBoundReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << r.n << ',' << r.sigma << ',' << r.ks << ',' << r.floor << ',' << r.beta_over_n << '\n';
    return out.str();
}

}  // namespace invclt
