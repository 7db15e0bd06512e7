// Exhaustive verification of the coupling at desk-scale n.

#include <algorithm>
#include <cmath>
#include <map>

#include "invclt/coupling.hpp"
#include "invclt/error.hpp"
#include "invclt/parallel.hpp"
#include "invclt/summation.hpp"

namespace invclt {

namespace {

void require_cap(int n, int cap, const char* what) {
    if (n > cap) {
        throw Error(ErrorCode::CapExceeded,
                    std::string(what) + " at n = " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
    }
}

struct WeightedQuad {
    Quad q;
    double p;
};

std::vector<WeightedQuad> positive_quads(const SquareMatrix& d) {
    std::vector<WeightedQuad> out;
    const int n = d.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const Quad q{i, j, k, l};
                    const double w = square_bias_weight(d, q);
                    if (w > 0.0) out.push_back({q, w});
                }
    return out;
}

std::vector<std::vector<int>> all_involutions(int n, int cap) {
    std::vector<std::vector<int>> out;
    out.reserve(involution_count(n));
    for_each_involution(n, [&](std::span<const int> m) { out.emplace_back(m.begin(), m.end()); }, cap);
    return out;
}

/// Atom index of `value` among sorted atoms, merging within kAtomMergeTol.
int atom_index(const ExactDistribution& dist, double value) {
    auto it = std::lower_bound(dist.atoms.begin(), dist.atoms.end(), value - 2 * kAtomMergeTol,
                               [](const Atom& a, double v) { return a.value < v; });
    if (it == dist.atoms.end() || std::fabs(it->value - value) > 2 * kAtomMergeTol) {
        throw Error(ErrorCode::NoCaseMatched, "value outside the exact support");
    }
    return static_cast<int>(it - dist.atoms.begin());
}

/// The coupling index set, written into `out`; returns its size.
int index_set_into(std::span<const int> pi, const Quad& q, std::span<int> mark, int stamp, int* out) {
    int size = 0;
    const int candidates[8] = {q.i, q.j, q.k, q.l, pi[q.i], pi[q.j], pi[q.k], pi[q.l]};
    for (int x : candidates) {
        if (mark[x] != stamp) {
            mark[x] = stamp;
            out[size++] = x;
        }
    }
    return size;
}

}  // namespace

// ---- Stein pair ------------------------------------------------------------------

SteinPairExactReport exact_stein_pair(const CenteredArray& d, int cap) {
    const int n = d.n();
    require_cap(n, cap, "Stein pair enumeration");
    const SquareMatrix& m = d.matrix();
    const ExactDistribution law = exact_w_distribution(d, cap);
    SteinPairExactReport report;
    report.n = n;
    report.closure_ok = true;
    CompensatedSum second;
    std::map<std::pair<int, int>, std::uint64_t> occupancy;
    const double lambda = stein_lambda(n);
    std::vector<int> prime(n);
    std::uint64_t count = 0;

    for_each_involution(
        n,
        [&](std::span<const int> pi) {
            const double w = y_value(m, pi);
            const int a = atom_index(law, w);
            CompensatedSum diff_sum;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    std::copy(pi.begin(), pi.end(), prime.begin());
                    right_multiply_alpha(prime, pi, i, j);
                    const bool degenerate = pi[i] == j;
                    if (!is_fixed_point_free_involution(prime) || prime[i] != j ||
                        (!degenerate && prime[pi[i]] != pi[j])) {
                        report.closure_ok = false;
                    }
                    const double wp = y_value(m, prime);
                    const double diff = w - wp;
                    report.max_difference_formula_error =
                        std::max(report.max_difference_formula_error, std::fabs(diff - stein_difference(m, pi, i, j)));
                    diff_sum += diff;
                    second += diff * diff;
                    ++occupancy[{a, atom_index(law, wp)}];
                    ++count;
                }
            }
            const double mean_diff = diff_sum.value() / (n * (n - 1.0));
            report.max_linearity_error = std::max(report.max_linearity_error, std::fabs(mean_diff - lambda * w));
        },
        cap);

    report.second_moment = second.value() / static_cast<double>(count);
    report.exchangeable = true;
    for (const auto& [key, c] : occupancy) {
        const auto it = occupancy.find({key.second, key.first});
        if (it == occupancy.end() || it->second != c) report.exchangeable = false;
    }
    return report;
}

// ---- index-image laws --------------------------------------------------------------

double image_probability(int n, std::span<const std::pair<int, int>> constraints) {
    std::vector<int> map(static_cast<std::size_t>(n), -1);
    int pairs = 0;
    for (const auto& [a, b] : constraints) {
        if (a < 0 || b < 0 || a >= n || b >= n || a == b) return 0.0;
        if (map[a] == -1 && map[b] == -1) {
            map[a] = b;
            map[b] = a;
            ++pairs;
        } else if (map[a] != b) {
            return 0.0;
        }
    }
    double p = 1.0;
    for (int r = 0; r < pairs; ++r) p /= (n - 1.0 - 2.0 * r);
    return p;
}

namespace {

/// p2 / p(i,j,k,l) as a numerator over (n-1)(n-3).
int p2_numerator(int n, int i, int j, int s, int t) {
    if (s == j && t == i) return n - 3;
    if (s == j || t == i) return 0;
    if (s == i || t == j) return 0;
    if (s == t) return 0;
    return 1;  // t outside {j, s, i}, equivalently s outside {i, t, j}
}

}  // namespace

double index_image_p2(const QuadrupleTable& table, int i, int j, int k, int l, int s, int t) {
    const double p = table.weight(Quad{i, j, k, l});
    if (p == 0.0) return 0.0;
    const int n = table.n();
    return p * p2_numerator(n, i, j, s, t) / ((n - 1.0) * (n - 3.0));
}

double index_image_p3(const QuadrupleTable& table, int i, int j, int k, int l, int s, int t, int r) {
    const double p = table.weight(Quad{i, j, k, l});
    if (p == 0.0) return 0.0;
    const std::pair<int, int> c[3] = {{i, s}, {j, t}, {l, r}};
    return p * image_probability(table.n(), c);
}

std::optional<double> index_image_p3_closed_form(const QuadrupleTable& table, int i, int j, int k, int l, int s,
                                                 int t, int r) {
    if (s != k) return std::nullopt;
    int v[6] = {i, j, k, l, r, t};
    std::sort(v, v + 6);
    if (std::adjacent_find(v, v + 6) != v + 6) return std::nullopt;
    const int n = table.n();
    return table.weight(Quad{i, j, k, l}) / ((n - 1.0) * (n - 3.0) * (n - 5.0));
}

// ---- pi-dagger marginal ------------------------------------------------------------

PiDaggerMarginalReport exact_pi_dagger_marginal(const CenteredArray& d, int cap) {
    const int n = d.n();
    require_cap(n, cap, "pi-dagger sweep");
    if (n < 6) throw Error(ErrorCode::DimensionTooSmall, "pi-dagger sweep needs n >= 6");
    const QuadrupleTable table(d, std::max(cap, n));
    const auto pis = all_involutions(n, cap);
    const std::uint64_t total = pis.size();
    const std::uint64_t phi_count = involution_count(n - 4);

    PiDaggerMarginalReport rep;
    rep.n = n;
    rep.closure_ok = true;
    rep.uniform = true;
    rep.p2_exact = true;
    rep.p2_zeros_ok = true;
    rep.p3_exact = true;
    rep.expected_count_per_phi = total / phi_count;
    rep.min_count = ~std::uint64_t{0};

    const std::size_t nn = static_cast<std::size_t>(n);
    std::vector<std::uint64_t> c2(nn * nn), c3(nn * nn * nn);
    std::vector<int> dag(nn);

    table.for_each_positive([&](const Quad& q, double p) {
        ++rep.quads_checked;
        std::map<std::vector<int>, std::uint64_t> outcomes;
        std::fill(c2.begin(), c2.end(), 0);
        std::fill(c3.begin(), c3.end(), 0);
        for (const auto& pi : pis) {
            int matches = 0;
            int first = 0;
            for (int c = 1; c <= 10; ++c) {
                if (case_row_matches(c, pi, q)) {
                    ++matches;
                    if (!first) first = c;
                }
            }
            const CaseInfo info = matches ? classify(pi, q) : CaseInfo{};
            if (matches == 0) ++rep.unmatched;
            if (matches > 1) ++rep.multiply_matched;
            if ((info.r1 == 2 && info.r2 == 1) || (info.r1 == 1 && info.r2 == 2)) ++rep.impossible_pairs;
            ++c2[static_cast<std::size_t>(pi[q.i]) * nn + pi[q.j]];
            ++c3[(static_cast<std::size_t>(pi[q.i]) * nn + pi[q.j]) * nn + pi[q.l]];
            if (!first) continue;
            if (kCaseSignature[first - 1] != std::pair{info.r1, info.r2}) ++rep.signature_mismatch;
            ++rep.case_occupancy[first - 1];

            apply_pi_dagger(pi, q, first, dag);
            bool ok = is_fixed_point_free_involution(dag) && dag[q.i] == q.k && dag[q.j] == q.l;
            const auto idx = coupling_index_set(pi, q);
            for (int x = 0; x < n && ok; ++x) {
                if (!std::binary_search(idx.begin(), idx.end(), x) && dag[x] != pi[x]) ok = false;
            }
            if (!ok) rep.closure_ok = false;
            ++outcomes[dag];
        }

        // conditional uniformity over the |Pi_{n-4}| admissible completions
        if (outcomes.size() != phi_count) rep.uniform = false;
        for (const auto& [phi, c] : outcomes) {
            rep.min_count = std::min(rep.min_count, c);
            rep.max_count = std::max(rep.max_count, c);
            if (c != rep.expected_count_per_phi) rep.uniform = false;
            rep.max_deviation =
                std::max(rep.max_deviation, std::fabs(static_cast<double>(c) / total - 1.0 / phi_count));
        }
        if (outcomes.size() < phi_count) rep.max_deviation = std::max(rep.max_deviation, 1.0 / phi_count);

        // (quad, pi(I), pi(J)) against the closed form
        const std::uint64_t denom2 = static_cast<std::uint64_t>(n - 1) * (n - 3);
        for (int s = 0; s < n; ++s) {
            for (int t = 0; t < n; ++t) {
                const std::uint64_t c = c2[static_cast<std::size_t>(s) * nn + t];
                const int num = p2_numerator(n, q.i, q.j, s, t);
                if (c * denom2 != total * static_cast<std::uint64_t>(num)) rep.p2_exact = false;
                if (num == 0 && c != 0) rep.p2_zeros_ok = false;
                const double observed = p * static_cast<double>(c) / total;
                rep.p2_max_error =
                    std::max(rep.p2_max_error, std::fabs(observed - index_image_p2(table, q.i, q.j, q.k, q.l, s, t)));
            }
        }

        // (quad, pi(I), pi(J), pi(L)) against the closed form and the general rule
        const std::uint64_t denom3 = static_cast<std::uint64_t>(n - 1) * (n - 3) * (n - 5);
        for (int s = 0; s < n; ++s) {
            for (int t = 0; t < n; ++t) {
                for (int r = 0; r < n; ++r) {
                    const std::uint64_t c = c3[(static_cast<std::size_t>(s) * nn + t) * nn + r];
                    const double observed = p * static_cast<double>(c) / total;
                    const auto closed = index_image_p3_closed_form(table, q.i, q.j, q.k, q.l, s, t, r);
                    if (closed) {
                        if (c * denom3 != total) rep.p3_exact = false;
                        rep.p3_max_error = std::max(rep.p3_max_error, std::fabs(observed - *closed));
                    }
                    rep.p3_max_error = std::max(
                        rep.p3_max_error, std::fabs(observed - index_image_p3(table, q.i, q.j, q.k, q.l, s, t, r)));
                }
            }
        }
    });
    if (rep.quads_checked == 0) rep.min_count = 0;
    return rep;
}

// ---- zero-bias moments ----------------------------------------------------------

std::vector<ZeroBiasMomentCheck> exact_zero_bias_moments(const CenteredArray& d, int k_max, ZeroBiasRoute route,
                                                         int cap) {
    const int n = d.n();
    require_cap(n, cap, "zero-bias moment enumeration");
    if (n < 6) throw Error(ErrorCode::DimensionTooSmall, "zero-bias moments need n >= 6");
    const SquareMatrix& m = d.matrix();
    const auto quads = positive_quads(m);
    const auto pis = all_involutions(n, cap);

    // lhs: E[W^{k+1}], k = 1..k_max
    std::vector<CompensatedSum> w_moments(static_cast<std::size_t>(k_max) + 2);
    for (const auto& pi : pis) {
        const double w = y_value(m, pi);
        double pw = 1.0;
        for (int r = 0; r <= k_max + 1; ++r) {
            w_moments[r] += pw;
            pw *= w;
        }
    }

    // rhs: E[(W*)^r], r = 0..k_max-1
    std::vector<CompensatedSum> star(static_cast<std::size_t>(std::max(k_max, 1)));
    std::vector<int> dag(n), ddag(n);
    auto accumulate = [&](double weight, double a, double b) {
        for (int r = 0; r < k_max; ++r) star[r] += weight * expected_interpolated_power(a, b, r);
    };

    if (route == ZeroBiasRoute::Coupling) {
        const double inv_total = 1.0 / static_cast<double>(pis.size());
        for (const auto& pi : pis) {
            for (const auto& [q, p] : quads) {
                const CaseInfo info = classify(pi, q);
                apply_pi_dagger(pi, q, info.case_id, dag);
                std::copy(dag.begin(), dag.end(), ddag.begin());
                right_multiply_alpha(ddag, dag, q.i, q.j);
                accumulate(p * inv_total, y_value(m, dag), y_value(m, ddag));
            }
        }
    } else {
        const double inv_completions = 1.0 / static_cast<double>(involution_count(n - 4));
        std::vector<int> rest;
        for (const auto& [q, p] : quads) {
            rest.clear();
            for (int x = 0; x < n; ++x) {
                if (x != q.i && x != q.j && x != q.k && x != q.l) rest.push_back(x);
            }
            for_each_involution(
                n - 4,
                [&](std::span<const int> sub) {
                    dag[q.i] = q.k;
                    dag[q.k] = q.i;
                    dag[q.j] = q.l;
                    dag[q.l] = q.j;
                    for (std::size_t a = 0; a < rest.size(); ++a) dag[rest[a]] = rest[sub[a]];
                    std::copy(dag.begin(), dag.end(), ddag.begin());
                    right_multiply_alpha(ddag, dag, q.i, q.j);
                    accumulate(p * inv_completions, y_value(m, dag), y_value(m, ddag));
                },
                cap);
        }
    }

    const double total = static_cast<double>(pis.size());
    std::vector<ZeroBiasMomentCheck> out;
    for (int k = 1; k <= k_max; ++k) {
        out.push_back({k, w_moments[k + 1].value() / total, k * star[k - 1].value()});
    }
    return out;
}

// ---- exact E|W - W*| -----------------------------------------------------------

double exact_gap(const CenteredArray& d, int cap, unsigned threads) {
    const int n = d.n();
    require_cap(n, cap, "exact coupling gap");
    if (n < 6) throw Error(ErrorCode::DimensionTooSmall, "exact coupling gap needs n >= 6");
    const SquareMatrix& m = d.matrix();
    const auto quads = positive_quads(m);
    const auto pis = all_involutions(n, cap);

    constexpr std::size_t kChunks = 64;
    const std::size_t chunks = std::min(kChunks, pis.size());
    std::vector<CompensatedSum> partial(chunks);
    for_each_chunk(chunks, threads, [&](std::size_t c) {
        const std::size_t begin = pis.size() * c / chunks;
        const std::size_t end = pis.size() * (c + 1) / chunks;
        std::vector<int> dag(n), ddag(n), mark(n, -1);
        int stamp = 0;
        int idx[8];
        for (std::size_t t = begin; t < end; ++t) {
            const std::span<const int> pi = pis[t];
            for (const auto& [q, p] : quads) {
                int case_id = 0;
                for (int row = 1; row <= 10 && !case_id; ++row) {
                    if (case_row_matches(row, pi, q)) case_id = row;
                }
                apply_pi_dagger(pi, q, case_id, dag);
                std::copy(dag.begin(), dag.end(), ddag.begin());
                right_multiply_alpha(ddag, dag, q.i, q.j);
                const int size = index_set_into(pi, q, mark, ++stamp, idx);
                double tw = 0.0, td = 0.0, tdd = 0.0;
                for (int a = 0; a < size; ++a) {
                    const int x = idx[a];
                    tw += m(x, pi[x]);
                    td += m(x, dag[x]);
                    tdd += m(x, ddag[x]);
                }
                // W - W* = T - (U T† + (1-U) T‡) because S is shared
                partial[c] += p * expected_abs_gap(tw, td, tdd);
            }
        }
    });
    CompensatedSum total;
    for (const auto& s : partial) total += s;
    return total.value() / static_cast<double>(pis.size());
}

}  // namespace invclt
