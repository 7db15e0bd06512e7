#include "invclt/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "invclt/error.hpp"
#include "invclt/parallel.hpp"
#include "invclt/summation.hpp"

namespace invclt {

Involution alpha_compose(const Involution& pi, int i, int j) {
    if (i == j) throw Error(ErrorCode::EqualIndices, "alpha needs distinct indices");
    std::vector<int> out(pi.map().begin(), pi.map().end());
    right_multiply_alpha(out, pi.map(), i, j);
    if (!is_fixed_point_free_involution(out)) {
        throw Error(ErrorCode::NoCaseMatched, "alpha composition left Pi_n");
    }
    return Involution(std::move(out), Involution::Unchecked{});
}

double stein_difference(const SquareMatrix& d, std::span<const int> pi, int i, int j) noexcept {
    return 2.0 * (d(i, pi[i]) + d(j, pi[j]) - (d(i, j) + d(pi[i], pi[j])));
}

SteinPairDraw stein_pair_draw(const CenteredArray& d, Rng& rng) {
    const int n = d.n();
    SteinPairDraw out;
    out.pi = sample_involution(n, rng);
    out.I = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    out.J = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n - 1)));
    if (out.J >= out.I) ++out.J;
    out.pi_prime = alpha_compose(out.pi, out.I, out.J);
    out.W = y_value(d, out.pi);
    out.W_prime = y_value(d, out.pi_prime);
    return out;
}

// ---- square-bias law ---------------------------------------------------------

double square_bias_constant(int n) {
    if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "c_n needs n >= 4");
    const double m = n - 1.0;
    return 1.0 / (2.0 * m * m * (n - 3.0));
}

double square_bias_weight(const SquareMatrix& d, const Quad& q) noexcept {
    if (!q.distinct()) return 0.0;
    const double b = d(q.i, q.k) + d(q.j, q.l) - (d(q.i, q.j) + d(q.k, q.l));
    const double m = d.n() - 1.0;
    return b * b / (2.0 * m * m * (d.n() - 3.0));
}

QuadrupleTable::QuadrupleTable(const CenteredArray& d, int cap)
    : n_(d.n()), c_n_(square_bias_constant(d.n())), d_(d.matrix()) {
    if (n_ > cap) {
        throw Error(ErrorCode::CapExceeded,
                    "quadruple table for n = " + std::to_string(n_) + " exceeds cap " + std::to_string(cap));
    }
    const std::size_t n = static_cast<std::size_t>(n_);
    cumulative_.resize(n * n * n * n);
    CompensatedSum running;
    std::size_t idx = 0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k)
                for (int l = 0; l < n_; ++l) {
                    running += square_bias_weight(d_, Quad{i, j, k, l});
                    cumulative_[idx++] = running.value();
                }
}

double QuadrupleTable::weight(const Quad& q) const noexcept { return square_bias_weight(d_, q); }

Quad QuadrupleTable::unflatten(std::size_t idx) const noexcept {
    const std::size_t n = static_cast<std::size_t>(n_);
    Quad q;
    q.l = static_cast<int>(idx % n);
    idx /= n;
    q.k = static_cast<int>(idx % n);
    idx /= n;
    q.j = static_cast<int>(idx % n);
    q.i = static_cast<int>(idx / n);
    return q;
}

Quad QuadrupleTable::sample(Rng& rng) const {
    const double target = rng.uniform01() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if (it == cumulative_.end()) it = std::lower_bound(cumulative_.begin(), cumulative_.end(), cumulative_.back());
    return unflatten(static_cast<std::size_t>(it - cumulative_.begin()));
}

QuadrupleTable square_bias_table(const CenteredArray& d, int cap) { return QuadrupleTable(d, cap); }

QuadrupleSampler::QuadrupleSampler(const CenteredArray& d, int table_cap) : d_(d.matrix()) {
    const double m = 4.0 * d_.max_abs();
    envelope_ = m * m;
    if (d.n() <= table_cap) table_.emplace(d, table_cap);
}

Quad QuadrupleSampler::sample_by_rejection(Rng& rng) const {
    const auto n = static_cast<std::uint64_t>(d_.n());
    while (true) {
        Quad q;
        q.i = static_cast<int>(rng.uniform_index(n));
        q.j = static_cast<int>(rng.uniform_index(n));
        q.k = static_cast<int>(rng.uniform_index(n));
        q.l = static_cast<int>(rng.uniform_index(n));
        if (!q.distinct()) continue;
        const double b = d_(q.i, q.k) + d_(q.j, q.l) - (d_(q.i, q.j) + d_(q.k, q.l));
        if (rng.uniform01() * envelope_ < b * b) return q;
    }
}

Quad QuadrupleSampler::sample(Rng& rng) const { return table_ ? table_->sample(rng) : sample_by_rejection(rng); }

// ---- pi-dagger -------------------------------------------------------------------

bool case_row_matches(int case_id, std::span<const int> pi, const Quad& q) noexcept {
    const int pI = pi[q.i];
    const int pJ = pi[q.j];
    const int pK = pi[q.k];
    switch (case_id) {
        case 1: return pI == q.k && pJ != q.l;
        case 2: return pI != q.k && pJ == q.l;
        case 3: return pI == q.l && pJ != q.k;
        case 4: return pI != q.l && pJ == q.k;
        case 5: return pI == q.j && pK != q.l;
        case 6: return pI != q.j && pK == q.l;
        case 7: return pI == q.k && pJ == q.l;
        case 8: return pI == q.j && pK == q.l;
        case 9: return pI == q.l && pJ == q.k;
        case 10: {
            const int r1 = (pI == q.k || pI == q.l) + (pJ == q.k || pJ == q.l);
            const int r2 = (pI == q.j || pI == q.l) + (pK == q.j || pK == q.l);
            return r1 == 0 && r2 == 0;
        }
        default: return false;
    }
}

CaseInfo classify(std::span<const int> pi, const Quad& q) {
    CaseInfo info;
    const int pI = pi[q.i];
    const int pJ = pi[q.j];
    const int pK = pi[q.k];
    info.r1 = (pI == q.k || pI == q.l) + (pJ == q.k || pJ == q.l);
    info.r2 = (pI == q.j || pI == q.l) + (pK == q.j || pK == q.l);
    for (int c = 1; c <= 10; ++c) {
        if (case_row_matches(c, pi, q)) {
            info.case_id = c;
            return info;
        }
    }
    throw Error(ErrorCode::NoCaseMatched, "no row of the case table applies (R1=" + std::to_string(info.r1) +
                                              ", R2=" + std::to_string(info.r2) + ")");
}

void apply_pi_dagger(std::span<const int> pi, const Quad& q, int case_id, std::span<int> out) noexcept {
    std::copy(pi.begin(), pi.end(), out.begin());
    const int I = q.i, J = q.j, K = q.k, L = q.l;
    switch (case_id) {
        case 1: right_multiply_alpha(out, pi, J, L); break;
        case 2: right_multiply_alpha(out, pi, I, K); break;
        case 3:
            right_multiply_alpha(out, pi, J, K);
            right_multiply_transposition(out, I, J);
            right_multiply_transposition(out, K, L);
            break;
        case 4:
            right_multiply_alpha(out, pi, I, L);
            right_multiply_transposition(out, I, J);
            right_multiply_transposition(out, K, L);
            break;
        case 5:
            right_multiply_alpha(out, pi, K, L);
            right_multiply_transposition(out, I, L);
            right_multiply_transposition(out, J, K);
            break;
        case 6:
            right_multiply_alpha(out, pi, I, J);
            right_multiply_transposition(out, I, L);
            right_multiply_transposition(out, J, K);
            break;
        case 7: break;
        case 8:
            right_multiply_transposition(out, I, L);
            right_multiply_transposition(out, J, K);
            break;
        case 9:
            right_multiply_transposition(out, I, J);
            right_multiply_transposition(out, K, L);
            break;
        case 10:
            right_multiply_alpha(out, pi, I, K);
            right_multiply_alpha(out, pi, J, L);
            break;
        default: break;
    }
}

PiDagger pi_dagger(const Involution& pi, const Quad& q) {
    if (!q.distinct()) throw Error(ErrorCode::EqualIndices, "quadruple indices must be distinct");
    const CaseInfo info = classify(pi, q);
    std::vector<int> out(static_cast<std::size_t>(pi.n()));
    apply_pi_dagger(pi.map(), q, info.case_id, out);
    if (!is_fixed_point_free_involution(out) || out[q.i] != q.k || out[q.j] != q.l) {
        throw Error(ErrorCode::NoCaseMatched, "case " + std::to_string(info.case_id) + " broke the planted cycles");
    }
    return {Involution(std::move(out), Involution::Unchecked{}), info.case_id};
}

std::vector<int> coupling_index_set(std::span<const int> pi, const Quad& q) {
    std::vector<int> s = {q.i, q.j, q.k, q.l, pi[q.i], pi[q.j], pi[q.k], pi[q.l]};
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

// ---- zero-bias draw --------------------------------------------------------------

double expected_abs_gap(double w, double a, double b) noexcept {
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    if (w <= lo) return 0.5 * (lo + hi) - w;
    if (w >= hi) return w - 0.5 * (lo + hi);
    return ((w - lo) * (w - lo) + (hi - w) * (hi - w)) / (2.0 * (hi - lo));
}

double expected_interpolated_power(double a, double b, int m) noexcept {
    // (a^{m+1} - b^{m+1}) / ((m+1)(a-b)) written as a sum of monomials
    double s = 0.0;
    double ap = 1.0;
    for (int r = 0; r <= m; ++r) {
        s += ap * std::pow(b, m - r);
        ap *= a;
    }
    return s / (m + 1);
}

namespace {

double partial_sum(const SquareMatrix& d, std::span<const int> perm, std::span<const int> indices) {
    double s = 0.0;
    for (int x : indices) s += d(x, perm[x]);
    return s;
}

}  // namespace

ZeroBiasDraw assemble_zero_bias(const CenteredArray& d, const Involution& pi, const Quad& q, double u) {
    const int n = d.n();
    const SquareMatrix& m = d.matrix();
    ZeroBiasDraw z;
    z.pi = pi;
    z.quad = q;
    z.U = u;
    auto [dag, case_id] = pi_dagger(pi, q);
    const CaseInfo info = classify(pi, q);
    z.case_id = case_id;
    z.r1 = info.r1;
    z.r2 = info.r2;
    z.pi_dagger = std::move(dag);

    std::vector<int> ddag(z.pi_dagger.map().begin(), z.pi_dagger.map().end());
    right_multiply_alpha(ddag, z.pi_dagger.map(), q.i, q.j);
    z.pi_ddagger = Involution(std::move(ddag), Involution::Unchecked{});
    z.index_set = coupling_index_set(pi.map(), q);

    std::vector<char> in_set(static_cast<std::size_t>(n), 0);
    for (int x : z.index_set) in_set[x] = 1;
    for (int x = 0; x < n; ++x) {
        if (!in_set[x] && (z.pi_dagger(x) != pi(x) || z.pi_ddagger(x) != pi(x))) {
            throw Error(ErrorCode::NoCaseMatched, "coupled permutations disagree off the index set");
        }
    }
    if (!is_fixed_point_free_involution(z.pi_ddagger.map()) || !z.pi_ddagger.has_cycle(q.i, q.j) ||
        !z.pi_ddagger.has_cycle(q.k, q.l)) {
        throw Error(ErrorCode::NoCaseMatched, "pi-ddagger lacks cycles (I,J), (K,L)");
    }

    CompensatedSum s;
    for (int x = 0; x < n; ++x) {
        if (!in_set[x]) s += m(x, pi(x));
    }
    z.S = s.value();
    z.T = partial_sum(m, pi.map(), z.index_set);
    z.T_dagger = partial_sum(m, z.pi_dagger.map(), z.index_set);
    z.T_ddagger = partial_sum(m, z.pi_ddagger.map(), z.index_set);
    z.W = z.S + z.T;
    z.W_dagger = z.S + z.T_dagger;
    z.W_ddagger = z.S + z.T_ddagger;
    z.W_star = z.U * z.W_dagger + (1.0 - z.U) * z.W_ddagger;
    return z;
}

ZeroBiasDraw zero_bias_draw(const CenteredArray& d, const QuadrupleSampler& sampler, Rng& rng) {
    Involution pi = sample_involution(d.n(), rng);
    const Quad q = sampler.sample(rng);
    const double u = rng.uniform01();
    return assemble_zero_bias(d, pi, q, u);
}

ZeroBiasDraw zero_bias_draw(const CenteredArray& d, Rng& rng) {
    const QuadrupleSampler sampler(d);
    return zero_bias_draw(d, sampler, rng);
}

nlohmann::json to_json(const ZeroBiasDraw& z) {
    nlohmann::json j;
    j["pi"] = to_json(z.pi);
    j["quad"] = {z.quad.i + 1, z.quad.j + 1, z.quad.k + 1, z.quad.l + 1};
    j["case_id"] = z.case_id;
    j["R1"] = z.r1;
    j["R2"] = z.r2;
    j["pi_dagger"] = to_json(z.pi_dagger);
    j["pi_ddagger"] = to_json(z.pi_ddagger);
    j["U"] = z.U;
    j["W"] = z.W;
    j["W_dagger"] = z.W_dagger;
    j["W_ddagger"] = z.W_ddagger;
    j["W_star"] = z.W_star;
    j["S"] = z.S;
    j["T"] = z.T;
    j["T_dagger"] = z.T_dagger;
    j["T_ddagger"] = z.T_ddagger;
    nlohmann::json idx = nlohmann::json::array();
    for (int x : z.index_set) idx.push_back(x + 1);
    j["index_set"] = idx;
    return j;
}

// ---- Monte Carlo -------------------------------------------------------------------

namespace {

std::size_t chunk_count(std::size_t m) { return (m + kDrawsPerChunk - 1) / kDrawsPerChunk; }

std::size_t chunk_size(std::size_t m, std::size_t c) {
    return std::min(kDrawsPerChunk, m - c * kDrawsPerChunk);
}

}  // namespace

GapEstimate estimate_gap(const CenteredArray& d, std::size_t m, std::uint64_t seed, unsigned threads) {
    const QuadrupleSampler sampler(d);
    const std::size_t chunks = chunk_count(m);
    std::vector<CompensatedSum> sums(chunks), squares(chunks);
    for_each_chunk(chunks, threads, [&](std::size_t c) {
        Rng rng(seed, c);
        for (std::size_t t = 0; t < chunk_size(m, c); ++t) {
            const ZeroBiasDraw z = zero_bias_draw(d, sampler, rng);
            const double g = std::fabs(z.W - z.W_star);
            sums[c] += g;
            squares[c] += g * g;
        }
    });
    CompensatedSum total, total2;
    for (std::size_t c = 0; c < chunks; ++c) {
        total += sums[c];
        total2 += squares[c];
    }
    GapEstimate out;
    out.draws = m;
    out.mean = total.value() / static_cast<double>(m);
    if (m > 1) {
        const double var = std::max(0.0, (total2.value() - m * out.mean * out.mean) / (m - 1.0));
        out.std_error = std::sqrt(var / static_cast<double>(m));
    }
    return out;
}

std::vector<ZeroBiasDraw> leading_zero_bias_draws(const CenteredArray& d, std::size_t count, std::uint64_t seed) {
    const QuadrupleSampler sampler(d);
    std::vector<ZeroBiasDraw> out;
    out.reserve(count);
    for (std::size_t c = 0; out.size() < count; ++c) {
        Rng rng(seed, c);
        for (std::size_t t = 0; t < kDrawsPerChunk && out.size() < count; ++t) {
            out.push_back(zero_bias_draw(d, sampler, rng));
        }
    }
    return out;
}

std::vector<double> sample_w(const CenteredArray& d, std::size_t m, std::uint64_t seed, unsigned threads) {
    const int n = d.n();
    std::vector<double> out(m);
    const std::size_t chunks = chunk_count(m);
    for_each_chunk(chunks, threads, [&](std::size_t c) {
        Rng rng(seed, c);
        std::vector<int> pi(n), pool(n), where(n);
        for (std::size_t t = 0; t < chunk_size(m, c); ++t) {
            sample_involution_into(pi, pool, where, rng);
            out[c * kDrawsPerChunk + t] = y_value(d.matrix(), pi);
        }
    });
    return out;
}

}  // namespace invclt
