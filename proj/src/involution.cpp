#include "invclt/involution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "invclt/error.hpp"
#include "invclt/summation.hpp"

namespace invclt {

namespace {

void require_even(int n) {
    if (n < 0 || n % 2 != 0) {
        throw Error(ErrorCode::OddDimension, "n = " + std::to_string(n) + " admits no fixed-point-free involution");
    }
}

void require_cap(int n, int cap) {
    if (n > cap) {
        throw Error(ErrorCode::CapExceeded,
                    "enumeration of n = " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
    }
}

}  // namespace

bool is_fixed_point_free_involution(std::span<const int> map) noexcept {
    const int n = static_cast<int>(map.size());
    for (int i = 0; i < n; ++i) {
        const int j = map[i];
        if (j < 0 || j >= n || j == i || map[j] != i) return false;
    }
    return true;
}

Involution::Involution(std::vector<int> map) : map_(std::move(map)) {
    if (!is_fixed_point_free_involution(map_)) {
        throw Error(ErrorCode::ParseError, "not a fixed-point-free involution");
    }
}

std::vector<std::pair<int, int>> Involution::cycles() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n(); ++i) {
        if (i < map_[i]) out.emplace_back(i, map_[i]);
    }
    return out;
}

std::uint64_t involution_count(int n) {
    require_even(n);
    std::uint64_t c = 1;
    for (int k = n - 1; k > 1; k -= 2) c *= static_cast<std::uint64_t>(k);
    return c;
}

namespace {

void enumerate_rec(std::vector<int>& map, std::vector<char>& used, int remaining,
                   const std::function<void(std::span<const int>)>& visit) {
    if (remaining == 0) {
        visit(map);
        return;
    }
    const int n = static_cast<int>(map.size());
    int first = 0;
    while (used[first]) ++first;
    used[first] = 1;
    for (int j = first + 1; j < n; ++j) {
        if (used[j]) continue;
        used[j] = 1;
        map[first] = j;
        map[j] = first;
        enumerate_rec(map, used, remaining - 2, visit);
        used[j] = 0;
    }
    used[first] = 0;
}

}  // namespace

void for_each_involution(int n, const std::function<void(std::span<const int>)>& visit, int cap) {
    require_even(n);
    require_cap(n, cap);
    std::vector<int> map(n, -1);
    std::vector<char> used(n, 0);
    enumerate_rec(map, used, n, visit);
}

std::vector<Involution> enumerate_involutions(int n, int cap) {
    std::vector<Involution> out;
    out.reserve(involution_count(n));
    for_each_involution(
        n, [&](std::span<const int> m) { out.emplace_back(std::vector<int>(m.begin(), m.end()), Involution::Unchecked{}); },
        cap);
    return out;
}

void sample_involution_into(std::span<int> out, std::span<int> pool, std::span<int> where, Rng& rng) {
    const int n = static_cast<int>(out.size());
    // pool[0..size) holds the unmatched indices, where[x] is x's slot.
    int size = n;
    for (int i = 0; i < n; ++i) {
        pool[i] = i;
        where[i] = i;
        out[i] = -1;
    }
    auto remove = [&](int x) {
        const int slot = where[x];
        const int last = pool[size - 1];
        pool[slot] = last;
        where[last] = slot;
        --size;
    };
    for (int i = 0; i < n; ++i) {
        if (out[i] >= 0) continue;
        remove(i);
        const int partner = pool[static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(size)))];
        remove(partner);
        out[i] = partner;
        out[partner] = i;
    }
}

Involution sample_involution(int n, Rng& rng) {
    require_even(n);
    std::vector<int> map(n), pool(n), where(n);
    sample_involution_into(map, pool, where, rng);
    return Involution(std::move(map), Involution::Unchecked{});
}

double y_value(const SquareMatrix& e, std::span<const int> pi) {
    if (static_cast<int>(pi.size()) != e.n()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "array is " + std::to_string(e.n()) + "x" + std::to_string(e.n()) + ", involution has n = " +
                        std::to_string(pi.size()));
    }
    double s = 0.0;
    for (int i = 0; i < e.n(); ++i) s += e(i, pi[i]);
    return s;
}

double y_value(const SymmetricArray& e, const Involution& pi) { return y_value(e.matrix(), pi.map()); }
double y_value(const CenteredArray& d, const Involution& pi) { return y_value(d.matrix(), pi.map()); }

double ExactDistribution::moment(int k) const {
    CompensatedSum s;
    for (const auto& a : atoms) s += a.probability * std::pow(a.value, k);
    return s.value();
}

double ExactDistribution::mean() const { return moment(1); }

double ExactDistribution::variance() const {
    const double m = mean();
    CompensatedSum s;
    for (const auto& a : atoms) s += a.probability * (a.value - m) * (a.value - m);
    return s.value();
}

ExactDistribution make_distribution(std::vector<Atom> weighted, double tol) {
    std::sort(weighted.begin(), weighted.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
    ExactDistribution out;
    std::size_t i = 0;
    while (i < weighted.size()) {
        // a run of values within tol of the run's first value forms one atom
        const double anchor = weighted[i].value;
        CompensatedSum p;
        std::size_t j = i;
        while (j < weighted.size() && weighted[j].value - anchor <= tol) {
            p += weighted[j].probability;
            ++j;
        }
        if (p.value() > 0.0) out.atoms.push_back({anchor, p.value()});
        i = j;
    }
    return out;
}

ExactDistribution exact_w_distribution(const CenteredArray& d, int cap) {
    const int n = d.n();
    require_cap(n, cap);
    std::vector<Atom> values;
    values.reserve(involution_count(n));
    const double w = 1.0 / static_cast<double>(involution_count(n));
    for_each_involution(n, [&](std::span<const int> pi) { values.push_back({y_value(d.matrix(), pi), w}); }, cap);
    return make_distribution(std::move(values));
}

nlohmann::json to_json(const Involution& pi) {
    nlohmann::json j = nlohmann::json::array();
    for (int i = 0; i < pi.n(); ++i) j.push_back(pi(i) + 1);
    return j;
}

Involution involution_from_json(const nlohmann::json& j) {
    std::vector<int> map;
    for (const auto& v : j) map.push_back(v.get<int>() - 1);
    return Involution(std::move(map));
}

std::string distribution_to_csv(const ExactDistribution& dist) {
    std::ostringstream out;
    out.precision(17);
    out << "value,probability\n";
    for (const auto& a : dist.atoms) out << a.value << ',' << a.probability << '\n';
    return out.str();
}

}  // namespace invclt
