#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "invclt/array_core.hpp"
#include "invclt/rng.hpp"

namespace invclt {

/// Fixed-point-free involution of {0..n-1}. Serialized 1-based.
class Involution {
public:
    Involution() = default;
    /// Throws unless `map` is a fixed-point-free involution.
    explicit Involution(std::vector<int> map);

    int n() const noexcept { return static_cast<int>(map_.size()); }
    int operator()(int i) const noexcept { return map_[static_cast<std::size_t>(i)]; }
    std::span<const int> map() const noexcept { return map_; }

    /// Cycles (i, pi(i)) with i < pi(i), ordered by i.
    std::vector<std::pair<int, int>> cycles() const;
    bool has_cycle(int a, int b) const noexcept { return map_[static_cast<std::size_t>(a)] == b; }

    friend bool operator==(const Involution&, const Involution&) = default;
    friend auto operator<=>(const Involution&, const Involution&) = default;

    struct Unchecked {};
    Involution(std::vector<int> map, Unchecked) : map_(std::move(map)) {}

private:
    std::vector<int> map_;
};

/// True when `map` is a permutation with map[map[i]] == i and no fixed point.
bool is_fixed_point_free_involution(std::span<const int> map) noexcept;

/// (n-1)!! = |Pi_n| for even n >= 0.
std::uint64_t involution_count(int n);

inline constexpr int kDefaultEnumerationCap = 16;

/// Canonical order: pair the smallest unpaired index with each larger
/// unpaired index in increasing order, recursing. The callback receives
/// a 0-based image array that is only valid during the call.
void for_each_involution(int n, const std::function<void(std::span<const int>)>& visit,
                         int cap = kDefaultEnumerationCap);

std::vector<Involution> enumerate_involutions(int n, int cap = kDefaultEnumerationCap);

/// Sequential pairing: the smallest unmatched index is matched to a
/// uniform choice among the other unmatched indices.
Involution sample_involution(int n, Rng& rng);

/// Same draw written into a caller-owned buffer of size n; `pool` and
/// `where` are scratch of size n.
void sample_involution_into(std::span<int> out, std::span<int> pool, std::span<int> where, Rng& rng);

double y_value(const SquareMatrix& e, std::span<const int> pi);
double y_value(const SymmetricArray& e, const Involution& pi);
double y_value(const CenteredArray& d, const Involution& pi);

struct Atom {
    double value = 0.0;
    double probability = 0.0;
};

/// Exact law of a discrete variable; values strictly increasing.
struct ExactDistribution {
    std::vector<Atom> atoms;

    double mean() const;
    double variance() const;
    double moment(int k) const;
};

inline constexpr double kAtomMergeTol = 1e-12;

/// Sorts (value, weight) pairs and merges values closer than `tol`.
ExactDistribution make_distribution(std::vector<Atom> weighted, double tol = kAtomMergeTol);

/// Law of W = Y_D over uniform Pi_n by enumeration.
ExactDistribution exact_w_distribution(const CenteredArray& d, int cap = kDefaultEnumerationCap);

nlohmann::json to_json(const Involution& pi);
Involution involution_from_json(const nlohmann::json& j);
std::string distribution_to_csv(const ExactDistribution& dist);

}  // namespace invclt
