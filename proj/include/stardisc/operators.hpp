#pragma once

// Variation operators on permutations and genotypes.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "stardisc/error.hpp"
#include "stardisc/random.hpp"
#include "stardisc/sequence.hpp"

namespace stardisc {

/// Partially matched crossover.
///
/// The child takes b's alleles on [cut1, cut2). Every other position takes a's
/// allele; if that allele already occurs in the copied segment it is replaced
/// by following the segment correspondence b[i] -> a[i] until a free allele
/// is reached.
template <class T>
std::vector<T> pmx(std::span<const T> a, std::span<const T> b, std::size_t cut1, std::size_t cut2) {
    if (a.size() != b.size()) throw ValidationError("pmx parents have different lengths");
    if (!(cut1 < cut2 && cut2 <= a.size())) throw ValidationError("pmx cut points out of range");

    std::vector<T> child(a.begin(), a.end());
    // Position of each segment allele of b, looked up linearly: permutations
    // here are at most a few hundred long.
    auto segment_position = [&](const T& v) -> std::ptrdiff_t {
        for (std::size_t i = cut1; i < cut2; ++i)
            if (b[i] == v) return static_cast<std::ptrdiff_t>(i);
        return -1;
    };
    for (std::size_t i = cut1; i < cut2; ++i) child[i] = b[i];
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i >= cut1 && i < cut2) continue;
        T v = a[i];
        for (auto p = segment_position(v); p >= 0; p = segment_position(v))
            v = a[static_cast<std::size_t>(p)];
        child[i] = v;
    }
    return child;
}

template <class T>
std::vector<T> pmx(const std::vector<T>& a, const std::vector<T>& b, std::size_t cut1, std::size_t cut2) {
    return pmx(std::span<const T>(a), std::span<const T>(b), cut1, cut2);
}

/// Uniform partial reordering: each position is selected independently with
/// probability `match_prob` and the selected alleles are shuffled among the
/// selected positions. `selected`, when given, receives the number of
/// selected positions.
template <class T>
std::vector<T> mutate_permutation(std::vector<T> p, double match_prob, Rng& rng,
                                  std::size_t* selected = nullptr) {
    std::vector<std::size_t> positions;
    std::bernoulli_distribution pick(std::clamp(match_prob, 0.0, 1.0));
    for (std::size_t i = 0; i < p.size(); ++i)
        if (pick(rng)) positions.push_back(i);
    if (selected) *selected = positions.size();
    for (std::size_t s = positions.size(); s > 1; --s) {
        const std::size_t r = uniform_index(rng, s);
        std::swap(p[positions[s - 1]], p[positions[r]]);
    }
    return p;
}

/// Two distinct cut points, uniform over pairs 0 <= cut1 < cut2 <= length.
inline std::pair<std::size_t, std::size_t> random_cuts(std::size_t length, Rng& rng) {
    const std::size_t c1 = uniform_index(rng, length + 1);
    std::size_t c2 = uniform_index(rng, length);
    if (c2 >= c1) ++c2;
    return {std::min(c1, c2), std::max(c1, c2)};
}

inline Genotype random_genotype(std::size_t d, Rng& rng) {
    const auto primes = first_primes(d);
    Genotype g;
    g.reduced.reserve(d - 1);
    for (std::size_t j = 1; j < d; ++j) {
        std::vector<Digit> r(primes[j] - 1);
        std::iota(r.begin(), r.end(), Digit{1});
        std::shuffle(r.begin(), r.end(), rng);
        g.reduced.push_back(std::move(r));
    }
    return g;
}

/// PMX applied to every permutation with independent cuts; returns the child
/// built on `a`.
inline Genotype crossover(const Genotype& a, const Genotype& b, Rng& rng) {
    if (a.reduced.size() != b.reduced.size())
        throw ValidationError("crossover parents have different dimensions");
    Genotype child;
    child.reduced.reserve(a.reduced.size());
    for (std::size_t j = 0; j < a.reduced.size(); ++j) {
        const auto [c1, c2] = random_cuts(a.reduced[j].size(), rng);
        child.reduced.push_back(pmx(a.reduced[j], b.reduced[j], c1, c2));
    }
    return child;
}

inline Genotype mutate(const Genotype& g, double match_prob, Rng& rng) {
    Genotype child;
    child.reduced.reserve(g.reduced.size());
    for (const auto& r : g.reduced) child.reduced.push_back(mutate_permutation(r, match_prob, rng));
    return child;
}

}  // namespace stardisc
