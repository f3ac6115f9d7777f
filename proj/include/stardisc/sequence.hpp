#pragma once

// Generalized (scrambled) Halton point sets.
//
// A point set is fully determined by its generating vector: one digit
// permutation per prime base, each fixing 0. Coordinate j of the i-th point
// is the scrambled radical inverse of i in the j-th prime base. The optimizer
// works on a reduced genotype where the forced 0 and the forced base-2
// permutation are dropped.

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "stardisc/error.hpp"

namespace stardisc {

using Digit = std::uint32_t;

/// Largest dimension accepted anywhere in the library.
inline constexpr std::size_t kMaxDimension = 200;

/// The first `d` primes in increasing order, by trial division.
inline std::vector<std::uint32_t> first_primes(std::size_t d) {
    if (d == 0 || d > kMaxDimension)
        throw ValidationError("dimension must be in [1, " + std::to_string(kMaxDimension) + "]");
    std::vector<std::uint32_t> primes;
    primes.reserve(d);
    for (std::uint32_t candidate = 2; primes.size() < d; ++candidate) {
        bool is_prime = true;
        for (auto p : primes) {
            if (p * p > candidate) break;
            if (candidate % p == 0) {
                is_prime = false;
                break;
            }
        }
        if (is_prime) primes.push_back(candidate);
    }
    return primes;
}

/// A digit permutation of {0, ..., base-1} with 0 as a fixpoint.
class Permutation {
public:
    Permutation() = default;

    /// Validates `map` (bijection, map[0] == 0) and throws ValidationError otherwise.
    Permutation(std::uint32_t base, std::vector<Digit> map) : base_(base), map_(std::move(map)) {
        if (base_ < 2) throw ValidationError("permutation base must be at least 2");
        if (map_.size() != base_)
            throw ValidationError("permutation for base " + std::to_string(base_) + " has " +
                                  std::to_string(map_.size()) + " entries");
        std::vector<bool> seen(base_, false);
        for (auto v : map_) {
            if (v >= base_ || seen[v])
                throw ValidationError("permutation for base " + std::to_string(base_) +
                                      " is not a bijection");
            seen[v] = true;
        }
        if (map_[0] != 0)
            throw ValidationError("permutation for base " + std::to_string(base_) +
                                  " must map 0 to 0");
    }

    static Permutation identity(std::uint32_t base) {
        std::vector<Digit> map(base);
        std::iota(map.begin(), map.end(), Digit{0});
        return Permutation(base, std::move(map));
    }

    std::uint32_t base() const noexcept { return base_; }
    const std::vector<Digit>& map() const noexcept { return map_; }
    Digit operator[](Digit v) const noexcept { return map_[v]; }

    bool is_identity() const noexcept {
        for (Digit v = 0; v < base_; ++v)
            if (map_[v] != v) return false;
        return true;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::uint32_t base_ = 0;
    std::vector<Digit> map_;
};

/// One permutation per coordinate; coordinate j uses the j-th prime.
class GeneratingVector {
public:
    GeneratingVector() = default;

    explicit GeneratingVector(std::vector<Permutation> perms) : perms_(std::move(perms)) {
        if (perms_.empty() || perms_.size() > kMaxDimension)
            throw ValidationError("generating vector dimension must be in [1, " +
                                  std::to_string(kMaxDimension) + "]");
        const auto primes = first_primes(perms_.size());
        for (std::size_t j = 0; j < perms_.size(); ++j)
            if (perms_[j].base() != primes[j])
                throw ValidationError("permutation " + std::to_string(j) + " has base " +
                                      std::to_string(perms_[j].base()) + ", expected " +
                                      std::to_string(primes[j]));
    }

    /// The classic (unscrambled) Halton generating vector.
    static GeneratingVector identity(std::size_t d) {
        std::vector<Permutation> perms;
        for (auto p : first_primes(d)) perms.push_back(Permutation::identity(p));
        return GeneratingVector(std::move(perms));
    }

    std::size_t dimension() const noexcept { return perms_.size(); }
    const std::vector<Permutation>& perms() const noexcept { return perms_; }
    const Permutation& operator[](std::size_t j) const noexcept { return perms_[j]; }

    std::vector<std::uint32_t> primes() const {
        std::vector<std::uint32_t> out;
        out.reserve(perms_.size());
        for (const auto& p : perms_) out.push_back(p.base());
        return out;
    }

    friend bool operator==(const GeneratingVector&, const GeneratingVector&) = default;

private:
    std::vector<Permutation> perms_;
};

/// Reduced representation used by the optimizer. Entry j is a permutation of
/// {1, ..., p-1} for the (j+2)-th prime p; the base-2 permutation is implied.
struct Genotype {
    std::vector<std::vector<Digit>> reduced;

    std::size_t dimension() const noexcept { return reduced.size() + 1; }

    friend bool operator==(const Genotype&, const Genotype&) = default;
    friend auto operator<=>(const Genotype&, const Genotype&) = default;
};

/// Throws ValidationError unless every reduced permutation is a bijection of
/// {1, ..., p-1} for the matching prime.
inline void validate(const Genotype& g) {
    const std::size_t d = g.dimension();
    const auto primes = first_primes(d);
    for (std::size_t j = 0; j < g.reduced.size(); ++j) {
        const auto p = primes[j + 1];
        const auto& r = g.reduced[j];
        if (r.size() != p - 1)
            throw ValidationError("genotype entry " + std::to_string(j) + " has " +
                                  std::to_string(r.size()) + " alleles, expected " +
                                  std::to_string(p - 1));
        std::vector<bool> seen(p, false);
        for (auto v : r) {
            if (v == 0 || v >= p || seen[v])
                throw ValidationError("genotype entry " + std::to_string(j) +
                                      " is not a permutation of 1.." + std::to_string(p - 1));
            seen[v] = true;
        }
    }
}

/// Prepends the fixed base-2 permutation and a leading 0 to every entry.
inline GeneratingVector genotype_to_vector(const Genotype& g) {
    validate(g);
    const auto primes = first_primes(g.dimension());
    std::vector<Permutation> perms;
    perms.reserve(primes.size());
    perms.push_back(Permutation::identity(2));
    for (std::size_t j = 0; j < g.reduced.size(); ++j) {
        std::vector<Digit> map;
        map.reserve(primes[j + 1]);
        map.push_back(0);
        map.insert(map.end(), g.reduced[j].begin(), g.reduced[j].end());
        perms.emplace_back(primes[j + 1], std::move(map));
    }
    return GeneratingVector(std::move(perms));
}

inline Genotype vector_to_genotype(const GeneratingVector& gv) {
    Genotype g;
    g.reduced.reserve(gv.dimension() - 1);
    for (std::size_t j = 1; j < gv.dimension(); ++j) {
        const auto& map = gv[j].map();
        g.reduced.emplace_back(map.begin() + 1, map.end());
    }
    return g;
}

inline Genotype identity_genotype(std::size_t d) {
    return vector_to_genotype(GeneratingVector::identity(d));
}

/// n points in [0,1)^d stored row-major.
class PointSet {
public:
    PointSet() = default;

    PointSet(std::size_t n, std::size_t d) : n_(n), d_(d), coords_(n * d, 0.0) {}

    PointSet(std::size_t n, std::size_t d, std::vector<double> coords)
        : n_(n), d_(d), coords_(std::move(coords)) {
        if (coords_.size() != n_ * d_)
            throw ValidationError("point set has " + std::to_string(coords_.size()) +
                                  " coordinates, expected " + std::to_string(n_ * d_));
        for (double c : coords_)
            if (!(c >= 0.0 && c < 1.0))
                throw ValidationError("point coordinate outside [0,1)");
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t dimension() const noexcept { return d_; }
    bool empty() const noexcept { return n_ == 0; }

    std::span<const double> point(std::size_t i) const noexcept {
        return {coords_.data() + i * d_, d_};
    }
    std::span<double> point(std::size_t i) noexcept { return {coords_.data() + i * d_, d_}; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return coords_[i * d_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return coords_[i * d_ + j]; }

    const std::vector<double>& coords() const noexcept { return coords_; }

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> coords_;
};

/// Scrambled radical inverse of `i` (i >= 1) in base `perm.base()`.
///
/// Digits are accumulated into an integer numerator over p^k, so the result is
/// a single correctly rounded division. With the identity permutation this is
/// the van der Corput value.
inline double radical_inverse(std::uint64_t i, const Permutation& perm) {
    assert(i >= 1);
    assert(i <= 0xffffffffULL);
    const std::uint64_t p = perm.base();
    std::uint64_t numerator = 0;
    std::uint64_t denominator = 1;
    while (i > 0) {
        numerator = numerator * p + perm[static_cast<Digit>(i % p)];
        denominator *= p;
        i /= p;
    }
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

inline std::vector<double> halton_point(std::uint64_t i, const GeneratingVector& gv) {
    std::vector<double> x(gv.dimension());
    for (std::size_t j = 0; j < gv.dimension(); ++j) x[j] = radical_inverse(i, gv[j]);
    return x;
}

/// The points with indices 1..n.
inline PointSet generate(std::size_t n, const GeneratingVector& gv) {
    if (n == 0) throw ValidationError("point count must be at least 1");
    PointSet X(n, gv.dimension());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < gv.dimension(); ++j) X(i, j) = radical_inverse(i + 1, gv[j]);
    return X;
}

inline PointSet generate(std::size_t n, const Genotype& g) {
    return generate(n, genotype_to_vector(g));
}

}  // namespace stardisc
