#pragma once

// Inverse star discrepancy: smallest n with discrepancy <= epsilon.
//
// Each genotype is scored by bisection over n, giving two objectives to
// minimize, (n, discrepancy). Survivors are chosen by NSGA-II (nondominated
// sorting plus crowding distance) and every feasible evaluation is offered to
// a Pareto archive.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "stardisc/discrepancy.hpp"
#include "stardisc/optimizer.hpp"

namespace stardisc {

struct InverseProblem {
    std::size_t d = 1;
    double epsilon = 0.1;
    std::size_t a = 1;  ///< smallest n searched
    std::size_t b = 2;  ///< largest n searched

    void validate() const {
        if (d < 1 || d > kMaxDimension)
            throw ValidationError("dimension must be in [1, " + std::to_string(kMaxDimension) + "]");
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must be in (0, 1)");
        if (!(a >= 1 && a < b)) throw ValidationError("bounds must satisfy 1 <= a < b");
    }
};

/// Both objectives are minimized.
struct Objectives {
    double n = 0.0;
    double disc = 0.0;

    friend bool operator==(const Objectives&, const Objectives&) = default;
};

/// u is at least as good as v in both objectives and strictly better in one.
inline bool dominates(const Objectives& u, const Objectives& v) noexcept {
    return u.n <= v.n && u.disc <= v.disc && (u.n < v.n || u.disc < v.disc);
}

struct BisectionResult {
    bool feasible = false;
    std::size_t n = 0;
    DiscrepancyBound disc;
    std::uint32_t calls = 0;

    /// Infeasible results sort after every feasible one.
    Objectives objectives(const InverseProblem& prob) const {
        if (!feasible) return {static_cast<double>(prob.b + 1), std::numeric_limits<double>::infinity()};
        return {static_cast<double>(n), disc.value};
    }
};

/// Bisection for the smallest n in [a, b] with evaluate(n).value <= epsilon.
///
/// The search keeps a bracket (lo, hi) with lo = a-1 and hi = b+1 as virtual
/// endpoints, so it makes ceil(log2(b - a + 2)) evaluator calls. When the
/// predicate fails at every probe the result is infeasible; in that case b
/// itself has been probed. For a predicate that is not monotone in n the
/// returned n is a boundary (pass at n, fail at some probed m < n, or n == a)
/// rather than a certified minimum.
template <class Evaluate>
BisectionResult bisection_search(Evaluate&& evaluate, double epsilon, std::size_t a, std::size_t b) {
    if (!(a >= 1 && a <= b)) throw ValidationError("bisection bounds must satisfy 1 <= a <= b");
    BisectionResult r;
    std::size_t lo = a - 1, hi = b + 1;
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        const DiscrepancyBound d = evaluate(mid);
        ++r.calls;
        if (d.value <= epsilon) {
            hi = mid;
            r.disc = d;
        } else {
            lo = mid;
        }
    }
    r.feasible = hi <= b;
    r.n = r.feasible ? hi : 0;
    return r;
}

/// Discrepancy of the first n points of a genotype. TA streams are derived
/// from (seed, genotype, n), so repeated calls agree.
inline DiscrepancyBound inverse_discrepancy(const Genotype& g, std::size_t n, const GAConfig& cfg,
                                            std::uint64_t seed) {
    GAConfig c = cfg;
    c.n = n;
    c.ta.seed = derive_seed(seed, {0x696e76ULL});
    return evaluate_fitness(g, c, n);
}

inline BisectionResult bisection_evaluate(const Genotype& g, const InverseProblem& prob,
                                          const GAConfig& cfg, std::uint64_t seed) {
    return bisection_search(
        [&](std::size_t n) { return inverse_discrepancy(g, n, cfg, seed); }, prob.epsilon, prob.a,
        prob.b);
}

/// Nondominated fronts, best first, as index lists into `objs`.
inline std::vector<std::vector<std::size_t>> nondominated_fronts(const std::vector<Objectives>& objs,
                                                                 std::span<const std::size_t> members) {
    const std::size_t m = members.size();
    std::vector<std::vector<std::size_t>> dominated(m);
    std::vector<std::size_t> count(m, 0);
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < m; ++p) {
        for (std::size_t q = 0; q < m; ++q) {
            if (p == q) continue;
            if (dominates(objs[members[p]], objs[members[q]]))
                dominated[p].push_back(q);
            else if (dominates(objs[members[q]], objs[members[p]]))
                ++count[p];
        }
        if (count[p] == 0) current.push_back(p);
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto p : current)
            for (auto q : dominated[p])
                if (--count[q] == 0) next.push_back(q);
        std::vector<std::size_t> front;
        for (auto p : current) front.push_back(members[p]);
        fronts.push_back(std::move(front));
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return fronts;
}

/// Crowding distance of each member of a front (same order as `front`).
inline std::vector<double> crowding_distance(const std::vector<Objectives>& objs,
                                             const std::vector<std::size_t>& front) {
    const std::size_t m = front.size();
    std::vector<double> dist(m, 0.0);
    if (m <= 2) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        return dist;
    }
    std::vector<std::size_t> order(m);
    for (auto key : {&Objectives::n, &Objectives::disc}) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return objs[front[x]].*key < objs[front[y]].*key;
        });
        const double lo = objs[front[order.front()]].*key;
        const double hi = objs[front[order.back()]].*key;
        dist[order.front()] = dist[order.back()] = std::numeric_limits<double>::infinity();
        if (hi <= lo) continue;
        for (std::size_t i = 1; i + 1 < m; ++i)
            dist[order[i]] += (objs[front[order[i + 1]]].*key - objs[front[order[i - 1]]].*key) / (hi - lo);
    }
    return dist;
}

/// NSGA-II survivor selection. Returns the indices of `mu` survivors: whole
/// fronts in rank order, the last one truncated by descending crowding
/// distance. Entries with infinite discrepancy (infeasible) come last.
inline std::vector<std::size_t> nsga2_select(const std::vector<Objectives>& objs, std::size_t mu) {
    std::vector<std::size_t> feasible, infeasible;
    for (std::size_t i = 0; i < objs.size(); ++i)
        (std::isfinite(objs[i].disc) ? feasible : infeasible).push_back(i);

    std::vector<std::size_t> chosen;
    chosen.reserve(mu);
    for (const auto& front : nondominated_fronts(objs, feasible)) {
        if (chosen.size() >= mu) break;
        if (chosen.size() + front.size() <= mu) {
            chosen.insert(chosen.end(), front.begin(), front.end());
            continue;
        }
        const auto dist = crowding_distance(objs, front);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return dist[x] > dist[y]; });
        for (std::size_t i = 0; chosen.size() < mu; ++i) chosen.push_back(front[order[i]]);
    }
    for (std::size_t i = 0; chosen.size() < mu && i < infeasible.size(); ++i)
        chosen.push_back(infeasible[i]);
    return chosen;
}

struct ParetoEntry {
    Genotype genotype;
    std::size_t n = 0;
    DiscrepancyBound disc;

    Objectives objectives() const { return {static_cast<double>(n), disc.value}; }
};

/// Set of mutually nondominated (n, discrepancy) entries, one per genotype,
/// kept sorted by n.
class ParetoArchive {
public:
    /// Returns true if the entry was added.
    bool offer(const ParetoEntry& e) {
        const auto o = e.objectives();
        for (const auto& x : entries_) {
            if (x.genotype == e.genotype) return false;
            if (dominates(x.objectives(), o)) return false;
        }
        std::erase_if(entries_, [&](const ParetoEntry& x) { return dominates(o, x.objectives()); });
        entries_.push_back(e);
        std::sort(entries_.begin(), entries_.end(), [](const ParetoEntry& x, const ParetoEntry& y) {
            if (x.n != y.n) return x.n < y.n;
            if (x.disc.value != y.disc.value) return x.disc.value < y.disc.value;
            return x.genotype < y.genotype;
        });
        return true;
    }

    const std::vector<ParetoEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

private:
    std::vector<ParetoEntry> entries_;
};

struct InverseIndividual {
    Genotype genotype;
    BisectionResult result;
};

struct InverseGenerationStats {
    std::size_t generation = 0;
    std::size_t best_n = 0;       ///< smallest feasible n in the population, 0 if none
    std::size_t feasible = 0;     ///< feasible individuals in the population
    std::size_t archive_size = 0;
    std::uint64_t evaluations = 0;  ///< cumulative discrepancy evaluations
};

struct InverseResult {
    ParetoArchive archive;
    std::vector<InverseIndividual> population;
    std::vector<InverseGenerationStats> history;
    std::uint64_t evaluations = 0;
};

using InverseObserver = std::function<void(std::size_t generation,
                                           const std::vector<InverseIndividual>& parents,
                                           const ParetoArchive& archive)>;

/// Genetic search for small point sets meeting prob.epsilon. cfg.n is unused;
/// cfg.d must equal prob.d.
inline InverseResult run_inverse(const InverseProblem& prob, const GAConfig& cfg, std::uint64_t seed,
                                 const InverseObserver& observe = {}) {
    prob.validate();
    GAConfig c = cfg;
    c.d = prob.d;
    c.n = prob.b;
    c.validate();

    Rng rng(derive_seed(seed, {0x6e736761ULL}));
    std::map<Genotype, BisectionResult> memo;
    InverseResult out;
    auto evaluate = [&](const Genotype& g) {
        if (auto it = memo.find(g); it != memo.end()) return it->second;
        auto r = bisection_evaluate(g, prob, c, seed);
        out.evaluations += r.calls;
        memo.emplace(g, r);
        return r;
    };
    auto offer = [&](const InverseIndividual& ind) {
        if (ind.result.feasible) out.archive.offer({ind.genotype, ind.result.n, ind.result.disc});
    };
    auto stats = [&](std::size_t gen, const std::vector<InverseIndividual>& pop) {
        InverseGenerationStats s;
        s.generation = gen;
        for (const auto& ind : pop) {
            if (!ind.result.feasible) continue;
            ++s.feasible;
            if (s.best_n == 0 || ind.result.n < s.best_n) s.best_n = ind.result.n;
        }
        s.archive_size = out.archive.size();
        s.evaluations = out.evaluations;
        return s;
    };

    std::vector<InverseIndividual> parents(c.mu);
    for (auto& p : parents) {
        p.genotype = random_genotype(c.d, rng);
        p.result = evaluate(p.genotype);
        offer(p);
    }
    if (observe) observe(0, parents, out.archive);

    std::vector<InverseIndividual> pool;
    std::vector<Objectives> objs;
    for (std::size_t gen = 1; gen <= c.generations; ++gen) {
        pool = parents;
        for (std::size_t i = 0; i < c.lambda; ++i) {
            InverseIndividual o;
            o.genotype = make_offspring(parents, c, rng);
            pool.push_back(std::move(o));
        }
        for (std::size_t i = parents.size(); i < pool.size(); ++i) {
            pool[i].result = evaluate(pool[i].genotype);
            offer(pool[i]);
        }
        objs.clear();
        for (const auto& ind : pool) objs.push_back(ind.result.objectives(prob));
        std::vector<InverseIndividual> next;
        next.reserve(c.mu);
        for (auto i : nsga2_select(objs, c.mu)) next.push_back(pool[i]);
        parents = std::move(next);
        out.history.push_back(stats(gen, parents));
        if (observe) observe(gen, parents, out.archive);
    }
    out.population = std::move(parents);
    return out;
}

/// Re-check of an archive entry after the run.
struct FinalCheck {
    ParetoEntry entry;
    DiscrepancyBound final_disc;  ///< exact, or TA with cfg.final_runs runs
    bool meets_epsilon = false;   ///< final_disc <= epsilon
    bool boundary = false;        ///< n == a, or disc(n-1) > epsilon under the search seeds
};

inline std::vector<FinalCheck> final_check(const ParetoArchive& archive, const InverseProblem& prob,
                                           const GAConfig& cfg, std::uint64_t seed) {
    GAConfig fc = cfg;
    fc.d = prob.d;
    if (fc.mode == EvalMode::ta) fc.mode = EvalMode::automatic;
    fc.ta.runs = cfg.final_runs;
    std::vector<FinalCheck> out;
    for (const auto& e : archive.entries()) {
        FinalCheck f;
        f.entry = e;
        f.final_disc = inverse_discrepancy(e.genotype, e.n, fc, derive_seed(seed, {0x66696e616cULL}));
        if (f.final_disc.kind == BoundKind::lower_bound)
            f.final_disc = merge_bounds(e.disc.kind == BoundKind::lower_bound ? e.disc : f.final_disc,
                                        f.final_disc);
        f.meets_epsilon = f.final_disc.value <= prob.epsilon;
        f.boundary = e.n == prob.a ||
                     inverse_discrepancy(e.genotype, e.n - 1, cfg, seed).value > prob.epsilon;
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace stardisc
