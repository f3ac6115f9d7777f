#pragma once

// (mu + lambda) genetic algorithm over generalized Halton genotypes.
//
// Offspring are produced by PMX crossover of two random parents or by uniform
// partial reordering of one random parent. With lower-bound (TA) fitness the
// parents are reevaluated every generation and every genotype keeps the
// largest bound found for it. Survivors are the best individual plus mu-1 tournament winners
// from parents and offspring.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stardisc/discrepancy.hpp"
#include "stardisc/estimator.hpp"
#include "stardisc/operators.hpp"
#include "stardisc/random.hpp"
#include "stardisc/sequence.hpp"

namespace stardisc {

/// How fitness is computed.
///   exact: grid enumeration, BudgetExceeded propagates
///   ta:    threshold accepting lower bound
///   automatic: exact when the grid fits the budget, otherwise ta
enum class EvalMode { exact, ta, automatic };

inline const char* to_string(EvalMode m) noexcept {
    switch (m) {
        case EvalMode::exact: return "exact";
        case EvalMode::ta: return "ta";
        case EvalMode::automatic: return "auto";
    }
    return "?";
}

inline EvalMode parse_eval_mode(const std::string& s) {
    if (s == "exact") return EvalMode::exact;
    if (s == "ta") return EvalMode::ta;
    if (s == "auto") return EvalMode::automatic;
    throw ValidationError("unknown evaluation mode '" + s + "'");
}

struct GAConfig {
    std::size_t mu = 25;
    std::size_t lambda = 100;
    double crossover_prob = 0.7;
    double mutation_prob = 0.3;
    double match_prob = 0.05;
    std::size_t tournament = 3;
    std::size_t generations = 50;
    std::size_t n = 1;
    std::size_t d = 1;
    EvalMode mode = EvalMode::automatic;
    TAConfig ta{};                        ///< in-evolution TA profile (runs, iterations)
    std::uint32_t final_runs = kFinalTARuns;
    double cell_budget = kDefaultCellBudget;

    /// Default parameters for a dimension: population (25+100), crossover
    /// 0.7, mutation 0.3, match probability 0.05, tournaments of 3, and 50 /
    /// 100 / 200 generations for d <= 10 / d <= 25 / larger d.
    static GAConfig for_dimension(std::size_t d, std::size_t n) {
        GAConfig c;
        c.d = d;
        c.n = n;
        c.generations = d <= 10 ? 50 : d <= 25 ? 100 : 200;
        return c;
    }

    void validate() const {
        if (d < 1 || d > kMaxDimension)
            throw ValidationError("dimension must be in [1, " + std::to_string(kMaxDimension) + "]");
        if (n < 1) throw ValidationError("point count must be at least 1");
        if (mu < 1 || lambda < 1) throw ValidationError("mu and lambda must be at least 1");
        if (tournament < 1) throw ValidationError("tournament size must be at least 1");
        if (crossover_prob < 0 || mutation_prob < 0 ||
            std::abs(crossover_prob + mutation_prob - 1.0) > 1e-9)
            throw ValidationError("crossover and mutation probabilities must sum to 1");
        if (match_prob < 0 || match_prob > 1)
            throw ValidationError("match probability must be in [0, 1]");
        if (crossover_prob > 0 && mu < 2)
            throw ValidationError("crossover needs at least two parents (mu >= 2)");
        if (ta.runs < 1 || ta.iterations < 1 || final_runs < 1)
            throw ValidationError("TA runs and iterations must be at least 1");
    }
};

struct Individual {
    Genotype genotype;
    std::optional<DiscrepancyBound> fitness;

    double value() const {
        if (!fitness) throw ValidationError("individual has not been evaluated");
        return fitness->value;
    }
};

/// Order by fitness, then genotype, so ties resolve the same way every run.
inline bool fitter(const Individual& a, const Individual& b) {
    if (a.value() != b.value()) return a.value() < b.value();
    return a.genotype < b.genotype;
}

inline std::uint64_t genotype_hash(const Genotype& g) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& r : g.reduced) {
        for (auto v : r) h = (h ^ v) * 0x100000001b3ULL;
        h = (h ^ 0xffffffffULL) * 0x100000001b3ULL;
    }
    return h;
}

/// The best individuals seen, at most `capacity`, one entry per genotype.
class Archive {
public:
    explicit Archive(std::size_t capacity = 25) : capacity_(capacity) {}

    /// Inserts or, for a known genotype, replaces the stored fitness.
    void update(const Individual& ind) {
        auto it = std::find_if(entries_.begin(), entries_.end(),
                               [&](const Individual& e) { return e.genotype == ind.genotype; });
        if (it != entries_.end())
            it->fitness = ind.fitness;
        else
            entries_.push_back(ind);
        std::sort(entries_.begin(), entries_.end(), fitter);
        if (entries_.size() > capacity_) entries_.resize(capacity_);
    }

    /// Updates the stored fitness of a genotype only if it is present.
    void refresh(const Individual& ind) {
        auto it = std::find_if(entries_.begin(), entries_.end(),
                               [&](const Individual& e) { return e.genotype == ind.genotype; });
        if (it == entries_.end()) return;
        it->fitness = ind.fitness;
        std::sort(entries_.begin(), entries_.end(), fitter);
    }

    const std::vector<Individual>& entries() const noexcept { return entries_; }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

private:
    std::size_t capacity_;
    std::vector<Individual> entries_;
};

struct GenerationStats {
    std::size_t generation = 0;
    double best = 0.0;
    double mean = 0.0;
    std::uint64_t evaluations = 0;  ///< cumulative evaluator calls
};

/// Fitness of one genotype. `tag` selects the TA random stream; the stream is
/// a function of (cfg.ta.seed, genotype, tag) only.
inline DiscrepancyBound evaluate_fitness(const Genotype& g, const GAConfig& cfg,
                                         std::uint64_t tag = 0) {
    const PointSet X = generate(cfg.n, g);
    const Grid grid(X);
    const bool exact = cfg.mode == EvalMode::exact ||
                       (cfg.mode == EvalMode::automatic && grid.cell_count() <= cfg.cell_budget);
    if (exact) return exact_star_discrepancy(grid, cfg.cell_budget);
    TAConfig ta = cfg.ta;
    ta.seed = derive_seed(cfg.ta.seed, {genotype_hash(g), tag});
    return ta_best_of(grid, ta);
}

/// Max rule for repeated lower bounds; an exact value is final.
inline DiscrepancyBound merge_bounds(const DiscrepancyBound& old, const DiscrepancyBound& fresh) {
    if (old.kind == BoundKind::exact) return old;
    if (fresh.kind == BoundKind::exact) return fresh;
    DiscrepancyBound m = fresh.value > old.value ? fresh : old;
    m.evaluations = old.evaluations + fresh.evaluations;
    m.runs = old.runs + fresh.runs;
    return m;
}

/// Index of the winner of a size-k tournament, sampling with replacement.
/// Ties go to the earliest sample.
inline std::size_t tournament_select(const std::vector<Individual>& pop, std::size_t k, Rng& rng) {
    if (pop.empty()) throw ValidationError("tournament on an empty population");
    std::size_t best = uniform_index(rng, pop.size());
    double best_value = pop[best].value();
    for (std::size_t s = 1; s < k; ++s) {
        const std::size_t i = uniform_index(rng, pop.size());
        if (pop[i].value() < best_value) {
            best = i;
            best_value = pop[i].value();
        }
    }
    return best;
}

/// One offspring from the parent population. Works on any population whose
/// members expose a `genotype`.
template <class Member>
Genotype make_offspring(const std::vector<Member>& parents, const GAConfig& cfg, Rng& rng) {
    if (parents.empty()) throw ValidationError("no parents to breed from");
    if (uniform01(rng) < cfg.crossover_prob) {
        if (parents.size() < 2) throw ValidationError("crossover needs two parents");
        const std::size_t i = uniform_index(rng, parents.size());
        std::size_t j = uniform_index(rng, parents.size() - 1);
        if (j >= i) ++j;
        return crossover(parents[i].genotype, parents[j].genotype, rng);
    }
    const std::size_t i = uniform_index(rng, parents.size());
    return mutate(parents[i].genotype, cfg.match_prob, rng);
}

struct GAResult {
    Individual best;
    Archive archive;
    std::vector<GenerationStats> history;
    std::vector<Individual> population;
    std::uint64_t evaluations = 0;
};

namespace detail {

// Evaluator with a memo per genotype. Exact values are final; lower bounds
// are merged with every earlier bound for the same genotype (max rule), so a
// genotype's recorded fitness never decreases.
class FitnessEvaluator {
public:
    explicit FitnessEvaluator(const GAConfig& cfg) : cfg_(cfg) {}

    DiscrepancyBound operator()(const Genotype& g, std::uint64_t tag) {
        auto it = known_.find(g);
        if (it != known_.end() && (it->second.kind == BoundKind::exact || last_tag_[g] == tag))
            return it->second;
        auto b = evaluate_fitness(g, cfg_, tag);
        ++calls_;
        last_tag_[g] = tag;
        if (it == known_.end()) return known_.emplace(g, b).first->second;
        it->second = merge_bounds(it->second, b);
        return it->second;
    }

    /// Best bound recorded so far; the genotype must have been evaluated.
    const DiscrepancyBound& current(const Genotype& g) const { return known_.at(g); }

    std::uint64_t calls() const noexcept { return calls_; }

private:
    const GAConfig& cfg_;
    std::map<Genotype, DiscrepancyBound> known_;
    std::map<Genotype, std::uint64_t> last_tag_;  // same tag means same TA stream
    std::uint64_t calls_ = 0;
};

inline GenerationStats population_stats(const std::vector<Individual>& pop, std::size_t generation,
                                        std::uint64_t evaluations) {
    GenerationStats s;
    s.generation = generation;
    s.best = pop.front().value();
    double sum = 0.0;
    for (const auto& ind : pop) {
        s.best = std::min(s.best, ind.value());
        sum += ind.value();
    }
    s.mean = sum / static_cast<double>(pop.size());
    s.evaluations = evaluations;
    return s;
}

}  // namespace detail

/// Observer hook called after every generation with the new parent
/// population; used by tests to check per-generation invariants.
using GenerationObserver =
    std::function<void(std::size_t generation, const std::vector<Individual>& parents,
                       const Archive& archive)>;

/// Runs the genetic algorithm for cfg.generations generations.
inline GAResult run_ga(const GAConfig& cfg, std::uint64_t seed,
                       const GenerationObserver& observe = {}) {
    cfg.validate();
    Rng rng(derive_seed(seed, {0x6761ULL}));
    GAConfig eval_cfg = cfg;
    eval_cfg.ta.seed = derive_seed(seed, {0x7461ULL});
    detail::FitnessEvaluator evaluate(eval_cfg);

    GAResult result;
    std::vector<Individual> parents(cfg.mu);
    for (auto& p : parents) {
        p.genotype = random_genotype(cfg.d, rng);
        p.fitness = evaluate(p.genotype, 0);
        result.archive.update(p);
    }
    if (observe) observe(0, parents, result.archive);

    std::vector<Individual> offspring(cfg.lambda);
    std::vector<Individual> pool;
    for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
        for (auto& o : offspring) {
            o.genotype = make_offspring(parents, cfg, rng);
            o.fitness.reset();
        }
        for (auto& o : offspring) o.fitness = evaluate(o.genotype, 2 * gen);

        for (auto& p : parents)
            if (p.fitness->kind != BoundKind::exact) evaluate(p.genotype, 2 * gen + 1);

        pool.clear();
        pool.insert(pool.end(), parents.begin(), parents.end());
        pool.insert(pool.end(), offspring.begin(), offspring.end());
        for (auto& ind : pool) {
            ind.fitness = evaluate.current(ind.genotype);
            result.archive.update(ind);
        }
        const auto elite = std::min_element(pool.begin(), pool.end(), fitter) - pool.begin();
        std::vector<Individual> next;
        next.reserve(cfg.mu);
        next.push_back(pool[static_cast<std::size_t>(elite)]);
        while (next.size() < cfg.mu) next.push_back(pool[tournament_select(pool, cfg.tournament, rng)]);
        parents = std::move(next);

        result.history.push_back(detail::population_stats(parents, gen, evaluate.calls()));
        if (observe) observe(gen, parents, result.archive);
    }

    result.best = result.archive.entries().front();
    result.population = std::move(parents);
    result.evaluations = evaluate.calls();
    return result;
}

/// Final assessment of candidates: exact where the grid fits the budget,
/// otherwise cfg.final_runs TA runs merged with the existing bound. Returns
/// one entry per distinct genotype, best first.
inline std::vector<Individual> final_evaluation(std::vector<Individual> candidates,
                                                const GAConfig& cfg, std::uint64_t seed) {
    std::sort(candidates.begin(), candidates.end(),
              [](const Individual& a, const Individual& b) { return a.genotype < b.genotype; });
    candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                 [](const Individual& a, const Individual& b) {
                                     return a.genotype == b.genotype;
                                 }),
                     candidates.end());
    GAConfig final_cfg = cfg;
    final_cfg.mode = cfg.mode == EvalMode::ta ? EvalMode::automatic : cfg.mode;
    final_cfg.ta.runs = cfg.final_runs;
    final_cfg.ta.seed = derive_seed(seed, {0x66696e616cULL});
    for (auto& c : candidates) {
        if (c.fitness && c.fitness->kind == BoundKind::exact) continue;
        auto fresh = evaluate_fitness(c.genotype, final_cfg);
        c.fitness = c.fitness ? merge_bounds(*c.fitness, fresh) : fresh;
    }
    std::sort(candidates.begin(), candidates.end(), fitter);
    return candidates;
}

}  // namespace stardisc
