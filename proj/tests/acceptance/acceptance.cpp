// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,4,10] [--extended] [--seeds N]
//
// Criterion 11 is report-only and runs with --extended.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stardisc/stardisc.hpp"

using namespace stardisc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    enum Status { pass, fail, skip, report } status = pass;
    std::string detail;
};

const char* label(Outcome::Status s) {
    switch (s) {
        case Outcome::pass: return "PASS";
        case Outcome::fail: return "FAIL";
        case Outcome::skip: return "SKIP";
        case Outcome::report: return "INFO";
    }
    return "?";
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::uint32_t ceil_log2(std::size_t x) {
    std::uint32_t k = 0;
    while ((std::size_t{1} << k) < x) ++k;
    return k;
}

// Monotonicity observations collected from every GA run in this process.
struct Monotonicity {
    std::size_t exact_runs = 0, ta_runs = 0;
    std::size_t exact_violations = 0, ta_violations = 0;
    std::size_t generations = 0;

    GenerationObserver exact_observer() {
        ++exact_runs;
        auto last = std::make_shared<double>(2.0);
        return [this, last](std::size_t, const std::vector<Individual>& parents, const Archive&) {
            ++generations;
            double best = 2.0;
            for (const auto& p : parents) best = std::min(best, p.value());
            if (best > *last) ++exact_violations;
            *last = best;
        };
    }

    GenerationObserver ta_observer() {
        ++ta_runs;
        auto recorded = std::make_shared<std::map<Genotype, double>>();
        return [this, recorded](std::size_t, const std::vector<Individual>& parents, const Archive&) {
            ++generations;
            for (const auto& p : parents) {
                auto [it, fresh] = recorded->emplace(p.genotype, p.value());
                if (fresh) continue;
                if (p.value() < it->second) ++ta_violations;
                it->second = std::max(it->second, p.value());
            }
        };
    }
};

Monotonicity monotonicity;

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 1 + rng() % 12, d = 1 + rng() % 3;
        const auto X = oracle::random_point_set(n, d, rng);
        worst = std::max(worst, std::abs(exact_star_discrepancy(X).value - oracle::naive_star_discrepancy(X)));
    }
    const double secs = seconds_since(t0);
    const bool ok = worst <= 1e-15 && secs < 60.0;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("50 sets (n<=12, d<=3): max |exact - enumeration| = %.3g (tol 1e-15), %.2f s (limit 60 s)", worst,
                secs)};
}

Outcome figure_one() {
    const PointSet X(12, 2,
                     {0.10, 0.10, 0.30, 0.40, 0.50, 0.20, 0.70, 0.10, 0.80, 0.30, 0.90, 0.45,
                      0.20, 0.60, 0.40, 0.70, 0.60, 0.90, 0.75, 0.55, 0.95, 0.80, 0.05, 0.95});
    const std::vector<double> y{2.0 / 3.0, 0.5};
    const auto counts = box_counts(y, X);
    const double ld = local_discrepancy(y, X);
    // 2/3 has no double representation; allow two units in the last place.
    const double tol = 2.0 * (std::nextafter(1.0 / 12.0, 1.0) - 1.0 / 12.0);
    const bool ok = counts.open == 3 && std::abs(ld - 1.0 / 12.0) <= tol;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("A = %zu of 12 in [0,2/3)x[0,1/2), local discrepancy %.17g vs 1/12, |diff| %.2g (tol 2 ulp = %.2g)",
                counts.open, ld, std::abs(ld - 1.0 / 12.0), tol)};
}

Outcome centered_grid() {
    double worst = 0.0;
    for (std::size_t n = 1; n <= 64; ++n) {
        std::vector<double> c(n);
        for (std::size_t i = 1; i <= n; ++i) c[i - 1] = static_cast<double>(2 * i - 1) / static_cast<double>(2 * n);
        const double v = exact_star_discrepancy(PointSet(n, 1, c)).value;
        worst = std::max(worst, std::abs(v - 1.0 / (2.0 * static_cast<double>(n))));
    }
    return {worst <= 1e-12 ? Outcome::pass : Outcome::fail,
            fmt("n = 1..64: max |D* - 1/(2n)| = %.3g (tol 1e-12)", worst)};
}

Outcome ta_calibration() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(404);
    int violations = 0, accurate = 0;
    double worst_ratio = 1.0;
    const int sets = 200;
    for (int t = 0; t < sets; ++t) {
        const std::size_t n = 1 + rng() % 64, d = 1 + rng() % 4;
        const auto X = oracle::random_point_set(n, d, rng);
        const Grid grid(X);
        TAConfig cfg;
        cfg.seed = 1000 + static_cast<std::uint64_t>(t);
        const double est = ta_best_of(grid, cfg).value;
        const double exact = exact_star_discrepancy(grid).value;
        if (est > exact) ++violations;
        if (est >= 0.95 * exact) ++accurate;
        worst_ratio = std::min(worst_ratio, est / exact);
    }
    const double secs = seconds_since(t0);
    const bool ok = violations == 0 && accurate * 10 >= sets * 9 && secs < 600.0;
    const TAConfig def;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("200 sets (n<=64, d<=4), TA %u iterations x %u runs: %d soundness violations; best-of-%u >= 0.95 "
                "exact on %d/200 (need >= 180), worst ratio %.3f; %.1f s (limit 600 s)",
                def.iterations, def.runs, violations, def.runs, accurate, worst_ratio, secs)};
}

Outcome ga_d5(std::size_t seeds) {
    std::vector<double> best;
    double slowest = 0.0;
    for (std::size_t s = 1; s <= seeds; ++s) {
        const auto t0 = Clock::now();
        GAConfig cfg = GAConfig::for_dimension(5, 25);
        cfg.mode = EvalMode::exact;
        const auto r = run_ga(cfg, s, monotonicity.exact_observer());
        best.push_back(r.best.value());
        slowest = std::max(slowest, seconds_since(t0));
        std::printf("       d=5 n=25 seed %zu: best exact %.6f, %llu evaluations, %.1f s\n", s, r.best.value(),
                    static_cast<unsigned long long>(r.evaluations), seconds_since(t0));
        std::fflush(stdout);
    }
    std::size_t below_literature = 0, on_target = 0;
    std::ostringstream values;
    for (double v : best) {
        below_literature += v <= 0.238297;
        on_target += v <= 0.198;
        values << (values.tellp() ? " " : "") << fmt("%.6f", v);
    }
    const bool ok = below_literature == best.size() && on_target >= 3 && slowest <= 3600.0;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("best exact over %zu seeds: [%s]; <= 0.238297 in %zu/%zu, <= 0.198 in %zu (need >= 3); slowest run "
                "%.0f s (limit 3600 s)",
                best.size(), values.str().c_str(), below_literature, best.size(), on_target, slowest)};
}

Outcome ga_d4() {
    const auto t0 = Clock::now();
    GAConfig cfg = GAConfig::for_dimension(4, 125);
    cfg.mode = EvalMode::ta;
    const auto r = run_ga(cfg, 1, monotonicity.ta_observer());
    std::vector<Individual> candidates = r.archive.entries();
    candidates.insert(candidates.end(), r.population.begin(), r.population.end());
    const auto final = final_evaluation(candidates, cfg, 1);
    const auto& best = final.front();
    const double baseline = exact_star_discrepancy(generate(125, GeneratingVector::identity(4))).value;
    const bool exact = best.fitness->kind == BoundKind::exact;
    const bool ok = exact && best.value() < baseline && best.value() <= 0.089387;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("d=4 n=125, TA fitness during search, exact final assessment of %zu candidates: best %.6f (%s), "
                "identity Halton %.6f, literature 0.089387; stretch <= 0.062 %s; %.0f s",
                final.size(), best.value(), to_string(best.fitness->kind), baseline,
                best.value() <= 0.062 ? "met" : "not met", seconds_since(t0))};
}

Outcome elitism() {
    if (monotonicity.exact_runs == 0) {
        GAConfig cfg = GAConfig::for_dimension(5, 25);
        cfg.mode = EvalMode::exact;
        cfg.generations = 10;
        run_ga(cfg, 7, monotonicity.exact_observer());
    }
    if (monotonicity.ta_runs == 0) {
        GAConfig cfg = GAConfig::for_dimension(4, 60);
        cfg.mode = EvalMode::ta;
        cfg.generations = 10;
        run_ga(cfg, 7, monotonicity.ta_observer());
    }
    const bool ok = monotonicity.exact_violations == 0 && monotonicity.ta_violations == 0;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("%zu exact-mode runs: %zu increases of the best parent fitness; %zu ta-mode runs: %zu decreases of a "
                "recorded fitness; %zu generations observed",
                monotonicity.exact_runs, monotonicity.exact_violations, monotonicity.ta_runs,
                monotonicity.ta_violations, monotonicity.generations)};
}

Outcome operator_validity() {
    Rng rng(808);
    std::size_t bad_pmx = 0, bad_mut = 0, bad_identity = 0, bad_q0 = 0;
    auto valid = [](const Genotype& g) {
        try {
            const auto gv = genotype_to_vector(g);
            for (std::size_t j = 0; j < gv.dimension(); ++j)
                if (gv[j][0] != 0) return false;
            return true;
        } catch (const ValidationError&) {
            return false;
        }
    };
    for (int t = 0; t < 10000; ++t) {
        const std::size_t d = 2 + rng() % 24;
        const auto a = random_genotype(d, rng);
        const auto b = random_genotype(d, rng);
        if (!valid(crossover(a, b, rng))) ++bad_pmx;
        if (!valid(mutate(a, uniform01(rng), rng))) ++bad_mut;
        if (crossover(a, a, rng) != a) ++bad_identity;
        if (mutate(a, 0.0, rng) != a) ++bad_q0;
    }
    const bool ok = bad_pmx + bad_mut + bad_identity + bad_q0 == 0;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("10^4 PMX: %zu invalid; 10^4 mutations: %zu invalid; PMX of identical parents changed %zu; q=0 "
                "mutation changed %zu",
                bad_pmx, bad_mut, bad_identity, bad_q0)};
}

Outcome bisection() {
    std::mt19937_64 rng(909);
    std::size_t mismatches = 0, over_budget = 0, invocations = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t a = 1 + rng() % 500;
        const std::size_t b = a + 2 + rng() % 500;
        const std::size_t boundary = a + rng() % (b - a + 2);  // b + 1: nothing passes
        auto eval = [&](std::size_t n) {
            DiscrepancyBound d;
            d.value = n >= boundary ? 0.01 : 0.5;
            return d;
        };
        const auto r = bisection_search(eval, 0.1, a, b);
        const std::size_t ref = oracle::linear_scan([&](std::size_t n) { return eval(n).value <= 0.1; }, a, b);
        ++invocations;
        if (r.n != ref || r.feasible != (ref != 0)) ++mismatches;
        if (r.calls > ceil_log2(b - a) + 1) ++over_budget;
    }
    // Real evaluator: every d=3 genotype on the bounds used below.
    GAConfig cfg = GAConfig::for_dimension(3, 64);
    cfg.mode = EvalMode::exact;
    const InverseProblem prob{3, 0.15, 8, 64};
    Rng grng(1);
    std::set<Genotype> all;
    while (all.size() < 48) all.insert(random_genotype(3, grng));
    std::uint32_t max_calls = 0;
    for (const auto& g : all) {
        const auto r = bisection_evaluate(g, prob, cfg, 1);
        ++invocations;
        max_calls = std::max(max_calls, r.calls);
        if (r.calls > ceil_log2(prob.b - prob.a) + 1) ++over_budget;
    }
    const bool ok = mismatches == 0 && over_budget == 0;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("100 random monotone step predicates (b-a >= 2): %zu mismatches with linear scan; %zu of %zu "
                "invocations above ceil(log2(b-a))+1 calls; (8,64) uses at most %u calls (bound %u)",
                mismatches, over_budget, invocations, max_calls, ceil_log2(56) + 1)};
}

Outcome inverse_desk() {
    const auto t0 = Clock::now();
    const double reference = exact_star_discrepancy(generate(40, GeneratingVector::identity(3))).value;
    const InverseProblem prob{3, 1.05 * reference, 8, 64};
    GAConfig cfg = GAConfig::for_dimension(3, prob.b);
    cfg.mode = EvalMode::exact;
    std::size_t dominated_pairs = 0, generations = 0;
    const auto r = run_inverse(prob, cfg, 1, [&](std::size_t, const auto&, const ParetoArchive& ar) {
        ++generations;
        for (const auto& u : ar.entries())
            for (const auto& v : ar.entries())
                if (dominates(u.objectives(), v.objectives())) ++dominated_pairs;
    });
    if (r.archive.empty())
        return {Outcome::fail, fmt("epsilon %.6f: archive is empty", prob.epsilon)};
    const auto& first = r.archive.entries().front();
    auto passes = [&](const Genotype& g, std::size_t n) {
        return exact_star_discrepancy(generate(n, g)).value <= prob.epsilon;
    };
    const std::size_t scan = oracle::linear_scan([&](std::size_t n) { return passes(first.genotype, n); }, prob.a, prob.b);

    // Context: the smallest n over the whole d=3 search space (48 genotypes).
    Rng grng(2);
    std::set<Genotype> all;
    while (all.size() < 48) all.insert(random_genotype(3, grng));
    std::size_t global = 0;
    for (const auto& g : all) {
        const std::size_t m = oracle::linear_scan([&](std::size_t n) { return passes(g, n); }, prob.a, prob.b);
        if (m && (global == 0 || m < global)) global = m;
    }
    const double secs = seconds_since(t0);
    const bool ok = scan == first.n && dominated_pairs == 0 && secs < 1800.0;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("epsilon = 1.05 x %.6f = %.6f, bounds (8,64): archive min n = %zu (disc %.6f), linear scan of that "
                "vector gives %zu; smallest n over all 48 vectors %zu; %zu dominated pairs over %zu generations; "
                "%.1f s (limit 1800 s)",
                reference, prob.epsilon, first.n, first.disc.value, scan, global, dominated_pairs, generations, secs)};
}

Outcome inverse_extended(bool run) {
    if (!run) return {Outcome::skip, "report-only; run with --extended"};
    const auto t0 = Clock::now();
    const InverseProblem prob{8, 0.125, 64, 128};
    GAConfig cfg = GAConfig::for_dimension(8, prob.b);
    cfg.mode = EvalMode::ta;
    const auto r = run_inverse(prob, cfg, 1);
    if (r.archive.empty()) return {Outcome::report, fmt("archive empty after %.0f s", seconds_since(t0))};
    const auto checks = final_check(r.archive, prob, cfg, 1);
    const auto& f = checks.front();
    return {Outcome::report,
            fmt("d=8 eps=0.125 (64,128), TA fitness: smallest archived n = %zu, search disc %.6f, final 50-run TA "
                "%.6f (%s epsilon); %zu archive entries; %.0f s",
                f.entry.n, f.entry.disc.value, f.final_disc.value, f.meets_epsilon ? "meets" : "above",
                checks.size(), seconds_since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    bool extended = false;
    std::size_t seeds = 5;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--extended") {
            extended = true;
        } else if (arg == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
        } else if (arg == "--seeds" && i + 1 < argc) {
            seeds = std::stoul(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--only 1,2,...] [--extended] [--seeds N]\n", argv[0]);
            return 2;
        }
    }
    if (only.count(11)) extended = true;

    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "exact evaluator equals literal enumeration", oracle_equivalence},
        {2, "twelve-point example has local discrepancy 1/12", figure_one},
        {3, "centered 1-d grid has discrepancy 1/(2n)", centered_grid},
        {4, "threshold accepting soundness and accuracy", ta_calibration},
        {5, "GA d=5 n=25 exact fitness", [&] { return ga_d5(seeds); }},
        {6, "GA d=4 n=125 beats identity Halton", ga_d4},
        {7, "elitism and max-rule monotonicity", elitism},
        {8, "operator validity", operator_validity},
        {9, "bisection call count and correctness", bisection},
        {10, "inverse problem d=3 at desk scale", inverse_desk},
        {11, "inverse problem d=8 eps=0.125 (extended)", [&] { return inverse_extended(extended); }},
    };

    int failed = 0, passed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {Outcome::fail, std::string("exception: ") + e.what()};
        }
        std::printf("%s %2d %s: %s\n", label(o.status), c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
        failed += o.status == Outcome::fail;
        passed += o.status == Outcome::pass;
    }
    std::printf("acceptance: %d passed, %d failed\n", passed, failed);
    return failed == 0 ? 0 : 1;
}
