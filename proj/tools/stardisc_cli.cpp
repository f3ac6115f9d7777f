#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stardisc/stardisc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stardisc;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kParse = 3, kBudget = 4 };

constexpr std::uint64_t kDefaultSeed = 20090707;

struct UsageError : Error {
    using Error::Error;
};

double default_budget() {
    const char* env = std::getenv("STARDISC_BUDGET");
    if (!env || !*env) return kDefaultCellBudget;
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (*end != '\0' || !(v > 0.0)) throw UsageError(std::string("STARDISC_BUDGET must be a positive number, got '") + env + "'");
    return v;
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// File contents that fail validation are input errors, not usage errors.
GeneratingVector load_vector(const std::string& path) {
    try {
        return io::load_generating_vector(path);
    } catch (const ValidationError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

PointSet load_points(const std::string& path) {
    try {
        return io::load_point_set(path);
    } catch (const ValidationError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

class RunDirectory {
public:
    RunDirectory(fs::path dir, std::vector<std::string> argv, std::string command)
        : dir_(std::move(dir)), argv_(std::move(argv)), command_(std::move(command)), started_(utc_now()) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error("cannot create '" + dir_.string() + "': " + ec.message());
    }

    template <class Writer>
    void write(const std::string& name, Writer&& writer) {
        const auto path = dir_ / name;
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        io::write_file(path.string(), writer);
        artifacts_.push_back(name);
    }

    void finish(const json& config, std::uint64_t seed) {
        json manifest = {{"tool", "stardisc"},
                         {"version", STARDISC_VERSION},
                         {"command", command_},
                         {"argv", argv_},
                         {"seed", seed},
                         {"config", config},
                         {"started", started_},
                         {"finished", utc_now()},
                         {"artifacts", artifacts_}};
        io::write_file((dir_ / "manifest.json").string(), [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
    }

    const fs::path& path() const noexcept { return dir_; }

private:
    fs::path dir_;
    std::vector<std::string> argv_;
    std::string command_;
    std::string started_;
    std::vector<std::string> artifacts_;
};

json to_json(const TAConfig& c) {
    return {{"iterations", c.iterations}, {"runs", c.runs}, {"threshold_samples", c.threshold_samples}};
}

json to_json(const GAConfig& c) {
    return {{"mu", c.mu},
            {"lambda", c.lambda},
            {"crossover_prob", c.crossover_prob},
            {"mutation_prob", c.mutation_prob},
            {"match_prob", c.match_prob},
            {"tournament", c.tournament},
            {"generations", c.generations},
            {"n", c.n},
            {"d", c.d},
            {"mode", to_string(c.mode)},
            {"ta", to_json(c.ta)},
            {"final_runs", c.final_runs},
            {"cell_budget", c.cell_budget}};
}

struct GAFlags {
    std::optional<std::size_t> generations, mu, lambda, tournament;
    std::optional<double> pc, pm, match_prob;
    std::string mode = "auto";
    std::uint32_t ta_iterations = TAConfig{}.iterations;
    std::uint32_t ta_runs = TAConfig{}.runs;
    std::uint32_t final_runs = kFinalTARuns;

    void add(CLI::App* app) {
        app->add_option("--generations", generations, "Number of generations (default by dimension)");
        app->add_option("--mu", mu, "Parent population size");
        app->add_option("--lambda", lambda, "Offspring per generation");
        app->add_option("--pc", pc, "Crossover probability");
        app->add_option("--pm", pm, "Mutation probability (1 - pc)");
        app->add_option("--match-prob", match_prob, "Per-position selection probability of mutation");
        app->add_option("--tournament", tournament, "Tournament size");
        app->add_option("--mode", mode, "Fitness evaluation: exact, ta or auto")
            ->check(CLI::IsMember({"exact", "ta", "auto"}))
            ->capture_default_str();
        app->add_option("--ta-iterations", ta_iterations, "Threshold accepting iterations per run")->capture_default_str();
        app->add_option("--ta-runs", ta_runs, "Threshold accepting runs per fitness evaluation")->capture_default_str();
        app->add_option("--final-runs", final_runs, "Threshold accepting runs for the final assessment")
            ->capture_default_str();
    }

    GAConfig config(std::size_t d, std::size_t n, double budget) const {
        GAConfig c = GAConfig::for_dimension(d, n);
        if (generations) c.generations = *generations;
        if (mu) c.mu = *mu;
        if (lambda) c.lambda = *lambda;
        if (tournament) c.tournament = *tournament;
        if (match_prob) c.match_prob = *match_prob;
        if (pc) c.crossover_prob = *pc;
        if (pm) c.mutation_prob = *pm;
        if (pc && !pm) c.mutation_prob = 1.0 - *pc;
        if (pm && !pc) c.crossover_prob = 1.0 - *pm;
        c.mode = parse_eval_mode(mode);
        c.ta.iterations = ta_iterations;
        c.ta.runs = ta_runs;
        c.final_runs = final_runs;
        c.cell_budget = budget;
        return c;
    }
};

void print_bound(const DiscrepancyBound& b) {
    std::cout << "discrepancy " << io::format_double(b.value) << '\n' << "kind " << to_string(b.kind) << '\n';
}

// Exact where affordable (unless ta is forced), otherwise the final TA profile.
DiscrepancyBound assess(const Genotype& g, const GAConfig& cfg, std::uint64_t seed) {
    return *final_evaluation({Individual{g, std::nullopt}}, cfg, seed).front().fitness;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::size_t dim = 0;
    std::size_t n = 0;
    std::string vector_file;
    bool identity = false;
    std::string out;
};

int cmd_generate(const GenerateArgs& a) {
    std::optional<GeneratingVector> gv;
    if (a.identity) {
        if (a.dim == 0) throw UsageError("--identity needs --dim");
        gv = GeneratingVector::identity(a.dim);
    } else {
        gv = load_vector(a.vector_file);
        if (a.dim != 0 && a.dim != gv->dimension())
            throw UsageError("--dim " + std::to_string(a.dim) + " does not match the vector's dimension " +
                             std::to_string(gv->dimension()));
    }
    const PointSet X = generate(a.n, *gv);
    io::write_file(a.out, [&](std::ostream& os) { io::write_point_set(os, X); });
    std::cout << "n " << X.size() << "\nd " << X.dimension() << "\nfile " << a.out << '\n';
    return kOk;
}

struct EvaluateArgs {
    std::string file;
    bool exact = false;
    bool ta = false;
    bool as_json = false;
    std::uint32_t runs = TAConfig{}.runs;
    std::uint32_t iterations = TAConfig{}.iterations;
    std::uint64_t seed = kDefaultSeed;
    std::optional<double> budget;
};

int cmd_evaluate(const EvaluateArgs& a) {
    const double budget = a.budget ? *a.budget : default_budget();
    if (!(budget > 0.0)) throw UsageError("--budget must be positive");
    const PointSet X = load_points(a.file);
    const Grid grid(X);
    DiscrepancyBound b;
    if (a.exact || (!a.ta && grid.cell_count() <= budget)) {
        b = exact_star_discrepancy(grid, budget);
    } else {
        TAConfig cfg;
        cfg.runs = a.runs;
        cfg.iterations = a.iterations;
        cfg.seed = a.seed;
        b = ta_best_of(grid, cfg);
    }
    if (a.as_json) {
        json j = io::to_json(b);
        j["n"] = X.size();
        j["d"] = X.dimension();
        std::cout << j.dump(2) << '\n';
        return kOk;
    }
    print_bound(b);
    std::cout << "n " << X.size() << "\nd " << X.dimension() << '\n';
    if (b.kind == BoundKind::exact)
        std::cout << "cells_visited " << b.evaluations << '\n';
    else
        std::cout << "evaluations " << b.evaluations << "\nruns " << b.runs << "\nseed " << b.seed << '\n';
    return kOk;
}

struct OptimizeArgs {
    std::size_t dim = 0;
    std::size_t n = 0;
    GAFlags ga;
    std::uint64_t seed = kDefaultSeed;
    std::string out = "stardisc-optimize";
    std::optional<double> budget;
    bool verbose = false;
};

int cmd_optimize(const OptimizeArgs& a, const std::vector<std::string>& argv) {
    const GAConfig cfg = a.ga.config(a.dim, a.n, a.budget ? *a.budget : default_budget());
    try {
        cfg.validate();
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
    RunDirectory run(a.out, argv, "optimize");

    GenerationObserver observe;
    if (a.verbose)
        observe = [](std::size_t gen, const std::vector<Individual>& parents, const Archive& ar) {
            double mean = 0.0;
            for (const auto& p : parents) mean += p.value();
            std::fprintf(stderr, "generation %zu best %.6f mean %.6f\n", gen, ar.entries().front().value(),
                         mean / static_cast<double>(parents.size()));
        };
    const GAResult r = run_ga(cfg, a.seed, observe);

    std::vector<Individual> candidates = r.archive.entries();
    const std::size_t archived = candidates.size();
    candidates.insert(candidates.end(), r.population.begin(), r.population.end());
    const auto assessed = final_evaluation(candidates, cfg, a.seed);
    // Archive rows, re-scored, in their new order.
    std::vector<Individual> archive_rows;
    for (const auto& c : assessed)
        for (std::size_t i = 0; i < archived; ++i)
            if (r.archive.entries()[i].genotype == c.genotype) archive_rows.push_back(c);

    const Individual& best = assessed.front();
    const DiscrepancyBound identity = assess(identity_genotype(a.dim), cfg, a.seed);
    const std::vector<io::ResultRecord> rows{
        {a.dim, a.n, best.value(), best.fitness->kind, io::Source::optimized},
        {a.dim, a.n, identity.value, identity.kind, io::Source::identity_halton}};

    const auto gv = genotype_to_vector(best.genotype);
    run.write("best_vector.json", [&](std::ostream& os) { io::write_generating_vector(os, gv); });
    run.write("best_points.txt", [&](std::ostream& os) { io::write_point_set(os, generate(a.n, gv)); });
    run.write("archive.csv", [&](std::ostream& os) { io::write_archive_csv(os, archive_rows); });
    run.write("history.csv", [&](std::ostream& os) { io::write_history_csv(os, r.history); });
    run.write("results.csv", [&](std::ostream& os) { io::write_results_csv(os, rows); });
    run.write("results.json", [&](std::ostream& os) {
        json j = json::array();
        for (const auto& row : rows) j.push_back(io::to_json(row));
        os << j.dump(2) << '\n';
    });
    json config = to_json(cfg);
    config["evaluations"] = r.evaluations;
    run.finish(config, a.seed);

    std::cout << "best " << io::format_double(best.value()) << ' ' << to_string(best.fitness->kind) << '\n'
              << "identity-halton " << io::format_double(identity.value) << ' ' << to_string(identity.kind) << '\n'
              << "out " << run.path().string() << '\n';
    return kOk;
}

struct InverseArgs {
    std::size_t dim = 0;
    double epsilon = 0.0;
    std::vector<std::size_t> bounds;
    GAFlags ga;
    std::uint64_t seed = kDefaultSeed;
    std::string out = "stardisc-inverse";
    std::optional<double> budget;
    bool verbose = false;
};

int cmd_inverse(const InverseArgs& a, const std::vector<std::string>& argv) {
    const InverseProblem prob{a.dim, a.epsilon, a.bounds.at(0), a.bounds.at(1)};
    const GAConfig cfg = a.ga.config(a.dim, prob.b, a.budget ? *a.budget : default_budget());
    try {
        prob.validate();
        cfg.validate();
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
    RunDirectory run(a.out, argv, "inverse");

    InverseObserver observe;
    if (a.verbose)
        observe = [](std::size_t gen, const std::vector<InverseIndividual>&, const ParetoArchive& ar) {
            std::fprintf(stderr, "generation %zu archive %zu smallest n %zu\n", gen, ar.size(),
                         ar.empty() ? std::size_t{0} : ar.entries().front().n);
        };
    const InverseResult r = run_inverse(prob, cfg, a.seed, observe);
    const auto checks = final_check(r.archive, prob, cfg, a.seed);

    run.write("pareto.csv", [&](std::ostream& os) { io::write_pareto_csv(os, checks); });
    json pareto = json::array();
    for (std::size_t k = 0; k < checks.size(); ++k) {
        const auto& c = checks[k];
        const std::string name = "vectors/pareto_" + std::to_string(k) + "_n" + std::to_string(c.entry.n) + ".json";
        run.write(name, [&](std::ostream& os) { io::write_generating_vector(os, genotype_to_vector(c.entry.genotype)); });
        pareto.push_back({{"n", c.entry.n},
                          {"discrepancy", io::to_json(c.entry.disc)},
                          {"final_discrepancy", io::to_json(c.final_disc)},
                          {"meets_epsilon", c.meets_epsilon},
                          {"boundary", c.boundary},
                          {"vector", name}});
    }
    run.write("pareto.json", [&](std::ostream& os) { os << pareto.dump(2) << '\n'; });
    run.write("history.csv", [&](std::ostream& os) { io::write_inverse_history_csv(os, r.history); });
    json config = to_json(cfg);
    config["epsilon"] = prob.epsilon;
    config["bounds"] = {prob.a, prob.b};
    config.erase("n");
    config["evaluations"] = r.evaluations;
    run.finish(config, a.seed);

    std::cout << "archive " << checks.size() << '\n';
    for (const auto& c : checks)
        std::cout << "n " << c.entry.n << " discrepancy " << io::format_double(c.final_disc.value) << ' '
                  << to_string(c.final_disc.kind) << (c.meets_epsilon ? "" : " above-epsilon") << '\n';
    std::cout << "out " << run.path().string() << '\n';
    return kOk;
}

struct BaselineArgs {
    std::size_t dim = 0;
    std::size_t n_min = 1;
    std::size_t n_max = 0;
    std::string mode = "auto";
    std::uint32_t runs = kFinalTARuns;
    std::uint32_t iterations = TAConfig{}.iterations;
    std::uint64_t seed = kDefaultSeed;
    std::string out = "stardisc-baseline";
    std::optional<double> budget;
};

int cmd_baseline(const BaselineArgs& a, const std::vector<std::string>& argv) {
    if (a.n_min < 1 || a.n_max < a.n_min) throw UsageError("need 1 <= --n-min <= --n-max");
    GAConfig cfg = GAConfig::for_dimension(a.dim, a.n_min);
    cfg.mode = parse_eval_mode(a.mode);
    cfg.ta.runs = a.runs;
    cfg.ta.iterations = a.iterations;
    cfg.ta.seed = a.seed;
    cfg.cell_budget = a.budget ? *a.budget : default_budget();
    try {
        cfg.validate();
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
    RunDirectory run(a.out, argv, "baseline");

    const Genotype g = identity_genotype(a.dim);
    std::vector<io::ResultRecord> rows;
    for (std::size_t n = a.n_min; n <= a.n_max; ++n) {
        cfg.n = n;
        const auto b = evaluate_fitness(g, cfg, n);
        rows.push_back({a.dim, n, b.value, b.kind, io::Source::identity_halton});
    }
    run.write("results.csv", [&](std::ostream& os) { io::write_results_csv(os, rows); });
    run.write("results.json", [&](std::ostream& os) {
        json j = json::array();
        for (const auto& row : rows) j.push_back(io::to_json(row));
        os << j.dump(2) << '\n';
    });
    json config = {{"d", a.dim}, {"n_min", a.n_min}, {"n_max", a.n_max}, {"mode", a.mode},
                   {"ta", to_json(cfg.ta)}, {"cell_budget", cfg.cell_budget}};
    run.finish(config, a.seed);
    io::write_results_csv(std::cout, rows);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    CLI::App app{"Optimized generalized Halton point sets and star discrepancy"};
    app.set_version_flag("--version", std::string(STARDISC_VERSION));
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Write the first n points of a (generalized) Halton sequence");
    g->add_option("--dim", gen.dim, "Dimension")->check(CLI::Range(std::size_t{1}, kMaxDimension));
    g->add_option("--n", gen.n, "Number of points")->required()->check(CLI::PositiveNumber);
    auto* vec = g->add_option("--vector", gen.vector_file, "Generating vector JSON file")->check(CLI::ExistingFile);
    auto* ident = g->add_flag("--identity", gen.identity, "Use the identity permutations");
    vec->excludes(ident);
    g->add_option("--out", gen.out, "Output point set file")->required();

    EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "Star discrepancy of a point set file");
    e->add_option("--points,points", ev.file, "Point set file")->required();
    auto* ex = e->add_flag("--exact", ev.exact, "Exact grid enumeration (refuses above the budget)");
    auto* ta = e->add_flag("--ta", ev.ta, "Threshold accepting lower bound");
    ex->excludes(ta);
    e->add_option("--runs", ev.runs, "Threshold accepting runs")->capture_default_str()->check(CLI::PositiveNumber);
    e->add_option("--iterations,--iters", ev.iterations, "Iterations per run")->capture_default_str()->check(CLI::PositiveNumber);
    e->add_option("--seed", ev.seed, "Random seed")->capture_default_str();
    e->add_option("--budget", ev.budget, "Grid cell budget for exact evaluation (env STARDISC_BUDGET)");
    e->add_flag("--json", ev.as_json, "Print JSON");

    OptimizeArgs op;
    auto* o = app.add_subcommand("optimize", "Search for generating vectors with small discrepancy");
    o->add_option("--dim", op.dim, "Dimension")->required()->check(CLI::Range(std::size_t{1}, kMaxDimension));
    o->add_option("--n", op.n, "Number of points")->required()->check(CLI::PositiveNumber);
    op.ga.add(o);
    o->add_option("--seed", op.seed, "Random seed")->capture_default_str();
    o->add_option("--out", op.out, "Output directory")->capture_default_str();
    o->add_option("--budget", op.budget, "Grid cell budget for exact evaluation (env STARDISC_BUDGET)");
    o->add_flag("--verbose", op.verbose, "Per-generation progress on stderr");

    InverseArgs inv;
    auto* i = app.add_subcommand("inverse", "Smallest point sets meeting a discrepancy threshold");
    i->add_option("--dim", inv.dim, "Dimension")->required()->check(CLI::Range(std::size_t{1}, kMaxDimension));
    i->add_option("--epsilon", inv.epsilon, "Discrepancy threshold")->required();
    i->add_option("--bounds", inv.bounds, "Search interval for n: A B")->required()->expected(2);
    inv.ga.add(i);
    i->add_option("--seed", inv.seed, "Random seed")->capture_default_str();
    i->add_option("--out", inv.out, "Output directory")->capture_default_str();
    i->add_option("--budget", inv.budget, "Grid cell budget for exact evaluation (env STARDISC_BUDGET)");
    i->add_flag("--verbose", inv.verbose, "Per-generation progress on stderr");

    BaselineArgs base;
    auto* b = app.add_subcommand("baseline", "Discrepancy of identity Halton prefixes over a range of n");
    b->add_option("--dim", base.dim, "Dimension")->required()->check(CLI::Range(std::size_t{1}, kMaxDimension));
    b->add_option("--n-min", base.n_min, "Smallest n")->capture_default_str();
    b->add_option("--n-max", base.n_max, "Largest n")->required();
    b->add_option("--mode", base.mode, "exact, ta or auto")
        ->check(CLI::IsMember({"exact", "ta", "auto"}))
        ->capture_default_str();
    b->add_option("--runs", base.runs, "Threshold accepting runs")->capture_default_str()->check(CLI::PositiveNumber);
    b->add_option("--iterations", base.iterations, "Iterations per run")->capture_default_str()->check(CLI::PositiveNumber);
    b->add_option("--seed", base.seed, "Random seed")->capture_default_str();
    b->add_option("--out", base.out, "Output directory")->capture_default_str();
    b->add_option("--budget", base.budget, "Grid cell budget for exact evaluation (env STARDISC_BUDGET)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*g) {
            if (!gen.identity && gen.vector_file.empty()) throw UsageError("generate needs --vector FILE or --identity");
            return cmd_generate(gen);
        }
        if (*e) return cmd_evaluate(ev);
        if (*o) return cmd_optimize(op, args);
        if (*i) return cmd_inverse(inv, args);
        if (*b) return cmd_baseline(base, args);
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kUsage;
    } catch (const ParseError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kParse;
    } catch (const BudgetExceeded& err) {
        std::fprintf(stderr,
                     "error: exact evaluation needs %.6g grid cells, budget is %.6g "
                     "(raise --budget or STARDISC_BUDGET, or use --ta)\n",
                     err.estimated_cells(), err.budget());
        return kBudget;
    } catch (const ValidationError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kUsage;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
