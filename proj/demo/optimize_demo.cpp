// Optimizes the digit permutations of a 5-dimensional, 25-point Halton set and
// compares it with the plain Halton set.

#include <cstdio>

#include <stardisc/stardisc.hpp>

int main() {
    using namespace stardisc;

    GAConfig cfg = GAConfig::for_dimension(5, 25);
    cfg.mode = EvalMode::exact;
    cfg.generations = 20;

    const auto result = run_ga(cfg, 42, [](std::size_t gen, const std::vector<Individual>&, const Archive& ar) {
        if (gen % 5 == 0) std::printf("generation %2zu  best %.6f\n", gen, ar.entries().front().value());
    });

    const double plain = exact_star_discrepancy(generate(25, GeneratingVector::identity(5))).value;
    std::printf("\nHalton           %.6f\noptimized        %.6f\n\n", plain, result.best.value());

    const auto gv = genotype_to_vector(result.best.genotype);
    for (std::size_t j = 0; j < gv.dimension(); ++j) {
        std::printf("base %2u:", gv[j].base());
        for (auto v : gv[j].map()) std::printf(" %u", v);
        std::printf("\n");
    }
}
