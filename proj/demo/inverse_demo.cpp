// Smallest 3-dimensional generalized Halton sets with star discrepancy at most
// 0.15, searching n in [8, 64].

#include <cstdio>

#include <stardisc/stardisc.hpp>

int main() {
    using namespace stardisc;

    const InverseProblem prob{3, 0.15, 8, 64};
    GAConfig cfg = GAConfig::for_dimension(prob.d, prob.b);
    cfg.mode = EvalMode::exact;
    cfg.generations = 10;

    const auto result = run_inverse(prob, cfg, 7);
    std::printf("%zu nondominated point sets (%llu discrepancy evaluations)\n", result.archive.size(),
                static_cast<unsigned long long>(result.evaluations));
    for (const auto& e : result.archive.entries()) std::printf("  n = %3zu  D* = %.6f\n", e.n, e.disc.value);

    // Identity Halton for comparison.
    const auto plain = bisection_evaluate(identity_genotype(prob.d), prob, cfg, 7);
    if (plain.feasible)
        std::printf("identity Halton: n = %zu\n", plain.n);
    else
        std::printf("identity Halton: no n in [%zu, %zu]\n", prob.a, prob.b);
}
