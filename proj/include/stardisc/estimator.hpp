#pragma once

// Threshold accepting on the grid spanned by a point set.
//
// Every value this module reports is grid_local_value at a grid point it
// actually visited, so the results are lower bounds on the star discrepancy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "stardisc/discrepancy.hpp"
#include "stardisc/random.hpp"

namespace stardisc {

struct TAConfig {
    std::uint32_t iterations = 4000;  ///< per run
    std::uint32_t runs = 10;
    std::uint64_t seed = 0;
    std::uint32_t threshold_samples = 100;
};

/// Run count used for the final, more accurate evaluation of candidates.
inline constexpr std::uint32_t kFinalTARuns = 50;

struct TARunResult {
    double best = 0.0;                  ///< maximum over all visited grid points
    std::vector<std::uint32_t> final_point;
    double final_value = 0.0;
    std::uint64_t evaluations = 0;
};

namespace detail {

class ThresholdAccepting {
public:
    ThresholdAccepting(const Grid& grid, const TAConfig& cfg, std::uint64_t run_index)
        : grid_(grid), cfg_(cfg), rng_(derive_seed(cfg.seed, {run_index})),
          d_(grid.dimension()), axes_(d_) {
        std::iota(axes_.begin(), axes_.end(), std::size_t{0});
        initial_radius_ = std::max<std::size_t>(1, (grid.points() + 1 + 7) / 8);
    }

    TARunResult run() {
        TARunResult out;
        const double t0 = -threshold_scale();

        std::vector<std::uint32_t> current = random_point();
        double current_value = evaluate(current);
        std::vector<std::uint32_t> candidate;
        const std::uint32_t iters = cfg_.iterations;
        for (std::uint32_t it = 0; it < iters; ++it) {
            const double progress = iters > 1 ? static_cast<double>(it) / (iters - 1) : 1.0;
            const auto radius = static_cast<std::size_t>(
                std::lround(static_cast<double>(initial_radius_) -
                            static_cast<double>(initial_radius_ - 1) * progress));
            const double threshold = t0 * (1.0 - progress);
            candidate = current;
            perturb(candidate, std::max<std::size_t>(1, radius));
            const double value = evaluate(candidate);
            if (value - current_value >= threshold) {
                current.swap(candidate);
                current_value = value;
            }
        }
        climb(current, current_value);

        out.best = best_;
        out.final_point = std::move(current);
        out.final_value = current_value;
        out.evaluations = evaluations_;
        return out;
    }

private:
    double evaluate(const std::vector<std::uint32_t>& y) {
        const double v = grid_.value(y);
        ++evaluations_;
        if (v > best_) best_ = v;
        return v;
    }

    std::vector<std::uint32_t> random_point() {
        std::vector<std::uint32_t> y(d_);
        for (std::size_t j = 0; j < d_; ++j)
            y[j] = static_cast<std::uint32_t>(uniform_index(rng_, grid_.axis_size(j)));
        return y;
    }

    // Moves 1..min(d,3) distinct axes by a nonzero offset in [-radius, radius],
    // clamped to the axis.
    void perturb(std::vector<std::uint32_t>& y, std::size_t radius) {
        const std::size_t k = 1 + uniform_index(rng_, std::min<std::size_t>(d_, 3));
        for (std::size_t s = 0; s < k; ++s) {
            std::swap(axes_[s], axes_[s + uniform_index(rng_, d_ - s)]);
            const std::size_t j = axes_[s];
            auto offset = static_cast<long>(uniform_index(rng_, 2 * radius)) - static_cast<long>(radius);
            if (offset >= 0) ++offset;
            const long top = static_cast<long>(grid_.axis_size(j)) - 1;
            y[j] = static_cast<std::uint32_t>(std::clamp(static_cast<long>(y[j]) + offset, 0L, top));
        }
    }

    // Median absolute value difference between random points and their
    // neighbors at the initial radius.
    double threshold_scale() {
        if (cfg_.threshold_samples == 0) return 0.0;
        std::vector<double> deltas;
        deltas.reserve(cfg_.threshold_samples);
        for (std::uint32_t s = 0; s < cfg_.threshold_samples; ++s) {
            auto p = random_point();
            const double vp = evaluate(p);
            perturb(p, initial_radius_);
            deltas.push_back(std::abs(evaluate(p) - vp));
        }
        auto mid = deltas.begin() + static_cast<std::ptrdiff_t>(deltas.size() / 2);
        std::nth_element(deltas.begin(), mid, deltas.end());
        return *mid;
    }

    // First-improvement ascent over single-axis +-1 moves, so the final
    // state is a local maximum.
    void climb(std::vector<std::uint32_t>& y, double& value) {
        for (bool improved = true; improved;) {
            improved = false;
            for (std::size_t j = 0; j < d_ && !improved; ++j) {
                for (int step : {-1, 1}) {
                    const long next = static_cast<long>(y[j]) + step;
                    if (next < 0 || next >= static_cast<long>(grid_.axis_size(j))) continue;
                    const auto old = y[j];
                    y[j] = static_cast<std::uint32_t>(next);
                    const double v = evaluate(y);
                    if (v > value) {
                        value = v;
                        improved = true;
                        break;
                    }
                    y[j] = old;
                }
            }
        }
    }

    const Grid& grid_;
    const TAConfig& cfg_;
    Rng rng_;
    std::size_t d_;
    std::vector<std::size_t> axes_;
    std::size_t initial_radius_;
    double best_ = -1.0;
    std::uint64_t evaluations_ = 0;
};

}  // namespace detail

inline TARunResult ta_run_detailed(const Grid& grid, const TAConfig& cfg, std::uint64_t run_index) {
    return detail::ThresholdAccepting(grid, cfg, run_index).run();
}

/// One threshold-accepting run; deterministic in (X, cfg, run_index).
inline double ta_run(const PointSet& X, const TAConfig& cfg, std::uint64_t run_index) {
    const Grid grid(X);
    return ta_run_detailed(grid, cfg, run_index).best;
}

inline DiscrepancyBound ta_best_of(const Grid& grid, const TAConfig& cfg) {
    if (cfg.runs == 0) throw ValidationError("TA needs at least one run");
    if (cfg.iterations == 0) throw ValidationError("TA needs at least one iteration");
    DiscrepancyBound b;
    b.kind = BoundKind::lower_bound;
    b.value = 0.0;
    b.runs = cfg.runs;
    b.seed = cfg.seed;
    for (std::uint32_t r = 0; r < cfg.runs; ++r) {
        const auto res = ta_run_detailed(grid, cfg, r);
        b.value = r == 0 ? res.best : std::max(b.value, res.best);
        b.evaluations += res.evaluations;
    }
    return b;
}

/// Best of cfg.runs independent runs.
inline DiscrepancyBound ta_best_of(const PointSet& X, const TAConfig& cfg) {
    return ta_best_of(Grid(X), cfg);
}

}  // namespace stardisc
