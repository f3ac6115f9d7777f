#pragma once

// Local and star discrepancy of point sets in [0,1)^d.
//
// The star discrepancy is attained on the grid spanned by the point set
// (per-axis coordinate values plus 1), where at each grid point y both
//   V_y - A(y)/n        (open box [0,y))
//   Abar(y)/n - V_y     (closed box [0,y])
// have to be considered. The exact evaluator enumerates that grid depth-first
// with incremental point filtering and subtree bounds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "stardisc/error.hpp"
#include "stardisc/sequence.hpp"

namespace stardisc {

enum class BoundKind { exact, lower_bound };

inline const char* to_string(BoundKind k) noexcept {
    return k == BoundKind::exact ? "exact" : "lower_bound";
}

/// A discrepancy value and how it was obtained.
struct DiscrepancyBound {
    double value = 0.0;
    BoundKind kind = BoundKind::exact;
    std::uint64_t evaluations = 0;  ///< grid cells (exact) or local evaluations (TA)
    std::uint32_t runs = 0;         ///< TA runs; 0 for exact
    std::uint64_t seed = 0;

    friend bool operator==(const DiscrepancyBound&, const DiscrepancyBound&) = default;
};

/// Default cap on the number of grid cells the exact evaluator may visit.
inline constexpr double kDefaultCellBudget = 1e9;

struct BoxCounts {
    std::size_t open = 0;    ///< points with x_j <  y_j for all j
    std::size_t closed = 0;  ///< points with x_j <= y_j for all j
};

inline BoxCounts box_counts(std::span<const double> y, const PointSet& X) {
    if (y.size() != X.dimension())
        throw ValidationError("test point has dimension " + std::to_string(y.size()) +
                              ", point set has " + std::to_string(X.dimension()));
    BoxCounts c;
    for (std::size_t i = 0; i < X.size(); ++i) {
        bool open = true, closed = true;
        for (std::size_t j = 0; j < y.size() && closed; ++j) {
            const double x = X(i, j);
            if (!(x < y[j])) open = false;
            if (!(x <= y[j])) closed = false;
        }
        c.open += open && closed;
        c.closed += closed;
    }
    return c;
}

inline double box_volume(std::span<const double> y) noexcept {
    double v = 1.0;
    for (double c : y) v *= c;
    return v;
}

/// |V_y - A(y,X)/n|.
inline double local_discrepancy(std::span<const double> y, const PointSet& X) {
    const auto c = box_counts(y, X);
    const double n = static_cast<double>(X.size());
    return std::abs(box_volume(y) - static_cast<double>(c.open) / n);
}

/// max(V_y - A/n, Abar/n - V_y). Not clamped at zero.
inline double grid_local_value(std::span<const double> y, const PointSet& X) {
    const auto c = box_counts(y, X);
    const double n = static_cast<double>(X.size());
    const double v = box_volume(y);
    return std::max(v - static_cast<double>(c.open) / n, static_cast<double>(c.closed) / n - v);
}

/// Grid spanned by a point set, with each point's coordinates replaced by
/// their rank on the corresponding axis. x_j < axis_j[t] iff rank_j < t and
/// x_j <= axis_j[t] iff rank_j <= t.
class Grid {
public:
    explicit Grid(const PointSet& X) : n_(X.size()), d_(X.dimension()), axes_(d_), ranks_(n_ * d_) {
        if (X.empty()) throw ValidationError("point set is empty");
        for (std::size_t j = 0; j < d_; ++j) {
            auto& axis = axes_[j];
            axis.reserve(n_ + 1);
            for (std::size_t i = 0; i < n_; ++i) axis.push_back(X(i, j));
            axis.push_back(1.0);
            std::sort(axis.begin(), axis.end());
            axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
            for (std::size_t i = 0; i < n_; ++i) {
                const auto it = std::lower_bound(axis.begin(), axis.end(), X(i, j));
                ranks_[i * d_ + j] = static_cast<std::uint32_t>(it - axis.begin());
            }
        }
    }

    std::size_t points() const noexcept { return n_; }
    std::size_t dimension() const noexcept { return d_; }
    const std::vector<double>& axis(std::size_t j) const noexcept { return axes_[j]; }
    std::size_t axis_size(std::size_t j) const noexcept { return axes_[j].size(); }
    std::uint32_t rank(std::size_t i, std::size_t j) const noexcept { return ranks_[i * d_ + j]; }

    /// Product of the axis sizes, as a double since it overflows 64 bits
    /// quickly.
    double cell_count() const noexcept {
        double c = 1.0;
        for (const auto& a : axes_) c *= static_cast<double>(a.size());
        return c;
    }

    std::vector<double> resolve(std::span<const std::uint32_t> idx) const {
        std::vector<double> y(d_);
        for (std::size_t j = 0; j < d_; ++j) y[j] = axes_[j][idx[j]];
        return y;
    }

    /// grid_local_value at the grid point with the given axis indices, O(n d).
    double value(std::span<const std::uint32_t> idx) const noexcept {
        double v = 1.0;
        for (std::size_t j = 0; j < d_; ++j) v *= axes_[j][idx[j]];
        std::size_t open = 0, closed = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const std::uint32_t* r = &ranks_[i * d_];
            bool in_closed = true, in_open = true;
            for (std::size_t j = 0; j < d_; ++j) {
                if (r[j] > idx[j]) {
                    in_closed = false;
                    break;
                }
                if (r[j] == idx[j]) in_open = false;
            }
            closed += in_closed;
            open += in_closed && in_open;
        }
        const double n = static_cast<double>(n_);
        return std::max(v - static_cast<double>(open) / n, static_cast<double>(closed) / n - v);
    }

private:
    std::size_t n_;
    std::size_t d_;
    std::vector<std::vector<double>> axes_;
    std::vector<std::uint32_t> ranks_;
};

namespace detail {

// Depth-first enumeration of the grid. Level k fixes y_k; the candidate list
// holds the points inside the closed box of the fixed prefix together with a
// flag telling whether they are also strictly inside. Lists are kept sorted
// by rank on the last axis.
//
// On the last axis the counts only change at a point's rank r (the point
// enters the closed box) and at r+1 (it enters the open box). Between two
// changes the counts are fixed while the volume grows with y, so the open term
// is maximal at the right end of the range and the closed term at the left
// end; only those cells are evaluated.
class GridEnumerator {
public:
    explicit GridEnumerator(const Grid& grid)
        : grid_(grid), d_(grid.dimension()), n_(static_cast<double>(grid.points())),
          members_(d_), open_(d_), min_rest_(d_, 1.0) {
        for (std::size_t k = d_ - 1; k-- > 0;) min_rest_[k] = min_rest_[k + 1] * grid.axis(k + 1)[0];
        const std::size_t last = d_ - 1;
        auto& root = members_[0];
        root.resize(grid.points());
        for (std::uint32_t i = 0; i < root.size(); ++i) root[i] = i;
        std::stable_sort(root.begin(), root.end(), [&](std::uint32_t a, std::uint32_t b) {
            return grid.rank(a, last) < grid.rank(b, last);
        });
        open_[0].assign(root.size(), 1);
        for (std::size_t k = 1; k < d_; ++k) {
            members_[k].reserve(root.size());
            open_[k].reserve(root.size());
        }
    }

    double run() {
        best_ = -std::numeric_limits<double>::infinity();
        cells_ = 0;
        descend(0, 1.0, true, true);
        return best_;
    }

    std::uint64_t cells() const noexcept { return cells_; }

private:
    void descend(std::size_t k, double prefix_volume, bool want_open, bool want_closed) {
        if (k + 1 == d_) {
            sweep_last(k, prefix_volume, want_open, want_closed);
            return;
        }
        const auto& axis = grid_.axis(k);
        const auto& parent = members_[k];
        const auto& parent_open = open_[k];
        auto& child = members_[k + 1];
        auto& child_open = open_[k + 1];
        for (std::size_t t = axis.size(); t-- > 0;) {
            const double volume = prefix_volume * axis[t];
            const auto tt = static_cast<std::uint32_t>(t);
            child.clear();
            child_open.clear();
            for (std::size_t m = 0; m < parent.size(); ++m) {
                const auto r = grid_.rank(parent[m], k);
                if (r <= tt) {
                    child.push_back(parent[m]);
                    child_open.push_back(parent_open[m] && r < tt);
                }
            }
            // Subtree bounds: the open term cannot exceed the volume with the
            // remaining coordinates at 1, the closed term cannot exceed the
            // current closed count minus the smallest reachable volume.
            const bool open_alive = want_open && volume > best_;
            const bool closed_alive = want_closed && static_cast<double>(child.size()) / n_ -
                                                         volume * min_rest_[k] >
                                                     best_;
            if (open_alive || closed_alive) descend(k + 1, volume, open_alive, closed_alive);
        }
    }

    void sweep_last(std::size_t k, double prefix_volume, bool want_open, bool want_closed) {
        const auto& axis = grid_.axis(k);
        const auto& list = members_[k];
        const auto& flags = open_[k];
        // The list is sorted by rank on this axis: walk its distinct ranks.
        std::size_t closed = 0, open = 0;
        for (std::size_t m = 0; m < list.size();) {
            const auto r = grid_.rank(list[m], k);
            const std::size_t open_below = open;
            for (; m < list.size() && grid_.rank(list[m], k) == r; ++m) {
                ++closed;
                open += flags[m];
            }
            const double v = prefix_volume * axis[r];
            ++cells_;
            if (want_open) best_ = std::max(best_, v - static_cast<double>(open_below) / n_);
            if (want_closed) best_ = std::max(best_, static_cast<double>(closed) / n_ - v);
        }
        if (want_open) {
            ++cells_;
            best_ = std::max(best_, prefix_volume * axis.back() - static_cast<double>(open) / n_);
        }
    }

    const Grid& grid_;
    std::size_t d_;
    double n_;
    std::vector<std::vector<std::uint32_t>> members_;
    std::vector<std::vector<std::uint8_t>> open_;
    std::vector<double> min_rest_;
    double best_ = 0.0;
    std::uint64_t cells_ = 0;
};

}  // namespace detail

/// Exact star discrepancy by enumeration of the spanned grid.
///
/// Throws BudgetExceeded when the full grid has more than `cell_budget` cells.
/// `evaluations` in the result is the number of grid cells actually evaluated;
/// cells dominated by another cell on the same range of an axis, and subtrees
/// that provably cannot beat the running maximum, are skipped.
inline DiscrepancyBound exact_star_discrepancy(const Grid& grid,
                                               double cell_budget = kDefaultCellBudget) {
    const double cells = grid.cell_count();
    if (cells > cell_budget) throw BudgetExceeded(cells, cell_budget);
    detail::GridEnumerator e(grid);
    DiscrepancyBound b;
    b.value = e.run();
    b.kind = BoundKind::exact;
    b.evaluations = e.cells();
    return b;
}

inline DiscrepancyBound exact_star_discrepancy(const PointSet& X,
                                               double cell_budget = kDefaultCellBudget) {
    return exact_star_discrepancy(Grid(X), cell_budget);
}

/// Whether exact evaluation of an n-point set in dimension d fits the budget,
/// using the worst case of (n+1) values per axis.
inline bool exact_affordable(std::size_t n, std::size_t d, double cell_budget = kDefaultCellBudget) {
    return std::pow(static_cast<double>(n + 1), static_cast<double>(d)) <= cell_budget;
}

}  // namespace stardisc
