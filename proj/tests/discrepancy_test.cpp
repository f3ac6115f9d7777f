#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "stardisc/discrepancy.hpp"

using namespace stardisc;

namespace {

// Twelve points in the unit square, three of them inside [0,2/3) x [0,1/2).
PointSet figure_one_set() {
    return PointSet(12, 2,
                    {0.10, 0.10, 0.30, 0.40, 0.50, 0.20,               // inside the box
                     0.70, 0.10, 0.80, 0.30, 0.90, 0.45, 0.20, 0.60,  //
                     0.40, 0.70, 0.60, 0.90, 0.75, 0.55, 0.95, 0.80, 0.05, 0.95});
}

PointSet centered_grid(std::size_t n) {
    std::vector<double> c(n);
    for (std::size_t i = 1; i <= n; ++i) c[i - 1] = static_cast<double>(2 * i - 1) / static_cast<double>(2 * n);
    return PointSet(n, 1, c);
}

}  // namespace

TEST(BoxCounts, FigureOne) {
    const auto X = figure_one_set();
    const std::vector<double> y{2.0 / 3.0, 0.5};
    EXPECT_EQ(box_counts(y, X).open, 3u);
    const std::vector<double> ones{1.0, 1.0};
    EXPECT_EQ(box_counts(ones, X).open, 12u);
    EXPECT_EQ(box_counts(ones, X).closed, 12u);
}

TEST(BoxCounts, MatchNaive) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng() % 40, d = 1 + rng() % 5;
        const auto X = oracle::lattice_point_set(n, d, 7, rng);
        std::vector<double> y(d);
        // Mix lattice values (ties with coordinates) and random values.
        for (auto& c : y) c = (rng() & 1) ? static_cast<double>(rng() % 8) / 7.0 : u(rng);
        const auto got = box_counts(y, X);
        const auto ref = oracle::naive_counts(y, X);
        EXPECT_EQ(got.open, ref.open);
        EXPECT_EQ(got.closed, ref.closed);
        EXPECT_LE(got.open, got.closed);
    }
}

TEST(BoxCounts, DimensionMismatch) {
    const auto X = figure_one_set();
    const std::vector<double> y{0.5};
    EXPECT_THROW(box_counts(y, X), ValidationError);
    EXPECT_THROW(local_discrepancy(y, X), ValidationError);
}

TEST(LocalDiscrepancy, FigureOne) {
    const auto X = figure_one_set();
    const std::vector<double> y{2.0 / 3.0, 0.5};
    EXPECT_DOUBLE_EQ(local_discrepancy(y, X), 1.0 / 12.0);
}

TEST(LocalDiscrepancy, Trivial) {
    std::mt19937_64 rng(2);
    const auto X = oracle::random_point_set(17, 3, rng);
    const std::vector<double> ones{1.0, 1.0, 1.0};
    EXPECT_EQ(local_discrepancy(ones, X), 0.0);
    // Four points at 1/8, 3/8, 5/8, 7/8: y = 1/2 holds two of them.
    const auto C = centered_grid(4);
    const std::vector<double> half{0.5};
    EXPECT_EQ(local_discrepancy(half, C), 0.0);
}

TEST(GridLocalValue, SinglePoint) {
    const PointSet X(1, 1, {0.5});
    const std::vector<double> y1{0.5}, y2{1.0};
    EXPECT_EQ(grid_local_value(y1, X), 0.5);
    EXPECT_EQ(grid_local_value(y2, X), 0.0);
}

TEST(GridLocalValue, MatchesSupremumNearGridPoint) {
    // The closed-box term is the limit of the open local discrepancy from
    // above, the open-box term is attained at y itself.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int samples = 0;
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 2 + rng() % 10, d = 1 + rng() % 3;
        const auto X = oracle::random_point_set(n, d, rng);
        const Grid grid(X);
        std::vector<std::uint32_t> idx(d);
        for (std::size_t j = 0; j < d; ++j) idx[j] = static_cast<std::uint32_t>(rng() % (grid.axis_size(j) - 1));
        const auto y = grid.resolve(idx);
        const double target = grid_local_value(y, X);
        EXPECT_EQ(grid.value(idx), target);

        double sup = local_discrepancy(y, X);
        std::vector<double> z(d);
        for (int s = 0; s < 5000; ++s, ++samples) {
            for (std::size_t j = 0; j < d; ++j) z[j] = y[j] + 1e-9 * u(rng);
            sup = std::max(sup, local_discrepancy(z, X));
        }
        EXPECT_NEAR(sup, target, 1e-7);
        EXPECT_LE(sup, target + 1e-7);
    }
    EXPECT_EQ(samples, 100000);
}

TEST(ExactDiscrepancy, SinglePoint) {
    const auto b = exact_star_discrepancy(PointSet(1, 1, {0.5}));
    EXPECT_EQ(b.value, 0.5);
    EXPECT_EQ(b.kind, BoundKind::exact);
    EXPECT_GT(b.evaluations, 0u);
}

TEST(ExactDiscrepancy, CenteredGrid) {
    for (std::size_t n = 1; n <= 64; ++n)
        EXPECT_NEAR(exact_star_discrepancy(centered_grid(n)).value, 1.0 / (2.0 * n), 1e-12) << n;
}

TEST(ExactDiscrepancy, FrozenHaltonValues) {
    // Exact rational values from an independent brute-force enumeration.
    const double vdc[] = {0.5, 0.5, 0.25, 0.25, 0.25, 0.25, 0.125, 0.125};
    for (std::size_t n = 1; n <= 8; ++n)
        EXPECT_NEAR(exact_star_discrepancy(generate(n, GeneratingVector::identity(1))).value, vdc[n - 1],
                    1e-15);
    EXPECT_NEAR(exact_star_discrepancy(generate(10, GeneratingVector::identity(2))).value, 4.0 / 15.0, 1e-15);
    EXPECT_NEAR(exact_star_discrepancy(generate(40, GeneratingVector::identity(3))).value,
                0.1474814814814815, 1e-15);
    EXPECT_NEAR(exact_star_discrepancy(generate(12, GeneratingVector::identity(4))).value, 11.0 / 25.0, 1e-15);
    EXPECT_NEAR(exact_star_discrepancy(generate(10, GeneratingVector::identity(5))).value, 27.0 / 55.0, 1e-15);
}

TEST(ExactDiscrepancy, EqualsNaiveEnumeration) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 1 + rng() % 12, d = 1 + rng() % 3;
        const auto X = oracle::random_point_set(n, d, rng);
        EXPECT_EQ(exact_star_discrepancy(X).value, oracle::naive_star_discrepancy(X));
    }
}

TEST(ExactDiscrepancy, EqualsNaiveWithRepeatedCoordinates) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 60; ++t) {
        const std::size_t n = 1 + rng() % 14, d = 1 + rng() % 4;
        const auto X = oracle::lattice_point_set(n, d, 2 + rng() % 5, rng);
        EXPECT_EQ(exact_star_discrepancy(X).value, oracle::naive_star_discrepancy(X));
    }
}

TEST(ExactDiscrepancy, DominatesLocalDiscrepancy) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 1 + rng() % 30, d = 1 + rng() % 4;
        const auto X = oracle::random_point_set(n, d, rng);
        const double exact = exact_star_discrepancy(X).value;
        EXPECT_GT(exact, 0.0);
        EXPECT_LE(exact, 1.0);
        std::vector<double> y(d);
        for (int s = 0; s < 10000; ++s) {
            for (auto& c : y) c = u(rng);
            ASSERT_LE(local_discrepancy(y, X), exact);
        }
    }
}

TEST(ExactDiscrepancy, InvariantUnderRelabeling) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 2 + rng() % 25, d = 2 + rng() % 3;
        const auto X = oracle::random_point_set(n, d, rng);
        const double ref = exact_star_discrepancy(X).value;

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        const std::size_t a = rng() % d, b = (a + 1) % d;
        PointSet Y(n, d);
        PointSet Z(n, d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                Y(i, j) = X(order[i], j);
                const std::size_t src = j == a ? b : j == b ? a : j;
                Z(i, j) = X(i, src);
            }
        EXPECT_EQ(exact_star_discrepancy(Y).value, ref);
        EXPECT_NEAR(exact_star_discrepancy(Z).value, ref, 1e-15);
    }
}

TEST(ExactDiscrepancy, BudgetRefusal) {
    const auto X = generate(125, GeneratingVector::identity(10));
    try {
        exact_star_discrepancy(X);
        FAIL() << "expected BudgetExceeded";
    } catch (const BudgetExceeded& e) {
        EXPECT_DOUBLE_EQ(e.estimated_cells(), std::pow(126.0, 10.0));
        EXPECT_EQ(e.budget(), kDefaultCellBudget);
    }
    EXPECT_THROW(exact_star_discrepancy(generate(20, GeneratingVector::identity(3)), 100.0), BudgetExceeded);
}

TEST(Grid, Structure) {
    const auto X = PointSet(4, 2, {0.5, 0.25, 0.5, 0.75, 0.25, 0.25, 0.125, 0.5});
    const Grid g(X);
    EXPECT_EQ(g.axis(0), (std::vector<double>{0.125, 0.25, 0.5, 1.0}));
    EXPECT_EQ(g.axis(1), (std::vector<double>{0.25, 0.5, 0.75, 1.0}));
    EXPECT_EQ(g.cell_count(), 16.0);
    EXPECT_EQ(g.rank(0, 0), 2u);
    EXPECT_EQ(g.rank(3, 1), 1u);
}
