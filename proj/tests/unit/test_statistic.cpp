#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "cfcsr/errors.hpp"
#include "cfcsr/simulate.hpp"
#include "cfcsr/statistic.hpp"

using namespace cfcsr;

namespace {

PointPattern reflect(const PointPattern& p) {
    std::vector<double> c(p.coords().begin(), p.coords().end());
    for (auto& x : c) x = 1.0 - x;
    return PointPattern(p.dim(), c);
}

}  // namespace

TEST(CfStatistic, SingleCenterPointByHand) {
    const double e = std::exp(-0.5);
    const double expected = 1.0 - 2.0 * std::pow(2.0 - 2.0 * e, 2) + std::pow(2.0 / std::exp(1.0), 2);
    EXPECT_NEAR(cf_statistic(PointPattern(2, {0.5, 0.5}), 1.0), expected, 1e-14);
}

TEST(CfStatistic, VanishesAsRhoShrinks) {
    Rng rng = make_rng(1, 0);
    const auto p = sim_csr(30, 2, rng);
    EXPECT_NEAR(cf_statistic(p, 1e-6), 0.0, 1e-4);
}

TEST(CfStatistic, MatchesOracleAtRho5) {
    Rng rng = make_rng(2, 0);
    const auto p = sim_csr(10, 2, rng);
    const double a = cf_statistic(p, 5.0), b = cf_statistic_oracle(p, 5.0);
    EXPECT_LE(std::fabs(a - b), 1e-6 * std::fabs(b));
}

TEST(CfStatistic, OracleSmallCases) {
    EXPECT_NEAR(cf_statistic_oracle(PointPattern(2, {0.5, 0.5}), 1.0), cf_statistic(PointPattern(2, {0.5, 0.5}), 1.0),
                1e-6);
    const PointPattern two(2, {0.25, 0.25, 0.75, 0.75});
    EXPECT_NEAR(cf_statistic_oracle(two, 2.0), cf_statistic(two, 2.0), 1e-6);
    EXPECT_NEAR(cf_statistic_oracle(two, 1e-6), 0.0, 1e-6);
}

TEST(CfStatistic, OracleOneDimension) {
    Rng rng = make_rng(3, 0);
    const auto p = sim_csr(12, 1, rng);
    for (double rho : {0.5, 3.0, 20.0}) EXPECT_NEAR(cf_statistic_oracle(p, rho), cf_statistic(p, rho), 1e-6);
}

TEST(CfStatistic, PermutationAndReflectionInvariant) {
    Rng rng = make_rng(4, 0);
    const auto p = sim_csr(25, 2, rng);
    std::vector<double> c(p.coords().begin(), p.coords().end());
    std::vector<double> swapped;
    for (std::size_t i = p.size(); i-- > 0;) swapped.insert(swapped.end(), {c[2 * i], c[2 * i + 1]});
    const double d = cf_statistic(p, 3.0);
    EXPECT_NEAR(cf_statistic(PointPattern(2, swapped), 3.0), d, 1e-12 * std::max(1.0, d));
    EXPECT_NEAR(cf_statistic(reflect(p), 3.0), d, 1e-12 * std::max(1.0, d));
}

TEST(CfStatistic, SerialMatchesParallel) {
    Rng rng = make_rng(5, 0);
    const auto p = sim_csr(300, 3, rng);
    for (double rho : {0.3, 4.0, 40.0}) {
        const double a = cf_statistic(p, rho), b = cf_statistic_serial(p, rho);
        EXPECT_NEAR(a, b, 1e-10 * std::max(1.0, std::fabs(b)));
    }
}

TEST(CfStatistic, LowerBound) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng = make_rng(6, s);
        const auto p = sim_csr(15, 2, rng);
        for (double rho : {0.01, 1.0, 50.0}) EXPECT_GT(cf_statistic(p, rho), -1e-9 * 15);
    }
}

TEST(CfDistanceCache, GridMatchesDirect) {
    Rng rng = make_rng(7, 0);
    const auto p = sim_csr(40, 2, rng);
    CfDistanceCache cache(p);
    const std::vector<double> grid{0.5, 1.0, 7.0, 60.0};
    const auto values = cache.statistic(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        EXPECT_NEAR(values[i], cf_statistic(p, grid[i]), 1e-11 * std::max(1.0, values[i]));
}

TEST(Resolution, RejectsNonPositive) {
    EXPECT_THROW(Resolution(0.0), InputError);
    EXPECT_THROW(Resolution(-1.0), InputError);
    EXPECT_THROW(Resolution(std::nan("")), InputError);
}

TEST(OmegaBar, SinglePointByHand) {
    const double tri = 1.0 - 2.0 * 0.5625 + 4.0 / 9.0;
    EXPECT_NEAR(omega_bar_squared(PointPattern(2, {0.5, 0.5})), tri / 4.0, 1e-15);
}

TEST(OmegaBar, ReflectionSymmetric) {
    Rng rng = make_rng(8, 0);
    const auto p = sim_csr(30, 2, rng);
    EXPECT_NEAR(omega_bar_squared(reflect(p)), omega_bar_squared(p), 1e-13);
}

TEST(OmegaBar, TriangularOracle) {
    Rng rng = make_rng(9, 0);
    const auto p = sim_csr(50, 2, rng);
    EXPECT_NEAR(4.0 * omega_bar_squared(p), weighted_l2_oracle(p, triangular_weight()), 1e-6);
}

TEST(OmegaBar, NeedsTwoDimensions) { EXPECT_THROW(omega_bar_squared(PointPattern(1, {0.5})), InputError); }
