#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "cfcsr/errors.hpp"
#include "cfcsr/imhof.hpp"
#include "cfcsr/inference.hpp"
#include "cfcsr/simulate.hpp"
#include "oracles.hpp"

using namespace cfcsr;

namespace {
const double kPi = std::acos(-1.0);
}

TEST(ThetaEta, SmallU) {
    const auto ev = imhof_for(1.0, 2);
    const auto te = ev->theta_eta(1e-12);
    EXPECT_NEAR(te.theta, 0.0, 1e-12);
    EXPECT_NEAR(te.eta, 0.0, 1e-12);
}

TEST(ThetaEta, SingleEigenvalue) {
    ImhofEvaluator ev({{1.0, 1}}, 0.0, 0.0);
    const auto te = ev.theta_eta(1.0);
    EXPECT_NEAR(te.theta, kPi / 8.0, 1e-15);
    EXPECT_NEAR(te.eta, 0.25 * std::log(2.0), 1e-15);
}

TEST(ThetaEta, BruteForceSpectrum) {
    for (double rho : {1.0, 8.0, 30.0}) {
        const auto sp = build_spectrum(rho, 2);
        const ImhofEvaluator ev(sp);
        const double t1 = sp.sum_all - sp.sum_trunc, t2 = sp.sum_sq_all - sp.sum_sq_trunc;
        for (double u : {0.1, 3.0, 40.0, 700.0}) {
            const auto a = ev.theta_eta(u);
            const auto b = oracle::theta_eta_brute(sp.eigs, t1, t2, u);
            EXPECT_NEAR(a.theta, b.theta, 1e-6 * std::max(1.0, b.theta)) << "rho=" << rho << " u=" << u;
            EXPECT_NEAR(a.eta, b.eta, 1e-6 * std::max(1.0, b.eta)) << "rho=" << rho << " u=" << u;
        }
    }
}

TEST(ImhofCdf, NonPositiveX) {
    const auto ev = imhof_for(1.0, 2);
    EXPECT_EQ(ev->cdf(0.0), 0.0);
    EXPECT_EQ(ev->cdf(-1.0), 0.0);
}

TEST(ImhofCdf, SingleEigenvalueIsChiSquare) {
    const double lambda = 0.7;
    ImhofEvaluator ev({{lambda, 1}}, 0.0, 0.0);
    boost::math::chi_squared chi(1.0);
    for (double x : {0.01, 0.2, 0.7, 2.0, 5.0})
        EXPECT_NEAR(ev.cdf(x), boost::math::cdf(chi, x / lambda), 1e-6) << x;
    for (double p : {0.05, 0.5, 0.95})
        EXPECT_NEAR(ev.quantile(p), lambda * boost::math::quantile(chi, p), 1e-4) << p;
}

TEST(ImhofCdf, DoubleEigenvalueIsExponential) {
    ImhofEvaluator ev({{0.5, 2}}, 0.0, 0.0);
    for (double x : {0.1, 1.0, 3.0}) EXPECT_NEAR(ev.cdf(x), 1.0 - std::exp(-x), 1e-6);
}

TEST(ImhofCdf, MonotoneGrids) {
    for (double rho : {1.0, 8.0, 30.0}) {
        const auto ev = imhof_for(rho, 2);
        const double lo = ev->quantile(0.001), hi = ev->quantile(0.999);
        double prev = -1.0;
        for (int i = 0; i < 100; ++i) {
            const double c = ev->cdf(lo + (hi - lo) * i / 99.0);
            EXPECT_GE(c, prev - 1e-9);
            prev = c;
        }
    }
}

TEST(ImhofQuantile, RoundTrip) {
    for (double rho : {1.0, 8.0}) {
        const auto ev = imhof_for(rho, 2);
        for (double p : {0.005, 0.025, 0.5, 0.975, 0.995})
            EXPECT_NEAR(ev->cdf(ev->quantile(p)), p, 2 * ev->abs_tol()) << rho << ' ' << p;
        EXPECT_GT(ev->quantile(0.9), ev->quantile(0.1));
        EXPECT_THROW(ev->quantile(0.0), InputError);
        EXPECT_THROW(ev->quantile(1.0), InputError);
    }
}

TEST(ImhofCdf, MonteCarloMedian) {
    const auto sp = build_spectrum(1.0, 2);
    const ImhofEvaluator ev(sp);
    std::int64_t count = 0;
    double top = 0.0;
    for (const auto& e : sp.eigs) {
        if (count >= 2000) break;
        const auto m = std::min<std::int64_t>(e.multiplicity, 2000 - count);
        top += m * e.value;
        count += m;
    }
    auto draws = oracle::truncated_series_draws(sp.eigs, 2000, sp.sum_all - top, 200000, 3);
    std::sort(draws.begin(), draws.end());
    EXPECT_NEAR(ev.cdf(empirical_quantile(draws, 0.5)), 0.5, 0.003);
}

TEST(ImhofEvaluator, ToleranceRange) {
    EXPECT_THROW(ImhofEvaluator({{1.0, 1}}, 0.0, 0.0, 0.0), InputError);
    EXPECT_THROW(ImhofEvaluator({{1.0, 1}}, 0.0, 0.0, 1e-2), InputError);
}

TEST(AdjustQuantile, Examples) {
    EXPECT_DOUBLE_EQ(adjust_quantile(3.0, 1.0, 2.0, 2.0), 3.0);
    EXPECT_DOUBLE_EQ(adjust_quantile(1.0, 1.0, 5.0, 2.0), 1.0);
    EXPECT_DOUBLE_EQ(adjust_quantile(0.5 + 2.0, 0.5, 1.0, 4.0), 1.5);
}
