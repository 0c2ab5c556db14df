#include <gtest/gtest.h>

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "cfcsr/errors.hpp"
#include "cfcsr/imhof.hpp"
#include "cfcsr/inference.hpp"
#include "cfcsr/null_moments.hpp"
#include "cfcsr/simulate.hpp"
#include "cfcsr/statistic.hpp"

using namespace cfcsr;

namespace {

double mean_statistic(const SimSpec& spec, double rho, long reps, double* se) {
    double s = 0.0, s2 = 0.0;
    for (long i = 0; i < reps; ++i) {
        const double d = cf_statistic_serial(simulate(spec, i), rho);
        s += d;
        s2 += d * d;
    }
    const double m = s / reps;
    *se = std::sqrt((s2 / reps - m * m) / reps);
    return m;
}

// two-sample Kolmogorov-Smirnov distance
double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST(Csr, DeterministicPerSeedAndStream) {
    SimSpec s{SimKind::csr, 50};
    s.seed = 9;
    EXPECT_EQ(simulate(s, 3), simulate(s, 3));
    EXPECT_NE(simulate(s, 3), simulate(s, 4));
    s.seed = 10;
    EXPECT_NE(simulate(s, 3), simulate(SimSpec{SimKind::csr, 50, 2, 0, 0, 0, 0, 1, 1, 9}, 3));
}

TEST(Csr, CoordinateMeans) {
    Rng rng = make_rng(1, 0);
    const auto p = sim_csr(100000, 2, rng);
    for (int d = 0; d < 2; ++d) {
        double m = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) m += p.coord(i, d);
        EXPECT_NEAR(m / p.size(), 0.5, 0.005);
    }
}

TEST(Csr, OmegaBarInsideNullBand) {
    // ω̄² has an n-free limiting null law; the band comes from n = 2000
    auto sample = mc_null_sample([](const PointPattern& p) { return omega_bar_squared(p); }, 2000, 2, 1000, 5);
    std::sort(sample.begin(), sample.end());
    Rng rng = make_rng(2, 0);
    const double w = omega_bar_squared(sim_csr(100000, 2, rng));
    EXPECT_GE(w, empirical_quantile(sample, 0.005));
    EXPECT_LE(w, empirical_quantile(sample, 0.995));
}

TEST(Matern, StudyTriple) {
    const auto s = matern_study_spec(75, 0.075);
    EXPECT_DOUBLE_EQ(s.r, 0.075);
    EXPECT_NEAR(s.mu, std::pow(75.0, 0.25), 1e-12);
    EXPECT_NEAR(s.kappa, std::pow(75.0, 0.75), 1e-12);
    EXPECT_NEAR(matern_study_spec(75, 0.30).mu, std::sqrt(75.0), 1e-12);
    EXPECT_THROW(matern_study_spec(75, 0.2), InputError);
}

TEST(Matern, ExactCountAndInWindow) {
    for (double r : {0.075, 0.15, 0.30}) {
        auto s = matern_study_spec(25, r);
        s.seed = 4;
        for (long i = 0; i < 50; ++i) {
            const auto p = simulate(s, i);
            EXPECT_EQ(p.size(), 25u);
            EXPECT_TRUE(p.in_unit_cube());
        }
    }
}

TEST(Matern, AggregationRaisesMean) {
    auto s = matern_study_spec(75, 0.15);
    s.seed = 6;
    double se;
    const double m = mean_statistic(s, 8.0, 2000, &se);
    EXPECT_GT(m - null_mean(8.0, 2), 3.0 * se);
}

TEST(Matern, ConditioningAgainstIndependentSampler) {
    // tiny process: kappa = 2 parents, mu = 1.5 offspring, conditioned on n = 3
    const long n = 3;
    const double mu = 1.5, kappa = 2.0, r = 0.2;
    std::vector<double> xs_impl, nn_impl, xs_ref, nn_ref;
    auto record = [](const std::vector<double>& c, std::vector<double>& xs, std::vector<double>& nn) {
        for (std::size_t i = 0; i < c.size() / 2; ++i) {
            xs.push_back(c[2 * i]);
            double best = 1e9;
            for (std::size_t j = 0; j < c.size() / 2; ++j)
                if (j != i) best = std::min(best, std::hypot(c[2 * i] - c[2 * j], c[2 * i + 1] - c[2 * j + 1]));
            nn.push_back(best);
        }
    };
    for (long i = 0; i < 20000; ++i) {
        Rng rng = make_rng(70, i);
        const auto p = sim_matern(n, mu, kappa, r, rng);
        record(std::vector<double>(p.coords().begin(), p.coords().end()), xs_impl, nn_impl);
    }
    // reference: offspring drawn by rejection from the bounding square of each disk
    std::mt19937_64 g(71);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    long kept = 0;
    while (kept < 20000) {
        std::poisson_distribution<long> parents(kappa), kids(mu);
        std::vector<double> c;
        const long np = parents(g);
        for (long k = 0; k < np; ++k) {
            const double px = U(g), py = U(g);
            const long m = kids(g);
            for (long j = 0; j < m; ++j) {
                double dx, dy;
                do {
                    dx = (2 * U(g) - 1) * r;
                    dy = (2 * U(g) - 1) * r;
                } while (dx * dx + dy * dy > r * r);
                const double x = px + dx, y = py + dy;
                if (x >= 0 && x <= 1 && y >= 0 && y <= 1) c.insert(c.end(), {x, y});
            }
        }
        if (static_cast<long>(c.size()) != 2 * n) continue;
        record(c, xs_ref, nn_ref);
        ++kept;
    }
    // 99.9% two-sample KS critical value for samples of 60000
    const double crit = 1.95 * std::sqrt(2.0 / 60000.0);
    EXPECT_LT(ks_distance(xs_impl, xs_ref), crit);
    EXPECT_LT(ks_distance(nn_impl, nn_ref), crit);
}

TEST(Ssi, MinimumDistanceAndStudySetting) {
    SimSpec s;
    s.kind = SimKind::ssi;
    s.n = 75;
    s.delta = 0.025;
    s.seed = 8;
    for (long i = 0; i < 20; ++i) {
        const auto p = simulate(s, i);
        ASSERT_EQ(p.size(), 75u);
        for (std::size_t a = 0; a < p.size(); ++a)
            for (std::size_t b = a + 1; b < p.size(); ++b)
                EXPECT_GE(std::hypot(p.coord(a, 0) - p.coord(b, 0), p.coord(a, 1) - p.coord(b, 1)), 0.025);
    }
}

TEST(Ssi, InfeasiblePacking) {
    Rng rng = make_rng(1, 1);
    try {
        sim_ssi(200, 0.2, rng);
        FAIL();
    } catch (const InfeasibleError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("200"), std::string::npos) << msg;
        EXPECT_NE(msg.find("0.2"), std::string::npos) << msg;
    }
}

TEST(Ssi, RegularityLowersMean) {
    SimSpec s;
    s.kind = SimKind::ssi;
    s.n = 75;
    s.delta = 0.025;
    s.seed = 12;
    double se;
    const double m = mean_statistic(s, 30.0, 2000, &se);
    EXPECT_GT(null_mean(30.0, 2) - m, 3.0 * se);
}

TEST(Inhom, ConstantIntensityIsUniform) {
    Rng rng = make_rng(13, 0);
    const auto p = sim_inhom(20000, 1.0, 1.0, rng);
    std::vector<double> xs, ref;
    for (std::size_t i = 0; i < p.size(); ++i) xs.push_back(p.coord(i, 1));
    for (int i = 0; i < 20000; ++i) ref.push_back((i + 0.5) / 20000);
    EXPECT_LT(ks_distance(xs, ref), 1.95 / std::sqrt(20000.0));
}

TEST(Inhom, MarginalMeans) {
    Rng rng = make_rng(14, 0);
    const auto p = sim_inhom(100000, 4.0, 10.0, rng);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        m1 += p.coord(i, 0);
        m2 += p.coord(i, 1);
    }
    EXPECT_NEAR(m2 / p.size(), 2.0 / 5.5, 0.01);
    EXPECT_NEAR(m1 / p.size(), 1.0 / 2.5, 0.01);
}

TEST(Inhom, StudySettings) {
    for (auto [a, b] : {std::pair{1.0, 4.0}, std::pair{4.0, 4.0}, std::pair{4.0, 10.0}}) {
        SimSpec s;
        s.kind = SimKind::inhom_poisson;
        s.n = 75;
        s.theta1 = a;
        s.theta2 = b;
        EXPECT_EQ(simulate(s).size(), 75u);
    }
}

TEST(SimSpec, Validation) {
    SimSpec s;
    s.kind = SimKind::matern;
    s.n = 10;
    EXPECT_THROW(s.validate(), InputError);
    s.kind = SimKind::inhom_poisson;
    s.theta1 = 0.5;
    EXPECT_THROW(s.validate(), InputError);
    s.kind = SimKind::csr;
    s.n = 0;
    EXPECT_THROW(s.validate(), InputError);
    EXPECT_EQ(sim_kind_from_string("ssi"), SimKind::ssi);
    EXPECT_THROW(sim_kind_from_string("thomas"), InputError);
}

TEST(McCriticalValues, QuartilesAtHalfAlpha) {
    auto stat = [](const PointPattern& p) { return p.coord(0, 0); };
    const auto cv = mc_critical_values(stat, 5, 2, 0.5, 1000, 3);
    auto sample = mc_null_sample(stat, 5, 2, 1000, 3);
    std::sort(sample.begin(), sample.end());
    EXPECT_DOUBLE_EQ(cv.lower, empirical_quantile(sample, 0.25));
    EXPECT_DOUBLE_EQ(cv.upper, empirical_quantile(sample, 0.75));
    EXPECT_THROW(mc_critical_values(stat, 5, 2, 0.05, 999, 3), InputError);
}

TEST(McCriticalValues, EmpiricalQuantileType7) {
    const std::vector<double> s{1.0, 2.0, 3.0, 4.0, 5.0};
    EXPECT_DOUBLE_EQ(empirical_quantile(s, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(empirical_quantile(s, 0.25), 2.0);
    EXPECT_DOUBLE_EQ(empirical_quantile(s, 0.1), 1.4);
    EXPECT_DOUBLE_EQ(empirical_quantile(s, 1.0), 5.0);
}

TEST(McCriticalValues, BracketImhof) {
    auto stat = [](const PointPattern& p) { return cf_statistic_serial(p, 1.0); };
    const auto cv = mc_critical_values(stat, 25, 2, 0.05, 20000, 21);
    const NullDistribution null(1.0, 25, 2);
    // Monte Carlo error of a 2.5% quantile from 20000 draws is about 0.4% of the quantile
    EXPECT_NEAR(cv.lower, null.quantile(0.025), 0.02 * cv.lower);
    EXPECT_NEAR(cv.upper, null.quantile(0.975), 0.03 * cv.upper);
}

TEST(McCriticalValues, StandardErrorScaling) {
    auto stat = [](const PointPattern& p) { return p.coord(0, 0) + p.coord(1, 1); };
    auto spread = [&](long reps) {
        double s = 0.0, s2 = 0.0;
        const int runs = 60;
        for (int k = 0; k < runs; ++k) {
            const double q = mc_critical_values(stat, 2, 2, 0.1, reps, 100 + k + reps).upper;
            s += q;
            s2 += q * q;
        }
        return std::sqrt(s2 / runs - (s / runs) * (s / runs));
    };
    const double ratio = spread(1000) / spread(2000);
    EXPECT_GT(ratio, 1.0);
    EXPECT_LT(ratio, 2.0);
}

TEST(McNullSample, ThreadCountIndependent) {
    auto stat = [](const PointPattern& p) { return cf_statistic_serial(p, 2.0); };
    const int before = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto a = mc_null_sample(stat, 20, 2, 300, 4);
    omp_set_num_threads(4);
    const auto b = mc_null_sample(stat, 20, 2, 300, 4);
    omp_set_num_threads(before);
    EXPECT_EQ(a, b);
}
