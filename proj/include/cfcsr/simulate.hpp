#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cfcsr/patterns.hpp"

namespace cfcsr {

// One engine per (seed, stream); replicate i always draws from stream i, so
// results do not depend on thread count or scheduling.
using Rng = std::mt19937_64;
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

enum class SimKind { csr, matern, ssi, inhom_poisson };

struct SimSpec {
    SimKind kind = SimKind::csr;
    long n = 0;
    int dim = 2;
    double r = 0.0, mu = 0.0, kappa = 0.0;  // matern
    double delta = 0.0;                     // ssi
    double theta1 = 1.0, theta2 = 1.0;      // inhom_poisson
    std::uint64_t seed = 0;

    void validate() const;
    std::string describe() const;
};

const char* to_string(SimKind kind);
SimKind sim_kind_from_string(const std::string& name);

// Matern triple used for cluster radius r in {0.075, 0.15, 0.30}:
// mu = n^{1/4}, n^{1/3}, n^{1/2} and kappa = n / mu.
SimSpec matern_study_spec(long n, double r);

PointPattern sim_csr(long n, int dim, Rng& rng);
// Poisson(kappa) parents on [0,1]^2, Poisson(mu) offspring uniform in the
// radius-r disk of each; offspring outside the square are dropped and the
// whole pattern is redrawn until exactly n remain (at most 10^6 tries).
PointPattern sim_matern(long n, double mu, double kappa, double r, Rng& rng);
// Sequential uniform proposals, rejected within delta of an accepted point.
PointPattern sim_ssi(long n, double delta, Rng& rng);
// Rejection sampling from intensity {t1 - (t1-1)x1}{t2 - (t2-1)x2}.
PointPattern sim_inhom(long n, double theta1, double theta2, Rng& rng);

PointPattern simulate(const SimSpec& spec, std::uint64_t stream = 0);

using PatternStatistic = std::function<double(const PointPattern&)>;

// Statistic over `reps` CSR patterns; replicate i uses stream i. The
// statistic must be safe to call concurrently.
std::vector<double> mc_null_sample(const PatternStatistic& stat, long n, int dim, long reps, std::uint64_t seed);

// Type-7 empirical quantile of a sorted sample.
double empirical_quantile(const std::vector<double>& sorted, double p);

struct CriticalValues {
    double lower = 0.0;
    double upper = 0.0;
};
// alpha/2 and 1 - alpha/2 empirical quantiles under CSR; reps >= 1000.
CriticalValues mc_critical_values(const PatternStatistic& stat, long n, int dim, double alpha, long reps,
                                  std::uint64_t seed);

}  // namespace cfcsr
