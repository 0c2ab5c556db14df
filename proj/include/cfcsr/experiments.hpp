#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfcsr/inference.hpp"
#include "cfcsr/simulate.hpp"

namespace cfcsr {

// Type I error study under CSR in [0,1]^2.
struct Type1Config {
    std::vector<long> ns{25, 100};
    std::vector<double> rhos;  // empty: 1, pi n^{1/2}/2, pi n^{1/2}, 2 pi n^{1/2}
    int dim = 2;
    double alpha = 0.05;
    long reps = 5000;
    std::uint64_t seed = 20240101;
    TestOptions null;  // method and variance adjustment of the null
};

struct Type1Row {
    long n = 0;
    double rho = 0.0;
    Tail tail = Tail::two_sided;
    NullMethod method = NullMethod::imhof;
    double rejection_rate = 0.0;
    double mc_se = 0.0;
    long reps = 0;
};

std::vector<double> type1_rhos(long n);
// Two-sided rejects outside (q(alpha/2), q(1-alpha/2)); the lower and upper
// rows use one of those thresholds each, so their rates add up to the
// two-sided rate.
std::vector<Type1Row> type1_study(const Type1Config& config);

// Power study against Monte Carlo thresholds.
struct PowerConfig {
    std::vector<SimSpec> cells;  // empty: power_study_cells()
    std::vector<double> cf_rhos{1.0, 8.0, 30.0};
    std::vector<double> omnibus_rhos;   // empty: cf_rhos
    bool omnibus_default_rhos = false;  // use default_rhos(n) per cell instead
    double alpha = 0.05;
    long reps = 2000;
    long null_reps = 5000;
    std::uint64_t seed = 20240101;
};

// Matern r in {0.075, 0.15, 0.30}, SSI at the three inhibition distances and
// inhomogeneous Poisson at (1,4), (4,4), (4,10), for n = 25 and 75.
std::vector<SimSpec> power_study_cells(std::uint64_t seed = 20240101);

struct PowerRow {
    std::string test;
    double power = 0.0;
    double mc_se = 0.0;
};

struct PowerCell {
    SimSpec spec;
    std::string alternative;
    std::string params;
    bool failed = false;
    std::string error;
    std::vector<PowerRow> rows;
    // rejections[t][i]: test t rejected replicate i
    std::vector<std::vector<std::uint8_t>> rejections;

    const PowerRow& row(const std::string& test) const;
    std::size_t index(const std::string& test) const;
    // standard error of power(a) - power(b) from paired replicates
    double paired_se(const std::string& a, const std::string& b) const;
};

// Test names: cf_rho<value> per cf_rhos, omnibus, omega_bar, l_test, clark_evans.
// Two-sided thresholds throughout except the L-test, whose statistic is a
// supremum of absolute deviations and rejects in the upper tail.
std::vector<PowerCell> power_study(const PowerConfig& config);

std::string cf_test_name(double rho);

}  // namespace cfcsr
