#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "cfcsr/spectrum.hpp"

namespace cfcsr {

struct ThetaEta {
    double theta = 0.0;
    double eta = 0.0;
    double log_slope = 0.0;  // u d(eta)/du, nondecreasing in u
};

// Distribution of sum_j lambda_j Z_j^2 from a decreasing eigenvalue list plus
// the mass of the omitted tail (sum lambda and sum lambda^2 beyond the list).
class ImhofEvaluator {
public:
    explicit ImhofEvaluator(const NullSpectrum& spectrum, double abs_tol = 1e-6);
    ImhofEvaluator(std::vector<Eigenvalue> eigs, double tail_sum, double tail_sq_sum, double abs_tol = 1e-6);

    // exact_arctans, when given, receives the number of arctan calls made
    ThetaEta theta_eta(double u, std::size_t* exact_arctans = nullptr) const;
    double cdf(double x) const;
    // Bracket-and-solve from a log-normal guess.
    double quantile(double p) const;

    double mean() const noexcept { return sum_; }
    double variance() const noexcept { return 2.0 * sum_sq_; }
    double abs_tol() const noexcept { return abs_tol_; }
    const std::vector<Eigenvalue>& eigs() const noexcept { return eigs_; }

    // Truncation point of the Imhof integral: the dropped part is bounded by
    // exp(-eta(U))/(pi u eta'(U)), which is pushed below abs_tol/10. Sets
    // *reached to false when the spectrum decays too slowly for that within
    // 2^10 doublings; cdf() then adds a Fourier-type tail.
    double upper_limit(bool* reached = nullptr) const;

private:
    static constexpr int kPowers = 26;
    using PowerSums = std::array<double, kPowers>;
    struct NodeCache {
        std::mutex mutex;
        std::unordered_map<double, ThetaEta> values;
    };

    void init();
    double find_upper_limit(bool* reached) const;
    // theta_eta memoized per node; the integrand's nodes recur across x
    ThetaEta cached_theta_eta(double u) const;

    std::vector<Eigenvalue> eigs_;
    std::vector<double> values_;  // eigs_[i].value, for binary search
    double tail_sum_, tail_sq_sum_;
    double sum_ = 0.0, sum_sq_ = 0.0;
    double abs_tol_;
    // sums of m lambda^p, p = 1..kPowers, from every kStride-th index to the end
    std::vector<PowerSums> checkpoints_;
    double limit_ = 0.0;
    bool limit_reached_ = true;
    std::shared_ptr<NodeCache> cache_;
};

double imhof_cdf(double x, const ImhofEvaluator& evaluator);
double imhof_quantile(double p, const ImhofEvaluator& evaluator);

// (q - mean) sqrt(exact_var/asym_var) + mean
double adjust_quantile(double q, double exact_mean, double exact_var, double asym_var);

}  // namespace cfcsr
