#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfcsr/high_rho.hpp"
#include "cfcsr/imhof.hpp"
#include "cfcsr/patterns.hpp"
#include "cfcsr/statistic.hpp"

namespace cfcsr {

enum class Tail { two_sided, upper, lower };
enum class NullMethod { automatic, imhof, high_rho, monte_carlo };

const char* to_string(Tail tail);
const char* to_string(NullMethod method);
Tail tail_from_string(const std::string& name);
NullMethod method_from_string(const std::string& name);

// high_rho when rho > pi n^{1/D}, imhof otherwise
NullMethod select_method(double rho, long n, int dim);

struct TestOptions {
    NullMethod method = NullMethod::automatic;
    long reps = 2000;  // monte_carlo only
    std::uint64_t seed = 1;
    // rescale the asymptotic null to the exact finite-n variance
    bool adjust_variance = true;
};

// Null distribution of Delta for one (rho, n, D).
class NullDistribution {
public:
    NullDistribution(double rho, long n, int dim, const TestOptions& options = {});

    NullMethod method() const noexcept { return method_; }
    double cdf(double x) const;
    double quantile(double p) const;
    double mean() const noexcept { return mean_; }
    // p-value of an observed statistic
    double p_value(double delta, Tail tail) const;
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    // x on the asymptotic scale matching the adjusted distribution
    double to_asymptotic(double x) const { return mean_ + (x - mean_) * scale_; }

    double rho_;
    long n_;
    int dim_;
    NullMethod method_;
    double mean_;
    double scale_ = 1.0;  // sqrt(asymptotic var / exact var), or 1
    std::shared_ptr<const ImhofEvaluator> imhof_;
    std::optional<CumulantModel> cumulants_;
    std::vector<double> sample_;  // sorted, monte_carlo only
    std::vector<std::string> warnings_;
};

// Imhof evaluator for (rho, D), shared through a small cache.
std::shared_ptr<const ImhofEvaluator> imhof_for(double rho, int dim);

struct TestReport {
    double statistic = 0.0;
    double p_value = 1.0;
    Tail tail = Tail::two_sided;
    NullMethod method = NullMethod::imhof;
    std::vector<double> rho;
    std::vector<double> p_values;      // one per rho
    std::vector<NullMethod> methods;   // one per rho
    std::vector<double> statistics;    // one per rho
    std::optional<double> contributing_rho;  // omnibus: rho with the smallest p
    long n = 0;
    int dim = 0;
    std::optional<std::uint64_t> seed;
    std::optional<long> reps;
    std::vector<std::string> warnings;
};

TestReport cf_test(const PointPattern& pattern, Resolution rho, Tail tail, const TestOptions& options = {});

// 1, (2 pi n^{1/D})^{1/2}, 2 pi n^{1/D}
std::vector<double> default_rhos(long n, int dim);
// min(m min p_i, 1) over two-sided tests at each rho
TestReport omnibus_test(const PointPattern& pattern, std::vector<double> rhos = {}, const TestOptions& options = {});
double bonferroni(const std::vector<double>& p_values);

struct EnvelopeCurve {
    std::vector<double> rho_grid;
    std::vector<double> delta;
    std::vector<double> null_mean;
    std::vector<std::pair<double, double>> band_95;
    std::vector<std::pair<double, double>> band_99;
    std::vector<NullMethod> method;
};

// 64 log-spaced values on [1, 2 pi n^{1/2}]
std::vector<double> default_envelope_grid(long n, int points = 64);
EnvelopeCurve envelope(const PointPattern& pattern, std::vector<double> rho_grid = {}, const TestOptions& options = {});

}  // namespace cfcsr
