#include "cfcsr/inference.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <mutex>
#include <sstream>

#include "cfcsr/errors.hpp"
#include "cfcsr/null_moments.hpp"
#include "cfcsr/simulate.hpp"

namespace cfcsr {

const char* to_string(Tail tail) {
    switch (tail) {
        case Tail::two_sided: return "two_sided";
        case Tail::upper: return "upper";
        case Tail::lower: return "lower";
    }
    return "?";
}

const char* to_string(NullMethod method) {
    switch (method) {
        case NullMethod::automatic: return "automatic";
        case NullMethod::imhof: return "imhof";
        case NullMethod::high_rho: return "high_rho";
        case NullMethod::monte_carlo: return "monte_carlo";
    }
    return "?";
}

Tail tail_from_string(const std::string& name) {
    if (name == "two" || name == "two_sided") return Tail::two_sided;
    if (name == "upper") return Tail::upper;
    if (name == "lower") return Tail::lower;
    throw InputError("unknown tail '" + name + "'");
}

NullMethod method_from_string(const std::string& name) {
    if (name == "auto" || name == "automatic") return NullMethod::automatic;
    if (name == "imhof") return NullMethod::imhof;
    if (name == "high_rho") return NullMethod::high_rho;
    if (name == "monte_carlo" || name == "mc") return NullMethod::monte_carlo;
    throw InputError("unknown null method '" + name + "'");
}

NullMethod select_method(double rho, long n, int dim) {
    const double boundary = std::acos(-1.0) * std::pow(static_cast<double>(n), 1.0 / dim);
    return rho > boundary ? NullMethod::high_rho : NullMethod::imhof;
}

std::shared_ptr<const ImhofEvaluator> imhof_for(double rho, int dim) {
    static std::mutex mutex;
    static std::list<std::pair<std::pair<double, int>, std::shared_ptr<const ImhofEvaluator>>> cache;
    constexpr std::size_t kEntries = 4;
    const auto key = std::make_pair(rho, dim);
    {
        std::lock_guard<std::mutex> lock(mutex);
        for (auto it = cache.begin(); it != cache.end(); ++it) {
            if (it->first == key) {
                cache.splice(cache.begin(), cache, it);
                return it->second;
            }
        }
    }
    auto ev = std::make_shared<const ImhofEvaluator>(build_spectrum(rho, dim));
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace_front(key, ev);
    if (cache.size() > kEntries) cache.pop_back();
    return ev;
}

NullDistribution::NullDistribution(double rho, long n, int dim, const TestOptions& options)
    : rho_(rho), n_(n), dim_(dim), method_(options.method), mean_(null_mean(rho, dim)) {
    if (n < 2) throw InputError("the null distribution needs n >= 2");
    if (method_ == NullMethod::automatic) method_ = select_method(rho, n, dim);
    const double exact_var = null_variance(rho, dim, n);

    if (method_ == NullMethod::high_rho) {
        cumulants_ = CumulantModel::make(n, rho, dim);
        const double worst = k0_max_real(*cumulants_, high_rho_limit(*cumulants_));
        if (worst > 1e-12) {
            std::ostringstream os;
            os << "exp(K0) exceeds modulus 1 (max Re K0 = " << worst << ") at rho=" << rho << ", n=" << n
               << "; using the Imhof null instead";
            warnings_.push_back(os.str());
            cumulants_.reset();
            method_ = NullMethod::imhof;
        } else if (options.adjust_variance) {
            scale_ = std::sqrt(cumulants_->kappa2() / exact_var);
        }
    }
    if (method_ == NullMethod::imhof) {
        imhof_ = imhof_for(rho, dim);
        if (options.adjust_variance) scale_ = std::sqrt(null_variance_limit(rho, dim) / exact_var);
    }
    if (method_ == NullMethod::monte_carlo) {
        if (options.reps < 1) throw InputError("Monte Carlo calibration needs reps >= 1");
        sample_ = mc_null_sample([rho](const PointPattern& p) { return cf_statistic_serial(p, rho); }, n, dim,
                                 options.reps, options.seed);
        std::sort(sample_.begin(), sample_.end());
    }
}

double NullDistribution::cdf(double x) const {
    switch (method_) {
        case NullMethod::imhof: return imhof_->cdf(to_asymptotic(x));
        case NullMethod::high_rho: return high_rho_cdf(to_asymptotic(x), *cumulants_);
        default: {
            const auto it = std::upper_bound(sample_.begin(), sample_.end(), x);
            return static_cast<double>(it - sample_.begin()) / static_cast<double>(sample_.size());
        }
    }
}

double NullDistribution::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw InputError("probability must lie in (0,1)");
    double q;
    switch (method_) {
        case NullMethod::imhof: q = imhof_->quantile(p); break;
        case NullMethod::high_rho: q = high_rho_quantile(p, *cumulants_, false); break;
        default: return empirical_quantile(sample_, p);
    }
    return mean_ + (q - mean_) / scale_;
}

double NullDistribution::p_value(double delta, Tail tail) const {
    double lower, upper;
    if (method_ == NullMethod::monte_carlo) {
        const double m = static_cast<double>(sample_.size());
        const auto ge = sample_.end() - std::lower_bound(sample_.begin(), sample_.end(), delta);
        const auto le = std::upper_bound(sample_.begin(), sample_.end(), delta) - sample_.begin();
        upper = (1.0 + static_cast<double>(ge)) / (m + 1.0);
        lower = (1.0 + static_cast<double>(le)) / (m + 1.0);
    } else {
        lower = cdf(delta);
        upper = 1.0 - lower;
    }
    switch (tail) {
        case Tail::upper: return std::clamp(upper, 0.0, 1.0);
        case Tail::lower: return std::clamp(lower, 0.0, 1.0);
        default: return std::clamp(2.0 * std::min(lower, upper), 0.0, 1.0);
    }
}

TestReport cf_test(const PointPattern& pattern, Resolution rho, Tail tail, const TestOptions& options) {
    require_unit_pattern(pattern, "cf_test");
    const long n = static_cast<long>(pattern.size());
    TestReport r;
    r.statistic = cf_statistic(pattern, rho);
    r.tail = tail;
    r.n = n;
    r.dim = pattern.dim();
    r.rho = {rho.rho};
    r.statistics = {r.statistic};
    try {
        NullDistribution null(rho.rho, n, pattern.dim(), options);
        r.p_value = null.p_value(r.statistic, tail);
        r.method = null.method();
        r.warnings = null.warnings();
    } catch (const NumericError& e) {
        std::ostringstream os;
        os << "null distribution at rho=" << rho.rho << ", n=" << n << ", D=" << pattern.dim() << ": " << e.what();
        throw NumericError(os.str(), e.achieved_error());
    }
    r.p_values = {r.p_value};
    r.methods = {r.method};
    if (r.method == NullMethod::monte_carlo) {
        r.seed = options.seed;
        r.reps = options.reps;
    }
    return r;
}

std::vector<double> default_rhos(long n, int dim) {
    const double top = 2.0 * std::acos(-1.0) * std::pow(static_cast<double>(n), 1.0 / dim);
    return {1.0, std::sqrt(top), top};
}

double bonferroni(const std::vector<double>& p_values) {
    if (p_values.empty()) throw InputError("no p-values to combine");
    const double m = static_cast<double>(p_values.size());
    return std::min(m * *std::min_element(p_values.begin(), p_values.end()), 1.0);
}

TestReport omnibus_test(const PointPattern& pattern, std::vector<double> rhos, const TestOptions& options) {
    require_unit_pattern(pattern, "omnibus_test");
    if (rhos.empty()) rhos = default_rhos(static_cast<long>(pattern.size()), pattern.dim());
    for (std::size_t i = 0; i < rhos.size(); ++i)
        for (std::size_t j = i + 1; j < rhos.size(); ++j)
            if (rhos[i] == rhos[j]) throw InputError("omnibus resolutions must be distinct");
    TestReport r;
    r.tail = Tail::two_sided;
    r.n = static_cast<long>(pattern.size());
    r.dim = pattern.dim();
    r.rho = rhos;
    for (double rho : rhos) {
        auto single = cf_test(pattern, rho, Tail::two_sided, options);
        r.p_values.push_back(single.p_value);
        r.methods.push_back(single.method);
        r.statistics.push_back(single.statistic);
        r.warnings.insert(r.warnings.end(), single.warnings.begin(), single.warnings.end());
    }
    const auto best = std::min_element(r.p_values.begin(), r.p_values.end()) - r.p_values.begin();
    r.p_value = bonferroni(r.p_values);
    r.contributing_rho = rhos[best];
    r.statistic = r.statistics[best];
    r.method = r.methods[best];
    if (options.method == NullMethod::monte_carlo) {
        r.seed = options.seed;
        r.reps = options.reps;
    }
    return r;
}

std::vector<double> default_envelope_grid(long n, int points) {
    if (points < 2) throw InputError("envelope grid needs at least two points");
    const double top = 2.0 * std::acos(-1.0) * std::sqrt(static_cast<double>(n));
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = std::exp(std::log(top) * i / (points - 1));
    return grid;
}

EnvelopeCurve envelope(const PointPattern& pattern, std::vector<double> rho_grid, const TestOptions& options) {
    require_unit_pattern(pattern, "envelope");
    const long n = static_cast<long>(pattern.size());
    if (rho_grid.empty()) rho_grid = default_envelope_grid(n);
    for (std::size_t i = 1; i < rho_grid.size(); ++i)
        if (!(rho_grid[i] > rho_grid[i - 1])) throw InputError("envelope grid must be increasing");
    const std::size_t m = rho_grid.size();
    EnvelopeCurve c;
    c.rho_grid = rho_grid;
    c.delta = CfDistanceCache(pattern).statistic(rho_grid);
    c.null_mean.resize(m);
    c.band_95.resize(m);
    c.band_99.resize(m);
    c.method.resize(m);
    std::string failure;
    const long mm = static_cast<long>(m);
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < mm; ++i) {
        try {
            NullDistribution null(rho_grid[i], n, pattern.dim(), options);
            c.null_mean[i] = null.mean();
            c.band_95[i] = {null.quantile(0.025), null.quantile(0.975)};
            c.band_99[i] = {null.quantile(0.005), null.quantile(0.995)};
            c.method[i] = null.method();
        } catch (const std::exception& e) {
#pragma omp critical
            failure = e.what();
        }
    }
    if (!failure.empty()) throw NumericError("envelope: " + failure);
    return c;
}

}  // namespace cfcsr
