#include "cfcsr/imhof.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <string>

#include "cfcsr/errors.hpp"
#include "quadrature.hpp"

namespace cfcsr {

namespace {

constexpr std::size_t kStride = 256;
constexpr double kSmallArg = 0.25;    // lambda u below this goes to the power-sum suffix
constexpr double kArctanStep = 1e-3;  // largest argument step for the linearized arctan
constexpr std::size_t kCacheLimit = 1 << 20;

}  // namespace

ImhofEvaluator::ImhofEvaluator(const NullSpectrum& spectrum, double abs_tol)
    : eigs_(spectrum.eigs),
      tail_sum_(std::max(spectrum.sum_all - spectrum.sum_trunc, 0.0)),
      tail_sq_sum_(std::max(spectrum.sum_sq_all - spectrum.sum_sq_trunc, 0.0)),
      abs_tol_(abs_tol) {
    init();
}

ImhofEvaluator::ImhofEvaluator(std::vector<Eigenvalue> eigs, double tail_sum, double tail_sq_sum, double abs_tol)
    : eigs_(std::move(eigs)), tail_sum_(tail_sum), tail_sq_sum_(tail_sq_sum), abs_tol_(abs_tol) {
    init();
}

void ImhofEvaluator::init() {
    if (!(abs_tol_ > 0.0 && abs_tol_ <= 1e-3)) throw InputError("abs_tol must lie in (0, 1e-3]");
    if (tail_sum_ < 0.0 || tail_sq_sum_ < 0.0) throw InputError("tail sums must be non-negative");
    if (eigs_.empty() && tail_sum_ == 0.0) throw InputError("empty spectrum");
    values_.reserve(eigs_.size());
    for (std::size_t i = 0; i < eigs_.size(); ++i) {
        const auto& e = eigs_[i];
        if (!(e.value > 0.0) || e.multiplicity < 1) throw InputError("eigenvalues must be positive with multiplicity >= 1");
        if (i > 0 && !(e.value < eigs_[i - 1].value)) throw InputError("eigenvalues must be strictly decreasing");
        values_.push_back(e.value);
    }
    const std::size_t n_cp = eigs_.size() / kStride + 1;
    checkpoints_.assign(n_cp, PowerSums{});
    PowerSums run{};
    for (std::size_t i = eigs_.size(); i-- > 0;) {
        const double l = eigs_[i].value;
        const double m = static_cast<double>(eigs_[i].multiplicity);
        double p = m * l;
        for (int k = 0; k < kPowers; ++k) {
            run[k] += p;
            p *= l;
        }
        if (i % kStride == 0) checkpoints_[i / kStride] = run;
    }
    sum_ = run[0] + tail_sum_;
    sum_sq_ = run[1] + tail_sq_sum_;
    cache_ = std::make_shared<NodeCache>();
    limit_ = find_upper_limit(&limit_reached_);
}

ThetaEta ImhofEvaluator::theta_eta(double u, std::size_t* exact_arctans) const {
    ThetaEta r;
    if (exact_arctans) *exact_arctans = 0;
    if (!(u > 0.0)) return r;
    const auto split_it = std::lower_bound(values_.begin(), values_.end(), kSmallArg / u, std::greater<double>());
    const std::size_t split = static_cast<std::size_t>(split_it - values_.begin());

    double theta = 0.0, log_prod = 0.0, prod = 1.0, slope = 0.0;
    double base_x = -1.0, base_atan = 0.0, base_slope = 0.0;
    for (std::size_t j = 0; j < split; ++j) {
        const double x = values_[j] * u;
        const double m = static_cast<double>(eigs_[j].multiplicity);
        double a;
        if (base_x >= 0.0 && base_x - x < kArctanStep) {
            a = base_atan + (x - base_x) * base_slope;
        } else {
            a = std::atan(x);
            base_x = x;
            base_atan = a;
            base_slope = 1.0 / (1.0 + x * x);
            if (exact_arctans) ++*exact_arctans;
        }
        theta += m * a;
        const double f = 1.0 + x * x;
        slope += m * x * x / f;
        prod *= eigs_[j].multiplicity == 1 ? f : std::pow(f, m);
        if (prod > 1e200) {
            log_prod += std::log(prod);
            prod = 1.0;
        }
    }
    log_prod += std::log(prod);

    // arctan and log(1 + x^2) by their power series below kSmallArg
    PowerSums ps{};
    const std::size_t next_cp = (split + kStride - 1) / kStride;
    const std::size_t stop = std::min(next_cp * kStride, eigs_.size());
    for (std::size_t j = split; j < stop; ++j) {
        const double l = values_[j];
        double p = static_cast<double>(eigs_[j].multiplicity) * l;
        for (int k = 0; k < kPowers; ++k) {
            ps[k] += p;
            p *= l;
        }
    }
    if (stop < eigs_.size())
        for (int k = 0; k < kPowers; ++k) ps[k] += checkpoints_[next_cp][k];
    const double u2 = u * u;
    double up = u, sign = 1.0;
    for (int k = 0; k + 1 < kPowers; k += 2) {
        // ps[k] holds sum m lambda^(k+1)
        const int odd = k + 1, even = k + 2;
        theta += sign * up * ps[k] / odd;
        up *= u;
        log_prod += sign * up * ps[k + 1] / (even / 2);
        slope += sign * up * ps[k + 1];
        up *= u;
        sign = -sign;
    }

    r.theta = 0.5 * theta + 0.5 * u * tail_sum_;
    r.eta = 0.25 * log_prod + 0.25 * u2 * tail_sq_sum_;
    r.log_slope = 0.5 * (slope + u2 * tail_sq_sum_);
    return r;
}

double ImhofEvaluator::upper_limit(bool* reached) const {
    if (reached) *reached = limit_reached_;
    return limit_;
}

ThetaEta ImhofEvaluator::cached_theta_eta(double u) const {
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->values.find(u);
        if (it != cache_->values.end()) return it->second;
    }
    const ThetaEta te = theta_eta(u);
    std::lock_guard<std::mutex> lock(cache_->mutex);
    if (cache_->values.size() < kCacheLimit) cache_->values.emplace(u, te);
    return te;
}

double ImhofEvaluator::find_upper_limit(bool* reached) const {
    const double pi = boost::math::constants::pi<double>();
    auto dropped = [&](double u) {
        const auto te = theta_eta(u);
        return std::exp(-te.eta) / (pi * te.log_slope);
    };
    const double target = 0.1 * abs_tol_;
    const double start = 1.0 / std::sqrt(2.0 * sum_sq_);
    double u = start;
    int doublings = 0;
    while (dropped(u) > target) {
        if (++doublings > 10) {
            if (reached) *reached = false;
            return u;
        }
        u *= 2.0;
    }
    if (reached) *reached = true;
    if (doublings == 0) return u;
    double lo = 0.5 * u;
    for (int i = 0; i < 30 && u - lo > 1e-3 * u; ++i) {
        const double mid = 0.5 * (lo + u);
        if (dropped(mid) > target) lo = mid;
        else u = mid;
    }
    return u;
}

double ImhofEvaluator::cdf(double x) const {
    // every eigenvalue is positive
    if (x <= 0.0) return 0.0;
    const double pi = boost::math::constants::pi<double>();
    bool reached = true;
    const double U = upper_limit(&reached);
    auto integrand = [&](double u) {
        const auto te = cached_theta_eta(u);
        return std::sin(te.theta - 0.5 * x * u) / u * std::exp(-te.eta);
    };
    // panels fixed by the spectrum alone, so nodes repeat across x
    const double width = std::min(U / 8.0, 2.0 * pi / sum_);
    const std::size_t panels = std::min<std::size_t>(4096, static_cast<std::size_t>(std::ceil(U / width)));
    const double h = U / static_cast<double>(panels);
    double total = 0.0, error = 0.0;
    for (std::size_t k = 0; k < panels; ++k) {
        double e = 0.0;
        total += detail::gk_integrate(integrand, k * h, (k + 1) * h, 1e-10, 15, &e);
        error += e;
    }
    if (!reached) {
        // sin(theta - w u) = sin(theta) cos(w u) - cos(theta) sin(w u), u = U + s
        const double w = 0.5 * x;
        auto amp_sin = [&](double s) {
            const auto te = theta_eta(U + s);
            return std::sin(te.theta) * std::exp(-te.eta) / (U + s);
        };
        auto amp_cos = [&](double s) {
            const auto te = theta_eta(U + s);
            return std::cos(te.theta) * std::exp(-te.eta) / (U + s);
        };
        boost::math::quadrature::ooura_fourier_cos<double> fcos;
        boost::math::quadrature::ooura_fourier_sin<double> fsin;
        const auto [ca, eca] = fcos.integrate(amp_sin, w);
        const auto [sa, esa] = fsin.integrate(amp_sin, w);
        const auto [cb, ecb] = fcos.integrate(amp_cos, w);
        const auto [sb, esb] = fsin.integrate(amp_cos, w);
        const double cw = std::cos(w * U), sw = std::sin(w * U);
        total += cw * ca - sw * sa - sw * cb - cw * sb;
        error += eca * std::fabs(ca) + esa * std::fabs(sa) + ecb * std::fabs(cb) + esb * std::fabs(sb);
    }
    if (error / pi > abs_tol_)
        throw NumericError("Imhof quadrature reached only " + std::to_string(error / pi), error / pi);
    return std::clamp(0.5 - total / pi, 0.0, 1.0);
}

double ImhofEvaluator::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw InputError("probability must lie in (0,1)");
    const double mean = sum_;
    const double var = 2.0 * sum_sq_;
    const double s2 = std::log1p(var / (mean * mean));
    const double z = boost::math::quantile(boost::math::normal_distribution<double>(), p);
    const double guess = std::exp(std::log(mean) - 0.5 * s2 + std::sqrt(s2) * z);
    auto f = [&](double q) { return cdf(q) - p; };
    auto tol = [](double a, double b) { return std::fabs(b - a) <= 1e-10 * std::max(std::fabs(a), std::fabs(b)); };
    boost::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::bracket_and_solve_root(f, guess, 1.5, true, tol, iters);
    const double q = 0.5 * (a + b);
    const double miss = std::fabs(cdf(q) - p);
    if (miss > 2.0 * abs_tol_ + 1e-12)
        throw NumericError("Imhof quantile missed the target probability by " + std::to_string(miss), miss);
    return q;
}

double imhof_cdf(double x, const ImhofEvaluator& evaluator) { return evaluator.cdf(x); }
double imhof_quantile(double p, const ImhofEvaluator& evaluator) { return evaluator.quantile(p); }

double adjust_quantile(double q, double exact_mean, double exact_var, double asym_var) {
    if (!(asym_var > 0.0)) throw InputError("asymptotic variance must be positive");
    if (exact_var < 0.0) throw InputError("variance must be non-negative");
    return (q - exact_mean) * std::sqrt(exact_var / asym_var) + exact_mean;
}

}  // namespace cfcsr
