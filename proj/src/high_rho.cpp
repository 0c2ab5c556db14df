#include "cfcsr/high_rho.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <string>
#include <unordered_map>

#include "cfcsr/errors.hpp"
#include "cfcsr/imhof.hpp"
#include "cfcsr/null_moments.hpp"
#include "quadrature.hpp"

namespace cfcsr {

namespace {

void check_model(long n, double rho, int dim) {
    if (n < 2) throw InputError("cumulant model needs n >= 2");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InputError("rho must be positive and finite");
    if (dim < 1) throw InputError("dimension must be >= 1");
}

}  // namespace

CumulantModel CumulantModel::make(long n, double rho, int dim) {
    check_model(n, rho, dim);
    CumulantModel m;
    m.n = n;
    m.rho = rho;
    m.dim = dim;
    m.kappa1 = null_mean(rho, dim);
    return m;
}

double CumulantModel::kappa2() const { return cumulant(2, n, rho, dim); }

double cumulant(int m, long n, double rho, int dim) {
    if (m < 2) throw InputError("cumulant order must be >= 2; kappa1 is the exact null mean");
    check_model(n, rho, dim);
    const double nn = static_cast<double>(n);
    return (nn - 1.0) * std::pow(2.0 / nn, m - 1) * std::pow(2.0 / m, dim) * std::pow(rho, -dim);
}

std::complex<double> k0_series(double t, const CumulantModel& model) {
    check_model(model.n, model.rho, model.dim);
    const double nn = static_cast<double>(model.n);
    const double lead = (nn - 1.0) * std::pow(model.rho, -model.dim) * nn / 2.0;
    const double z = 2.0 * std::fabs(t) / nn;
    // c = z^m/m!, so kappa_m |t|^m/m! = lead c (2/m)^D
    double c = z;
    double re = 0.0, im = 0.0;
    const int last = model.max_order > 0 ? model.max_order : model.max_terms;
    for (int m = 2; m <= last; ++m) {
        c *= z / m;
        const double a = lead * c * std::pow(2.0 / m, model.dim);
        switch (m % 4) {
            case 0: re += a; break;
            case 1: im += a; break;
            case 2: re -= a; break;
            default: im -= a; break;
        }
        if (m == model.max_order || (m >= z && a < 1e-16 * (1.0 + std::hypot(re, im)))) {
            im += std::fabs(t) * model.kappa1;
            if (t < 0.0) im = -im;
            return {re, im};
        }
    }
    throw NumericError("K0 series did not converge at t = " + std::to_string(t));
}

namespace {

// T_k(y) = int_y^inf (ln v)^k e^{iv}/v dv
std::complex<double> fourier_tail(int k, double y) {
    static thread_local boost::math::quadrature::ooura_fourier_cos<double> fcos;
    static thread_local boost::math::quadrature::ooura_fourier_sin<double> fsin;
    auto f = [&](double s) { return std::pow(std::log(y + s), k) / (y + s); };
    const double c = fcos.integrate(f, 1.0).first;
    const double sn = fsin.integrate(f, 1.0).first;
    // e^{i(y+s)} = e^{iy}(cos s + i sin s)
    return std::polar(1.0, y) * std::complex<double>(c, sn);
}

// M_k(y) = int_0^y (ln v)^k (e^{iv} - 1)/v dv, y >= 1
std::complex<double> log_moment(int k, double y) {
    // int_0^1 (ln v)^k v^{j-1} dv = (-1)^k k!/j^{k+1}
    std::complex<double> head = 0.0, ij = 1.0;
    double fact = 1.0;
    for (int j = 1; j < 40; ++j) {
        ij *= std::complex<double>(0.0, 1.0);
        fact *= j;
        head += ij / (fact * std::pow(static_cast<double>(j), k + 1));
    }
    head *= (k % 2 ? -1.0 : 1.0) * std::tgamma(k + 1.0);
    const double ly = std::log(y);
    return head + fourier_tail(k, 1.0) - fourier_tail(k, y) - std::pow(ly, k + 1) / (k + 1.0);
}

constexpr double kSeriesLimit = 4.0;  // largest 2|t|/n summed as a power series

}  // namespace

std::complex<double> k0_eval(double t, const CumulantModel& model) {
    check_model(model.n, model.rho, model.dim);
    const double nn = static_cast<double>(model.n);
    if (model.max_order > 0) return k0_series(t, model);  // a finite polynomial
    const double y = 2.0 * std::fabs(t) / nn;
    if (y <= kSeriesLimit) return k0_series(t, model);
    // sum_m (iy)^m/(m! m^D) over m >= 2 through 1/m^D = int_0^1 p^{m-1} (-ln p)^{D-1}/Gamma(D) dp
    const int D = model.dim;
    const double ly = std::log(y);
    std::complex<double> J = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= D - 1; ++k) {
        if (k > 0) binom *= static_cast<double>(D - k) / k;
        J += binom * std::pow(ly, D - 1 - k) * (k % 2 ? -1.0 : 1.0) * log_moment(k, y);
    }
    const double lead = (nn - 1.0) * std::pow(model.rho, -D) * nn / 2.0 * std::pow(2.0, D);
    std::complex<double> k0 = lead * (J / std::tgamma(static_cast<double>(D)) - std::complex<double>(0.0, y));
    k0 += std::complex<double>(0.0, std::fabs(t) * model.kappa1);
    return t < 0.0 ? std::conj(k0) : k0;
}

double k0_max_real(const CumulantModel& model, double t_max, int points) {
    double worst = -INFINITY;
    for (int i = 1; i <= points; ++i) worst = std::max(worst, k0_eval(t_max * i / points, model).real());
    return worst;
}

double high_rho_limit(const CumulantModel& model) {
    const double target = std::log(1e-9);
    double t = 1.0 / std::sqrt(model.kappa2());
    for (int i = 0; i < 60; ++i, t *= 2.0)
        if (k0_eval(t, model).real() < target) return t;
    throw NumericError("exp(K0) does not decay");
}

namespace {

// K0 at quadrature nodes; the panel grid depends on the model only, so a
// quantile search revisits the same nodes for every x.
class K0Memo {
public:
    explicit K0Memo(const CumulantModel& model) : model_(model), limit_(high_rho_limit(model)) {}

    std::complex<double> operator()(double t) {
        auto it = values_.find(t);
        if (it != values_.end()) return it->second;
        const auto k = k0_eval(t, model_);
        values_.emplace(t, k);
        return k;
    }

    double cdf(double x) {
        const double pi = boost::math::constants::pi<double>();
        const double U = limit_;
        auto integrand = [&](double t) {
            const auto k = (*this)(t);
            return std::sin(k.imag() - t * x) / t * std::exp(k.real());
        };
        const double width = std::min(U / 8.0, pi / std::max(model_.kappa1, std::fabs(x)));
        const std::size_t panels = std::min<std::size_t>(4096, static_cast<std::size_t>(std::ceil(U / width)));
        const double h = U / static_cast<double>(panels);
        double total = 0.0, error = 0.0;
        for (std::size_t k = 0; k < panels; ++k) {
            double e = 0.0;
            total += detail::gk_integrate(integrand, k * h, (k + 1) * h, 1e-10, 15, &e);
            error += e;
        }
        if (error / pi > 1e-6)
            throw NumericError("Gil-Pelaez quadrature reached only " + std::to_string(error / pi), error / pi);
        return std::clamp(0.5 - total / pi, 0.0, 1.0);
    }

private:
    const CumulantModel& model_;
    double limit_;
    std::unordered_map<double, std::complex<double>> values_;
};

}  // namespace

double high_rho_cdf(double x, const CumulantModel& model) {
    K0Memo memo(model);
    return memo.cdf(x);
}

double high_rho_quantile(double p, const CumulantModel& model, bool adjust) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("probability must lie in (0,1)");
    const double mean = model.kappa1;
    const double var = model.kappa2();
    const double s2 = std::log1p(var / (mean * mean));
    const double z = boost::math::quantile(boost::math::normal_distribution<double>(), p);
    const double guess = std::exp(std::log(mean) - 0.5 * s2 + std::sqrt(s2) * z);
    K0Memo memo(model);
    auto f = [&](double q) { return memo.cdf(q) - p; };
    auto tol = [](double a, double b) { return std::fabs(b - a) <= 1e-10 * std::max(std::fabs(a), std::fabs(b)); };
    boost::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::bracket_and_solve_root(f, guess, 1.5, true, tol, iters);
    const double q = 0.5 * (a + b);
    if (!adjust) return q;
    return adjust_quantile(q, mean, null_variance(model.rho, model.dim, model.n), var);
}

}  // namespace cfcsr
