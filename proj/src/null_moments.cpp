#include "cfcsr/null_moments.hpp"

#include <cmath>
#include <string>

#include "cfcsr/errors.hpp"

namespace cfcsr {

namespace {

constexpr double kSeriesBelow = 1.0;

void check_rho(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InputError("rho must be positive and finite");
}

// 1 - alpha = -2 sum_{k>=1} (-rho)^k/(k+2)!
double alpha_deficit_series(double rho) {
    double term = 1.0;  // 2/2!
    double sum = 0.0;
    for (int k = 1; k < 40; ++k) {
        term *= -rho / (k + 2);
        sum -= term;
        if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return sum;
}

// m3 = sum_{k>=3} c_k rho^{k-3},  c_k = -(-2)^k/k! + 2(-1)^{k-1}/(k-1)! + 8(-1)^k/k!
double m3_deficit_series(double rho) {
    double sum = 0.0;
    double inv_fact = 1.0 / 6.0;  // 1/k!
    double p = 1.0;
    for (int k = 4; k < 60; ++k) {
        inv_fact /= k;
        p *= rho;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        const double ck = -std::pow(-2.0, k) * inv_fact - 2.0 * sign * k * inv_fact + 8.0 * sign * inv_fact;
        const double term = ck * p;
        sum -= term;
        if (std::fabs(term) < 1e-18 * std::fabs(sum) && k > 8) break;
    }
    return sum;
}

// 1 - (1-dev)^power without cancellation.
double power_deficit(double dev, double power) {
    return -std::expm1(power * std::log1p(-dev));
}

}  // namespace

double cauchy_alpha_deficit(double rho) {
    check_rho(rho);
    if (rho < kSeriesBelow) return alpha_deficit_series(rho);
    return 1.0 - cauchy_alpha(rho);
}

double cauchy_alpha(double rho) {
    check_rho(rho);
    if (rho < kSeriesBelow) return 1.0 - alpha_deficit_series(rho);
    return 2.0 * (std::exp(-rho) + rho - 1.0) / (rho * rho);
}

double cauchy_m2(double rho) { return cauchy_alpha(2.0 * rho); }
double cauchy_m2_deficit(double rho) { return cauchy_alpha_deficit(2.0 * rho); }

double cauchy_m3_deficit(double rho) {
    check_rho(rho);
    if (rho < kSeriesBelow) return m3_deficit_series(rho);
    return 1.0 - cauchy_m3(rho);
}

double cauchy_m3(double rho) {
    check_rho(rho);
    if (rho < kSeriesBelow) return 1.0 - m3_deficit_series(rho);
    const double e1 = std::exp(-rho);
    return (-e1 * e1 + 2.0 * e1 * (rho + 4.0) + 4.0 * rho - 7.0) / (rho * rho * rho);
}

double null_mean(double rho, int dim) {
    if (dim < 1) throw InputError("dimension must be >= 1");
    return power_deficit(cauchy_alpha_deficit(rho), dim);
}

namespace {

struct Deficits {
    double a2, m2, m3;
};

// 1 - alpha^{2D}, 1 - m2^D, 1 - m3^D
Deficits deficits(double rho, int dim) {
    return {power_deficit(cauchy_alpha_deficit(rho), 2.0 * dim),
            power_deficit(cauchy_m2_deficit(rho), dim),
            power_deficit(cauchy_m3_deficit(rho), dim)};
}

}  // namespace

double null_variance(double rho, int dim, long n) {
    if (n < 2) throw InputError("null variance requires n >= 2, got " + std::to_string(n));
    if (dim < 1) throw InputError("dimension must be >= 1");
    const auto d = deficits(rho, dim);
    const double nn = static_cast<double>(n);
    // coefficients sum to zero, so only the deficits survive
    return -((2.0 * nn - 6.0) * d.a2 + (2.0 * nn - 2.0) * d.m2 - (4.0 * nn - 8.0) * d.m3) / nn;
}

double null_variance_limit(double rho, int dim) {
    if (dim < 1) throw InputError("dimension must be >= 1");
    const auto d = deficits(rho, dim);
    return -(2.0 * d.a2 + 2.0 * d.m2 - 4.0 * d.m3);
}

NullMoments null_moments(double rho, int dim, long n) {
    return {null_mean(rho, dim), null_variance(rho, dim, n), n, rho, dim};
}

}  // namespace cfcsr
