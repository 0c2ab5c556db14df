#pragma once

#include <complex>

namespace cfcsr {

// Large-rho cumulant model of Delta for fixed n.
struct CumulantModel {
    long n = 0;
    double rho = 0.0;
    int dim = 0;
    double kappa1 = 0.0;  // exact null mean
    int max_terms = 200;
    int max_order = 0;  // > 0 keeps cumulants up to this order only; 2 is the Gaussian

    static CumulantModel make(long n, double rho, int dim);
    double kappa2() const;
};

// kappa_m = (n-1) (2/n)^(m-1) (2/m)^D rho^-D, m >= 2.
double cumulant(int m, long n, double rho, int dim);

// K0(t) = i t kappa1 + sum_{m>=2} kappa_m (it)^m / m!. Summed directly while
// 2|t|/n <= 4; beyond that the series cancels badly and K0 comes from its
// integral form with Fourier-type tails.
std::complex<double> k0_eval(double t, const CumulantModel& model);
// The bare series, stopped when a term drops below 1e-16 (1 + |sum|);
// throws after max_terms.
std::complex<double> k0_series(double t, const CumulantModel& model);

// Gil-Pelaez inversion of exp(K0).
double high_rho_cdf(double x, const CumulantModel& model);
// Bracket-and-solve from a log-normal guess; with `adjust` the root is
// rescaled to the exact finite-n variance.
double high_rho_quantile(double p, const CumulantModel& model, bool adjust = true);

// Largest Re K0 over an even grid on [0, t_max]; positive values mean
// |exp(K0)| > 1 somewhere, so exp(K0) is not a characteristic function.
double k0_max_real(const CumulantModel& model, double t_max, int points = 512);
// Integration limit: first doubling point with exp(Re K0) < 1e-9.
double high_rho_limit(const CumulantModel& model);

}  // namespace cfcsr
