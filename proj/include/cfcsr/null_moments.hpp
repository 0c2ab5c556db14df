#pragma once

namespace cfcsr {

// 1D moments of the Cauchy kernel e^{-rho|x-y|} under independent uniforms.
//   alpha = E xi(x-y)             = 2(e^{-rho}+rho-1)/rho^2
//   m2    = E xi(x-y)^2           = alpha(2 rho)
//   m3    = E xi(x-y) xi(x-z)     = (-e^{-2rho}+2e^{-rho}(rho+4)+4rho-7)/rho^3
// The *_deficit variants return 1 - value, accurate for small rho.
double cauchy_alpha(double rho);
double cauchy_alpha_deficit(double rho);
double cauchy_m2(double rho);
double cauchy_m2_deficit(double rho);
double cauchy_m3(double rho);
double cauchy_m3_deficit(double rho);

struct NullMoments {
    double mean = 0.0;
    double variance = 0.0;
    long n = 0;
    double rho = 0.0;
    int dim = 0;
};

double null_mean(double rho, int dim);
double null_variance(double rho, int dim, long n);
// n -> infinity limit of null_variance (coefficients 2, 2, -4).
double null_variance_limit(double rho, int dim);
NullMoments null_moments(double rho, int dim, long n);

}  // namespace cfcsr
