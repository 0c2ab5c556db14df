#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "cfcsr/patterns.hpp"

namespace cfcsr {

// Scale of the Cauchy weight. Implicit so plain doubles can be passed.
struct Resolution {
    double rho;
    Resolution(double value);  // NOLINT(google-explicit-constructor)
    operator double() const noexcept { return rho; }
};

// Closed-form CF statistic with the product Cauchy weight. Pairwise sums run
// over unordered pairs in an OpenMP loop.
double cf_statistic(const PointPattern& pattern, Resolution rho);
// Single-threaded reference with the same arithmetic.
double cf_statistic_serial(const PointPattern& pattern, Resolution rho);

// Caches the pairwise L1 distances so a grid of rho values costs one
// exponential per pair and rho.
class CfDistanceCache {
public:
    explicit CfDistanceCache(const PointPattern& pattern);

    double statistic(Resolution rho) const;
    std::vector<double> statistic(const std::vector<double>& rhos) const;

    std::size_t size() const noexcept { return n_; }
    int dim() const noexcept { return dim_; }

private:
    std::size_t n_;
    int dim_;
    std::vector<double> coords_;
    std::vector<double> l1_;  // upper triangle, row-major
};

// One-dimensional even weight density w(t). Beyond `split` it must equal
// envelope(t) * sum_i c_i cos(f_i t) with a smooth, monotone envelope, so the
// oscillatory tail can go to a Fourier-type quadrature. The D-dimensional
// weight is the product over coordinates.
struct SeparableWeight {
    std::function<double(double)> density;
    std::function<double(double)> envelope;
    std::vector<std::pair<double, double>> cos_terms;  // (c_i, f_i)
    double split = 1.0;
    double scale = 1.0;  // width of the central peak of w
};

SeparableWeight cauchy_weight(double rho);
// (1 - cos t)/(pi t^2): its characteristic function is the triangle (1-|x|)+.
SeparableWeight triangular_weight();

// Delta = int n |phi_0(t) - phi_hat(t)|^2 w(t) dt by quadrature. The product
// structure reduces the D-dimensional integral to one-dimensional ones.
double weighted_l2_oracle(const PointPattern& pattern, const SeparableWeight& weight, double abs_tol = 1e-10);

// Quadrature evaluation of cf_statistic (D <= 2).
double cf_statistic_oracle(const PointPattern& pattern, Resolution rho, double abs_tol = 1e-10);

// Zimmerman's omega-bar-squared; 4 times it is the triangular-weight CF statistic.
double omega_bar_squared(const PointPattern& pattern);

}  // namespace cfcsr
