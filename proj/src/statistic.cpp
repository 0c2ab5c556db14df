#include "cfcsr/statistic.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "cfcsr/errors.hpp"
#include "cfcsr/null_moments.hpp"
#include "quadrature.hpp"

namespace cfcsr {

Resolution::Resolution(double value) : rho(value) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw InputError("resolution rho must be positive and finite, got " + std::to_string(value));
}

namespace {

using boost::math::constants::pi;

// 2 - e^{-rho x} - e^{-rho(1-x)}, accurate when rho is small
inline double edge_factor(double rho, double x) {
    return -std::expm1(-rho * x) - std::expm1(-rho * (1.0 - x));
}

inline double l1_distance(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += std::fabs(a[d] - b[d]);
    return s;
}

double assemble(double pair_sum, double edge_sum, std::size_t n, double rho, int dim) {
    const double nn = static_cast<double>(n);
    const double alpha = cauchy_alpha(rho);
    return (nn + 2.0 * pair_sum) / nn - 2.0 * edge_sum / std::pow(rho, dim) + nn * std::pow(alpha, dim);
}

}  // namespace

double cf_statistic_serial(const PointPattern& pattern, Resolution rho) {
    require_unit_pattern(pattern, "cf_statistic");
    const std::size_t n = pattern.size();
    const int dim = pattern.dim();
    const double* x = pattern.coords().data();
    double pairs = 0.0;
    double edges = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k)
            pairs += std::exp(-rho.rho * l1_distance(x + j * dim, x + k * dim, dim));
        double prod = 1.0;
        for (int d = 0; d < dim; ++d) prod *= edge_factor(rho.rho, x[j * dim + d]);
        edges += prod;
    }
    return assemble(pairs, edges, n, rho.rho, dim);
}

double cf_statistic(const PointPattern& pattern, Resolution rho) {
    require_unit_pattern(pattern, "cf_statistic");
    const long n = static_cast<long>(pattern.size());
    const int dim = pattern.dim();
    const double* x = pattern.coords().data();
    const double r = rho.rho;
    double pairs = 0.0;
    double edges = 0.0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : pairs, edges)
    for (long j = 0; j < n; ++j) {
        double row = 0.0;
        for (long k = j + 1; k < n; ++k) row += std::exp(-r * l1_distance(x + j * dim, x + k * dim, dim));
        pairs += row;
        double prod = 1.0;
        for (int d = 0; d < dim; ++d) prod *= edge_factor(r, x[j * dim + d]);
        edges += prod;
    }
    return assemble(pairs, edges, static_cast<std::size_t>(n), r, dim);
}

CfDistanceCache::CfDistanceCache(const PointPattern& pattern)
    : n_(pattern.size()), dim_(pattern.dim()), coords_(pattern.coords().begin(), pattern.coords().end()) {
    require_unit_pattern(pattern, "CfDistanceCache");
    l1_.resize(n_ * (n_ - 1) / 2);
    const long n = static_cast<long>(n_);
#pragma omp parallel for schedule(dynamic, 8)
    for (long j = 0; j < n; ++j) {
        std::size_t off = static_cast<std::size_t>(j) * (2 * n_ - j - 1) / 2;
        for (long k = j + 1; k < n; ++k)
            l1_[off + (k - j - 1)] = l1_distance(&coords_[j * dim_], &coords_[k * dim_], dim_);
    }
}

double CfDistanceCache::statistic(Resolution rho) const {
    const double r = rho.rho;
    double pairs = 0.0;
    const long m = static_cast<long>(l1_.size());
#pragma omp parallel for reduction(+ : pairs)
    for (long i = 0; i < m; ++i) pairs += std::exp(-r * l1_[i]);
    double edges = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
        double prod = 1.0;
        for (int d = 0; d < dim_; ++d) prod *= edge_factor(r, coords_[j * dim_ + d]);
        edges += prod;
    }
    return assemble(pairs, edges, n_, r, dim_);
}

std::vector<double> CfDistanceCache::statistic(const std::vector<double>& rhos) const {
    std::vector<double> out;
    out.reserve(rhos.size());
    for (double r : rhos) out.push_back(statistic(Resolution(r)));
    return out;
}

double omega_bar_squared(const PointPattern& pattern) {
    require_unit_pattern(pattern, "omega_bar_squared");
    if (pattern.dim() != 2) throw InputError("omega_bar_squared needs D = 2");
    const std::size_t n = pattern.size();
    double pairs = 0.0;
    double edges = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double x1 = pattern.coord(j, 0), x2 = pattern.coord(j, 1);
        for (std::size_t k = j + 1; k < n; ++k)
            pairs += (1.0 - std::fabs(x1 - pattern.coord(k, 0))) * (1.0 - std::fabs(x2 - pattern.coord(k, 1)));
        edges += (x1 * x1 - x1 - 0.5) * (x2 * x2 - x2 - 0.5);
    }
    const double nn = static_cast<double>(n);
    const double delta_tri = (nn + 2.0 * pairs) / nn - 2.0 * edges + 4.0 / 9.0 * nn;
    return delta_tri / 4.0;
}

// ---------------------------------------------------------------------------
// Quadrature oracle

SeparableWeight cauchy_weight(double rho) {
    Resolution checked(rho);
    SeparableWeight w;
    w.density = [rho](double t) { return rho / (pi<double>() * (rho * rho + t * t)); };
    w.envelope = w.density;
    w.cos_terms = {{1.0, 0.0}};
    w.split = std::max(4.0, 2.0 * rho);
    w.scale = rho;
    return w;
}

SeparableWeight triangular_weight() {
    SeparableWeight w;
    w.density = [](double t) {
        if (std::fabs(t) < 1e-4) return (0.5 - t * t / 24.0) / pi<double>();
        const double s = std::sin(0.5 * t);
        return 2.0 * s * s / (pi<double>() * t * t);
    };
    w.envelope = [](double t) { return 1.0 / (pi<double>() * t * t); };
    w.cos_terms = {{1.0, 0.0}, {-1.0, 1.0}};
    w.split = 8.0;
    return w;
}

namespace {

class OneDimIntegrals {
public:
    OneDimIntegrals(const SeparableWeight& w, double tol) : w_(w), tol_(tol), cos_(tol * 1e-2), sin_(tol * 1e-2) {}

    // int_R cos(omega t) w(t) dt
    double c(double omega) {
        omega = std::fabs(omega);
        double head = gk([&](double t) { return std::cos(omega * t) * w_.density(t); });
        double tail = 0.0;
        for (auto [ci, fi] : w_.cos_terms)
            tail += 0.5 * ci * (tail_cos(w_.envelope, omega + fi) + tail_cos(w_.envelope, std::fabs(omega - fi)));
        return 2.0 * (head + tail);
    }

    // int_R sin(a t)/t w(t) dt
    double k(double a) {
        if (a == 0.0) return 0.0;
        double head = gk([&](double t) { return sinc_times(a, t) * w_.density(t); });
        auto g = [this](double t) { return w_.envelope(t) / t; };
        double tail = 0.0;
        for (auto [ci, fi] : w_.cos_terms) tail += 0.5 * ci * (tail_sin(g, a + fi) + tail_sin(g, a - fi));
        return 2.0 * (head + tail);
    }

    // int_R |phi_0(t)|^2 w(t) dt with |phi_0|^2 = 2(1 - cos t)/t^2
    double p() {
        double head = gk([&](double t) { return phi0_sq(t) * w_.density(t); });
        auto q = [this](double t) { return 2.0 * w_.envelope(t) / (t * t); };
        double tail = 0.0;
        for (auto [ci, fi] : w_.cos_terms)
            tail += ci * (tail_cos(q, fi) - 0.5 * tail_cos(q, 1.0 + fi) - 0.5 * tail_cos(q, std::fabs(1.0 - fi)));
        return 2.0 * (head + tail);
    }

    double worst_error() const { return worst_; }

private:
    static double sinc_times(double a, double t) { return t == 0.0 ? a : std::sin(a * t) / t; }
    static double phi0_sq(double t) {
        if (std::fabs(t) < 1e-4) return 1.0 - t * t / 12.0;
        const double s = std::sin(0.5 * t);
        return 4.0 * s * s / (t * t);
    }

    // [0, split] in panels growing geometrically from the peak width
    template <class F>
    double gk(F f) {
        double total = 0.0;
        double a = 0.0;
        double b = std::min(w_.scale, w_.split);
        while (a < w_.split) {
            double err = 0.0;
            total += detail::gk_integrate(f, a, b, 1e-13, 20, &err);
            note(err);
            a = b;
            b = std::min(4.0 * b, w_.split);
        }
        return total;
    }

    // int_T^inf g(t) cos(omega t) dt, omega >= 0
    template <class G>
    double tail_cos(G g, double omega) {
        const double T = w_.split;
        if (omega <= kSlow) return slow_tail(g, omega, true);
        auto shifted = [&](double s) { return g(s + T); };
        auto [oc, ec] = cos_.integrate(shifted, omega);
        auto [os, es] = sin_.integrate(shifted, omega);
        note(ec * std::fabs(oc) + es * std::fabs(os));
        return std::cos(omega * T) * oc - std::sin(omega * T) * os;
    }

    // int_T^inf g(t) sin(omega t) dt
    template <class G>
    double tail_sin(G g, double omega) {
        if (omega == 0.0) return 0.0;
        if (omega < 0.0) return -tail_sin(g, -omega);
        const double T = w_.split;
        if (omega <= kSlow) return slow_tail(g, omega, false);
        auto shifted = [&](double s) { return g(s + T); };
        auto [oc, ec] = cos_.integrate(shifted, omega);
        auto [os, es] = sin_.integrate(shifted, omega);
        note(ec * std::fabs(oc) + es * std::fabs(os));
        return std::cos(omega * T) * os + std::sin(omega * T) * oc;
    }

    // Low frequencies: Gauss-Kronrod straight onto the half line.
    template <class G>
    double slow_tail(G g, double omega, bool cosine) {
        auto f = [&](double t) { return g(t) * (cosine ? std::cos(omega * t) : std::sin(omega * t)); };
        double err = 0.0;
        double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            f, w_.split, std::numeric_limits<double>::infinity(), 25, 1e-13, &err);
        note(err);
        return v;
    }

    void note(double err) { worst_ = std::max(worst_, err); }

    static constexpr double kSlow = 0.0;
    const SeparableWeight& w_;
    double tol_;
    boost::math::quadrature::ooura_fourier_cos<double> cos_;
    boost::math::quadrature::ooura_fourier_sin<double> sin_;
    double worst_ = 0.0;
};

}  // namespace

double weighted_l2_oracle(const PointPattern& pattern, const SeparableWeight& weight, double abs_tol) {
    require_unit_pattern(pattern, "weighted_l2_oracle");
    const std::size_t n = pattern.size();
    const int dim = pattern.dim();
    OneDimIntegrals q(weight, abs_tol);

    const double p = q.p();
    double self = std::pow(p, dim);

    double cross = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double prod = 1.0;
        for (int d = 0; d < dim; ++d) {
            const double x = pattern.coord(j, d);
            prod *= q.k(1.0 - x) + q.k(x);
        }
        cross += prod;
    }

    const double c0 = std::pow(q.c(0.0), dim);
    double pairs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            double prod = 1.0;
            for (int d = 0; d < dim; ++d) prod *= q.c(pattern.coord(j, d) - pattern.coord(k, d));
            pairs += prod;
        }
    }

    const double nn = static_cast<double>(n);
    const double delta = nn * self - 2.0 * cross + (nn * c0 + 2.0 * pairs) / nn;
    // each 1D integral enters at most O(n) times
    const double achieved = q.worst_error() * 4.0 * nn * dim;
    if (achieved > abs_tol * std::max(1.0, std::fabs(delta)))
        throw NumericError("weighted L2 oracle did not reach tolerance", achieved);
    return delta;
}

double cf_statistic_oracle(const PointPattern& pattern, Resolution rho, double abs_tol) {
    if (pattern.dim() > 2) throw InputError("cf_statistic_oracle supports D <= 2");
    return weighted_l2_oracle(pattern, cauchy_weight(rho.rho), abs_tol);
}

}  // namespace cfcsr
