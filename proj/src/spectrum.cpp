#include "cfcsr/spectrum.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <tuple>

#include "cfcsr/errors.hpp"
#include "cfcsr/null_moments.hpp"

namespace cfcsr {

namespace {

using boost::math::constants::pi;

constexpr double kRelativeCutoff = 1e-8;
constexpr int kPowers = 24;            // power sums kept for the remainder series
constexpr double kSeriesRatio = 0.125;  // eigenvalues below ratio * mu go to the series

void check_args(double rho, int J) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InputError("rho must be positive and finite");
    if (J < 1) throw InputError("root count J must be >= 1");
}

double lambda_of(double rho, double tau) { return 2.0 * rho / (tau * tau + rho * rho); }

template <class F3>
std::vector<double> roots_in_brackets(double rho, int J, double first_lo, F3 make_f) {
    std::vector<double> out(J);
#pragma omp parallel for schedule(static)
    for (int k = 1; k <= J; ++k) {
        const double lo = first_lo + 2.0 * (k - 1) * pi<double>();
        const double hi = lo + pi<double>();
        // offset where tan or cot of tau/2 equals rho/tau, with tau ~ lo
        const double eps = 2.0 * std::atan(rho / (lo + 0.5 * pi<double>()));
        auto f = make_f(rho);
        double guess = std::clamp(lo + eps, std::nextafter(lo, hi), std::nextafter(hi, lo));
        boost::uintmax_t iters = 100;
        double t = boost::math::tools::halley_iterate(f, guess, lo, hi, 45, iters);
        if (!(t > lo && t < hi) || iters >= 100) {
            auto value = [&](double x) { return std::get<0>(f(x)); };
            auto tol = [](double a, double b) { return std::fabs(b - a) <= 1e-15 * std::fabs(a); };
            boost::uintmax_t biters = 400;
            auto [a, b] = boost::math::tools::bisect(value, lo, hi, tol, biters);
            t = 0.5 * (a + b);
        }
        out[k - 1] = t;
    }
    return out;
}

auto a1_function(double rho) {
    return [rho](double t) {
        const double s = std::sin(0.5 * t), c = std::cos(0.5 * t);
        return std::make_tuple(t * s - rho * c, s + 0.5 * t * c + 0.5 * rho * s, c * (1.0 + 0.25 * rho) - 0.25 * t * s);
    };
}

auto a2_function(double rho) {
    return [rho](double t) {
        const double s = std::sin(0.5 * t), c = std::cos(0.5 * t);
        return std::make_tuple(rho * s + t * c, 0.5 * rho * c + c - 0.5 * t * s, -s * (1.0 + 0.25 * rho) - 0.25 * t * c);
    };
}

}  // namespace

std::vector<double> roots_a1(double rho, int J) {
    check_args(rho, J);
    return roots_in_brackets(rho, J, 0.0, [](double r) { return a1_function(r); });
}

std::vector<double> roots_a2(double rho, int J) {
    check_args(rho, J);
    return roots_in_brackets(rho, J, pi<double>(), [](double r) { return a2_function(r); });
}

OneDimSpectra one_dim_spectra(double rho, int J) {
    OneDimSpectra s;
    s.rho = rho;
    s.J = J;
    auto t1 = roots_a1(rho, J + 1);
    auto t2 = roots_a2(rho, J + 1);
    s.next_lambda_a1 = lambda_of(rho, t1.back());
    s.next_lambda_a2 = lambda_of(rho, t2.back());
    t1.pop_back();
    t2.pop_back();
    s.tau_a1 = std::move(t1);
    s.tau_a2 = std::move(t2);
    s.lambda_a1.reserve(J);
    s.lambda_a2.reserve(J);
    for (double t : s.tau_a1) s.lambda_a1.push_back(lambda_of(rho, t));
    for (double t : s.tau_a2) s.lambda_a2.push_back(lambda_of(rho, t));
    return s;
}

// ---------------------------------------------------------------------------

double g_sum(int m, double rho) {
    if (m < 1 || m > 5) throw InputError("g_sum is available for m = 1..5");
    if (!(rho > 0.0)) throw InputError("rho must be positive");
    if (rho < 4.0) {
        // sum_j (2 rho)^m / ((2 pi j)^2 + rho^2)^m expanded in c = (rho/2pi)^2
        const double two_pi = 2.0 * pi<double>();
        const double c = rho * rho / (two_pi * two_pi);
        const double pref = std::pow(2.0 * rho / (two_pi * two_pi), m);
        double sum = 0.0, binom = 1.0, cp = 1.0;
        for (int i = 0; i < 400; ++i) {
            if (i > 0) {
                binom *= static_cast<double>(m + i - 1) / i;
                cp *= -c;
            }
            const double term = binom * cp * boost::math::zeta(2.0 * (m + i));
            sum += term;
            if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
        }
        return pref * sum;
    }
    const double E = std::exp(-rho);
    const double q = -std::expm1(-rho);  // 1 - E
    const double r = rho;
    switch (m) {
        case 1:
            return (1.0 + E) / (2.0 * q) - 1.0 / r;
        case 2:
            return (2.0 * r * r * E + r * (1.0 - E * E) - 4.0 * q * q) / (2.0 * r * r * q * q);
        case 3:
            return (2.0 * r * r * r * E * (1.0 + E) + 6.0 * r * r * E * q + 3.0 * r * q * q * (1.0 + E) -
                    16.0 * q * q * q) /
                   (4.0 * r * r * r * q * q * q);
        case 4: {
            const double q2 = q * q;
            return (2.0 * std::pow(r, 4) * E * (1.0 + 4.0 * E + E * E) + 12.0 * r * r * r * E * q * (1.0 + E) +
                    30.0 * r * r * E * q2 + 15.0 * r * q2 * q * (1.0 + E) - 96.0 * q2 * q2) /
                   (12.0 * std::pow(r, 4) * q2 * q2);
        }
        default: {
            const double q2 = q * q;
            return (2.0 * std::pow(r, 5) * E * (1.0 + 11.0 * E + 11.0 * E * E + E * E * E) +
                    20.0 * std::pow(r, 4) * E * q * (1.0 + 4.0 * E + E * E) + 90.0 * r * r * r * E * q2 * (1.0 + E) +
                    210.0 * r * r * E * q2 * q + 105.0 * r * q2 * q2 * (1.0 + E) - 768.0 * q2 * q2 * q) /
                   (48.0 * std::pow(r, 5) * q2 * q2 * q);
        }
    }
}

GMoments g_moments(double rho) {
    GMoments g{};
    const double a = cauchy_alpha(rho);
    const double gm = -std::expm1(-rho);
    const double b = std::sqrt(2.0) * gm / rho;
    g.alpha = a;
    g.beta = b;
    g.gamma = gm;
    g.G[0] = 0.0;
    for (int m = 1; m <= 5; ++m) g.G[m] = g_sum(m, rho);
    const double G1 = g.G[1], G2 = g.G[2], G3 = g.G[3], G4 = g.G[4], G5 = g.G[5];
    const double b2 = b * b, b4 = b2 * b2, c = gm;
    auto& p = g.a1_power_11;
    p[0] = 1.0;
    p[1] = a;
    p[2] = a * a + b2 * G2;
    p[3] = a * a * a + 2 * a * b2 * G2 - b2 * c * G2 * G2 + b2 * G3;
    p[4] = std::pow(a, 4) + 3 * a * a * b2 * G2 - 2 * a * b2 * c * G2 * G2 + 2 * a * b2 * G3 + b4 * G2 * G2 +
           b2 * c * c * std::pow(G2, 3) - 2 * b2 * c * G2 * G3 + b2 * G4;
    p[5] = std::pow(a, 5) + 4 * std::pow(a, 3) * b2 * G2 - 3 * a * a * b2 * c * G2 * G2 + 3 * a * b4 * G2 * G2 +
           2 * a * b2 * c * c * std::pow(G2, 3) - 2 * b4 * c * std::pow(G2, 3) + 3 * a * a * b2 * G3 -
           4 * a * b2 * c * G2 * G3 + 2 * b4 * G2 * G3 - b2 * std::pow(c, 3) * std::pow(G2, 4) +
           3 * b2 * c * c * G2 * G2 * G3 + 2 * a * b2 * G4 - 2 * b2 * c * G2 * G4 - b2 * c * G3 * G3 + b2 * G5;
    const double sum_v2 = 2.0 * G1 / rho - G2;
    const double sum_uv2 = 2.0 * G2 / rho - G3;
    g.trace_a1 = a + G1 - c * G2;
    g.trace_a2 = G1 + c * sum_v2;
    g.trace_sq_a1 = a * a + 2.0 * b2 * G2 + G2 - 2.0 * c * G3 + c * c * G2 * G2;
    g.trace_sq_a2 = G2 + 2.0 * c * sum_uv2 + c * c * sum_v2 * sum_v2;
    return g;
}

double zeta_sq(double rho, double alpha, double tau, double lambda) {
    // 4 alpha lambda^2 / ((lambda+1)(2 - lambda rho)) with 2 - lambda rho = 2 tau^2/(tau^2+rho^2)
    return 4.0 * alpha * rho * lambda / ((lambda + 1.0) * tau * tau);
}

// ---------------------------------------------------------------------------

namespace {

std::int64_t factorial(int k) {
    std::int64_t f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

std::int64_t binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

struct Product {
    double value;
    double weight;
    std::int64_t count;
};

// Multisets of `size` indices (non-decreasing tuples) whose product of
// lam[] is at least `threshold`. count = number of orderings.
template <class Emit>
void enumerate_multisets(const std::vector<double>& lam, const std::vector<double>* w, int size, double threshold,
                         Emit&& emit) {
    if (size == 0) {
        emit(1.0, 1.0, std::int64_t{1});
        return;
    }
    const std::int64_t total_orderings = factorial(size);
    std::function<void(std::size_t, int, double, double, std::int64_t, int)> dfs =
        [&](std::size_t start, int rem, double prod, double wprod, std::int64_t denom, int run) {
            for (std::size_t i = start; i < lam.size(); ++i) {
                if (prod * std::pow(lam[i], rem) < threshold) break;
                const int new_run = (i == start && rem < size) ? run + 1 : 1;
                const std::int64_t new_denom = denom * new_run;
                const double p = prod * lam[i];
                const double wp = w ? wprod * (*w)[i] : 1.0;
                if (rem == 1) {
                    emit(p, wp, total_orderings / new_denom);
                } else {
                    dfs(i, rem - 1, p, wp, new_denom, new_run);
                }
            }
        };
    dfs(0, size, 1.0, 1.0, 1, 0);
}

struct Context {
    double rho;
    int dim;
    OneDimSpectra one;
    std::vector<double> zeta_a1;  // zeta'^2 per A1 eigenvalue
    double alpha;
    double cutoff;
};

double default_cutoff(const OneDimSpectra& one, int dim) {
    const double l1 = one.lambda_a1[0];
    const double lead = std::pow(l1, dim - 1);
    double lower_max = lead * one.lambda_a2[0];
    if (one.lambda_a1.size() > 1) lower_max = std::max(lower_max, lead * one.lambda_a1[1]);
    const double j_bound = lead * std::max(one.next_lambda_a1, one.next_lambda_a2);
    return std::max(kRelativeCutoff * lower_max, j_bound);
}

Context make_context(double rho, int dim, int J, double cutoff) {
    check_args(rho, J);
    if (dim < 1) throw InputError("dimension must be >= 1");
    Context ctx{rho, dim, one_dim_spectra(rho, J), {}, cauchy_alpha(rho), 0.0};
    ctx.zeta_a1.resize(J);
    for (int j = 0; j < J; ++j)
        ctx.zeta_a1[j] = zeta_sq(rho, ctx.alpha, ctx.one.tau_a1[j], ctx.one.lambda_a1[j]);
    const double floor = default_cutoff(ctx.one, dim);
    const double j_bound = std::pow(ctx.one.lambda_a1[0], dim - 1) *
                           std::max(ctx.one.next_lambda_a1, ctx.one.next_lambda_a2);
    ctx.cutoff = cutoff > 0.0 ? std::max(cutoff, j_bound) : floor;
    return ctx;
}

// Power sums sum over A1^{(x)D} tuples with product below c of prod(lambda^m zeta'^2).
class TailPowers {
public:
    explicit TailPowers(const Context& ctx) : ctx_(ctx) {
        const auto& lam = ctx.one.lambda_a1;
        const std::size_t J = lam.size();
        const auto g = g_moments(ctx.rho);
        suffix_.assign(kPowers, std::vector<double>(J + 1, 0.0));
        std::vector<double> beyond(kPowers, 0.0);
        for (int m = 0; m < kPowers; ++m) {
            double head = 0.0;
            for (std::size_t j = J; j-- > 0;) head += std::pow(lam[j], m) * ctx.zeta_a1[j];
            if (m == 0) {
                beyond[m] = std::max(ctx.alpha - head, 0.0);
            } else if (m <= 5) {
                beyond[m] = std::clamp(ctx.alpha * g.a1_power_11[m] - head, 0.0, ctx.one.next_lambda_a1 * beyond[m - 1]);
            } else {
                beyond[m] = ctx.one.next_lambda_a1 * beyond[m - 1];
            }
            auto& s = suffix_[m];
            s[J] = beyond[m];
            for (std::size_t j = J; j-- > 0;) s[j] = s[j + 1] + std::pow(lam[j], m) * ctx.zeta_a1[j];
        }
    }

    double tail(int m, double c) const { return tail(m, ctx_.dim, c); }

private:
    double tail(int m, int dim, double c) const {
        const auto& lam = ctx_.one.lambda_a1;
        const auto& s = suffix_[m];
        if (dim == 1) {
            auto it = std::lower_bound(lam.begin(), lam.end(), c, std::greater<double>());
            return s[static_cast<std::size_t>(it - lam.begin())];
        }
        const double rest_max = std::pow(lam[0], dim - 1);
        const double full_rest = std::pow(s[0], dim - 1);
        double sum = 0.0;
        for (std::size_t i = 0; i < lam.size(); ++i) {
            if (lam[i] * rest_max < c) return sum + s[i] * full_rest;
            sum += std::pow(lam[i], m) * ctx_.zeta_a1[i] * tail(m, dim - 1, c / lam[i]);
        }
        return sum + s[lam.size()] * full_rest;
    }

    const Context& ctx_;
    std::vector<std::vector<double>> suffix_;
};

struct Groups {
    std::vector<double> value;
    std::vector<double> weight;  // multiplicity * prod zeta'^2
    std::vector<std::int64_t> count;
};

Groups a1_groups(const Context& ctx) {
    std::vector<Product> prods;
    enumerate_multisets(ctx.one.lambda_a1, &ctx.zeta_a1, ctx.dim, ctx.cutoff,
                        [&](double v, double w, std::int64_t c) { prods.push_back({v, w * c, c}); });
    std::stable_sort(prods.begin(), prods.end(), [](const Product& a, const Product& b) { return a.value > b.value; });
    Groups g;
    g.value.reserve(prods.size());
    g.weight.reserve(prods.size());
    g.count.reserve(prods.size());
    for (auto& p : prods) {
        g.value.push_back(p.value);
        g.weight.push_back(p.weight);
        g.count.push_back(p.count);
    }
    return g;
}

struct FValues {
    double f[3];
    double df[3];
    double abs_f[3];  // sums of term magnitudes
};

class SecularSolver {
public:
    SecularSolver(const Context& ctx, const Groups& groups, std::size_t n_gaps)
        : ctx_(ctx), gr_(groups), A_(std::pow(ctx.alpha, ctx.dim)), lam1_(groups.value.front()) {
        const auto& v = gr_.value;
        split_.resize(n_gaps);
        for (std::size_t g = 0; g < n_gaps; ++g) {
            auto it = std::lower_bound(v.begin(), v.end(), kSeriesRatio * v[g + 1], std::greater<double>());
            split_[g] = static_cast<std::size_t>(it - v.begin());
        }
        // power sums over groups from each split point to the end, plus the
        // part of A1^{(x)D} below the cutoff
        TailPowers tails(ctx);
        std::array<double, kPowers> beyond{};
        for (int m = 0; m < kPowers; ++m) beyond[m] = tails.tail(m, ctx.cutoff);
        power_.assign(n_gaps, {});
        std::array<double, kPowers> run = beyond;
        std::size_t h = v.size();
        for (std::size_t g = n_gaps; g-- > 0;) {
            while (h > split_[g]) {
                --h;
                double p = gr_.weight[h];
                for (int m = 0; m < kPowers; ++m) {
                    run[m] += p;
                    p *= v[h];
                }
            }
            power_[g] = run;
        }
    }

    FValues evaluate(std::size_t g, double delta) const {
        const auto& v = gr_.value;
        const auto& w = gr_.weight;
        const double L = v[g + 1];
        const double mu = L + delta;
        FValues F{};
        for (std::size_t h = 0; h < split_[g]; ++h) {
            const double d = (h == g + 1) ? -delta : (v[h] - L) - delta;
            const double t = w[h] / d;
            const double dt = t / d;
            F.f[0] += t;
            F.f[1] += t * v[h];
            F.f[2] += t * v[h] * v[h];
            F.df[0] += dt;
            F.df[1] += dt * v[h];
            F.df[2] += dt * v[h] * v[h];
            const double at = std::fabs(t);
            F.abs_f[0] += at;
            F.abs_f[1] += at * v[h];
            F.abs_f[2] += at * v[h] * v[h];
        }
        const auto& P = power_[g];
        for (int l = 0; l < 3; ++l) {
            double inv = 1.0 / mu;
            for (int r = 0; l + r < kPowers; ++r) {
                const double term = P[l + r] * inv;
                F.f[l] -= term;
                F.abs_f[l] += term;
                F.df[l] += (r + 1) * term / mu;
                if (term < 1e-18 * std::fabs(F.f[l])) break;
                inv /= mu;
            }
        }
        return F;
    }

    // (1 - F1/A)^2 + F0 (1 - F2/A^2), and the same expression with every
    // sum replaced by the sum of magnitudes
    std::array<double, 2> characteristic(const FValues& F) const {
        const double t1 = 1.0 - F.f[1] / A_;
        const double value = t1 * t1 + F.f[0] * (1.0 - F.f[2] / (A_ * A_));
        const double s1 = 1.0 + F.abs_f[1] / A_;
        const double scale = s1 * s1 + F.abs_f[0] * (1.0 + F.abs_f[2] / (A_ * A_));
        return {value, scale};
    }

    struct GapResult {
        double delta;
        bool no_root = false, unconverged = false;
        int bisection = 0, clamped = 0;
        std::array<double, 2> residual{};
    };

    GapResult solve(std::size_t g) const {
        GapResult res{};
        const auto& v = gr_.value;
        const double L = v[g + 1];
        const double gap = v[g] - L;
        const double w = gr_.weight[g + 1];
        if (!(gap > 0.0)) {
            res.delta = 0.0;
            return res;
        }
        double lo = 0.0, hi = gap;
        double delta = 0.1 * gap;
        bool converged = false;
        for (int it = 0; it < 20; ++it) {
            const FValues F = evaluate(g, delta);
            const auto E = characteristic(F);
            if (E[0] > 0.0) lo = std::max(lo, delta);
            else hi = std::min(hi, delta);

            const double x0 = gap - delta;
            const double y0 = -delta;
            double at[3];
            bool usable = true;
            double Lp = 1.0;
            for (int l = 0; l < 3; ++l) {
                at[l] = x0 * x0 * (F.df[l] - w * Lp / (y0 * y0));
                if (!(at[l] > 0.0) || !std::isfinite(at[l])) usable = false;
                Lp *= L;
            }
            double next;
            if (!usable) {
                next = 0.5 * (lo + hi);
                ++res.bisection;
            } else {
                const double l0 = std::log(at[0]), l1 = std::log(at[1]), l2 = std::log(at[2]);
                const double a0 = std::exp((5.0 * l0 + 2.0 * l1 - l2) / 6.0);
                const double a1 = std::exp((l0 + l1 + l2) / 3.0);
                const double a2 = std::exp((-l0 + 2.0 * l1 + 5.0 * l2) / 6.0);
                const double b0 = F.f[0] - a0 / x0 - w / y0;
                const double b1 = F.f[1] - a1 / x0 - w * L / y0;
                const double b2 = F.f[2] - a2 / x0 - w * L * L / y0;
                const double A = A_, A2 = A_ * A_;
                const double s1 = 2 * a1 * b1 - a0 * b2 - a2 * b0 - 2 * a1 * A + a0 * A2;
                const double s2 = b1 * b1 - b0 * b2 - 2 * b1 * A + (b0 + 1) * A2;
                const double s3 = a0 * L * L - 2 * a1 * L + a2;
                const double s4 = b0 * L * L - 2 * b1 * L + b2 - A2 + 2 * A * L;
                // s2 d^2 + B d + C = 0 for d = mu - lambda_{k+1}
                const double B = -s2 * gap - s1 + w * s4;
                const double C = -w * (s4 * gap + s3);
                double r1 = NAN, r2 = NAN;
                if (s2 == 0.0) {
                    if (B != 0.0) r1 = -C / B;
                } else {
                    const double disc = B * B - 4.0 * s2 * C;
                    if (disc >= 0.0) {
                        const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
                        r1 = q / s2;
                        r2 = (q != 0.0) ? C / q : NAN;
                    }
                }
                auto inside = [&](double r) { return std::isfinite(r) && r > 0.0 && r < gap; };
                if (inside(r1) && inside(r2)) next = std::min(r1, r2);
                else if (inside(r1)) next = r1;
                else if (inside(r2)) next = r2;
                else {
                    res.no_root = true;
                    delta = 0.0;
                    converged = true;
                    break;
                }
                if (!(next > lo && next < hi) && hi > lo) {
                    next = 0.5 * (lo + hi);
                    ++res.clamped;
                }
            }
            if (std::fabs(next - delta) < 1e-12 * lam1_) {
                delta = next;
                converged = true;
                break;
            }
            delta = next;
        }
        res.unconverged = !converged;
        res.delta = delta;
        res.residual = characteristic(evaluate(g, delta));
        return res;
    }

private:
    const Context& ctx_;
    const Groups& gr_;
    double A_;
    double lam1_;
    std::vector<std::size_t> split_;
    std::vector<std::array<double, kPowers>> power_;
};

SSpectrum solve_s(const Context& ctx, const Groups& groups, std::size_t max_solved) {
    SSpectrum s;
    s.cutoff = ctx.cutoff;
    const std::size_t G = groups.value.size();
    s.lambda.reserve(G);
    for (std::size_t g = 0; g < G; ++g) s.lambda.push_back({groups.value[g], groups.count[g]});
    if (G < 2) throw NumericError("too few eigenvalues above the cutoff to form the S spectrum");
    const std::size_t n_gaps = std::min(G - 1, max_solved);
    s.mu.resize(G - 1);
    s.residuals.resize(n_gaps);

    SecularSolver solver(ctx, groups, n_gaps);
    std::vector<SecularSolver::GapResult> results(n_gaps);
    const long ng = static_cast<long>(n_gaps);
#pragma omp parallel for schedule(dynamic, 4)
    for (long g = 0; g < ng; ++g) results[g] = solver.solve(static_cast<std::size_t>(g));

    double gap_sum = 0.0, gap_sq_sum = 0.0;
    for (std::size_t g = 0; g < n_gaps; ++g) {
        const auto& r = results[g];
        const double lower = groups.value[g + 1];
        const double mu = lower + r.delta;
        s.mu[g] = mu;
        s.residuals[g] = r.residual;
        gap_sum += (groups.value[g] - lower) - r.delta;
        gap_sq_sum += (groups.value[g] - mu) * (groups.value[g] + mu);
        s.stats.no_root += r.no_root;
        s.stats.unconverged += r.unconverged;
        s.stats.bisection += r.bisection;
        s.stats.clamped += r.clamped;
    }
    s.stats.solved = n_gaps;
    for (std::size_t g = n_gaps; g + 1 < G; ++g) s.mu[g] = groups.value[g + 1];
    s.first_unsolved = n_gaps;
    const double lu = groups.value[n_gaps];
    s.trace_gap = gap_sum + lu;
    s.trace_sq_gap = gap_sq_sum + lu * lu;
    return s;
}

}  // namespace

SSpectrum eigvals_s(double rho, int dim, int J, double cutoff, std::size_t max_solved) {
    const Context ctx = make_context(rho, dim, J, cutoff);
    const Groups groups = a1_groups(ctx);
    return solve_s(ctx, groups, max_solved);
}

std::size_t NullSpectrum::count() const {
    std::size_t c = 0;
    for (const auto& e : eigs) c += static_cast<std::size_t>(e.multiplicity);
    return c;
}

int recommended_roots(double rho, int dim) {
    (void)dim;
    if (!(rho > 0.0)) throw InputError("rho must be positive");
    const double tau1 = roots_a1(rho, 1)[0];
    const double l1 = lambda_of(rho, tau1);
    // lambda_J ~ 2 rho/(2 pi (J-1))^2 must fall below half the relative cutoff
    const double target = 0.5 * kRelativeCutoff * l1;
    const double j = 1.0 + std::sqrt(2.0 * rho / target) / (2.0 * pi<double>());
    return static_cast<int>(std::ceil(j)) + 2;
}

NullSpectrum build_spectrum(double rho, int dim, int J) {
    if (J <= 0) J = std::max(1000, recommended_roots(rho, dim));
    const Context ctx = make_context(rho, dim, J, 0.0);
    const Groups groups = a1_groups(ctx);
    const SSpectrum s = solve_s(ctx, groups, 2000);
    const double c = ctx.cutoff;

    std::vector<Eigenvalue> all;
    all.reserve(groups.value.size() * 3);
    for (std::size_t g = 0; g < groups.value.size(); ++g)
        if (groups.count[g] > 1) all.push_back({groups.value[g], groups.count[g] - 1});
    for (double mu : s.mu)
        if (mu >= c) all.push_back({mu, 1});

    const auto& l1 = ctx.one.lambda_a1;
    const auto& l2 = ctx.one.lambda_a2;
    for (int d = 1; d <= dim; ++d) {
        const std::int64_t fam = binomial(dim, d);
        const double a2_max = std::pow(l2[0], d);
        enumerate_multisets(l1, nullptr, dim - d, c / a2_max, [&](double p1, double, std::int64_t m1) {
            enumerate_multisets(l2, nullptr, d, c / p1, [&](double p2, double, std::int64_t m2) {
                all.push_back({p1 * p2, fam * m1 * m2});
            });
        });
    }
    std::sort(all.begin(), all.end(), [](const Eigenvalue& a, const Eigenvalue& b) { return a.value > b.value; });

    NullSpectrum out;
    out.dim = dim;
    out.rho = rho;
    out.J = J;
    out.cutoff = c;
    out.secular = s.stats;
    out.trace_gap = s.trace_gap;
    for (const auto& e : all) {
        if (!out.eigs.empty() && out.eigs.back().value == e.value) out.eigs.back().multiplicity += e.multiplicity;
        else out.eigs.push_back(e);
    }
    for (auto it = out.eigs.rbegin(); it != out.eigs.rend(); ++it) {
        out.sum_trunc += it->value * it->multiplicity;
        out.sum_sq_trunc += it->value * it->value * it->multiplicity;
    }
    out.sum_all = null_mean(rho, dim);
    out.sum_sq_all = 0.5 * null_variance_limit(rho, dim);

    const auto gm = g_moments(rho);
    double fam_sum = 0.0, fam_sq = 0.0;
    for (int d = 1; d <= dim; ++d) {
        fam_sum += binomial(dim, d) * std::pow(gm.trace_a1, dim - d) * std::pow(gm.trace_a2, d);
        fam_sq += binomial(dim, d) * std::pow(gm.trace_sq_a1, dim - d) * std::pow(gm.trace_sq_a2, d);
    }
    out.sum_check = std::pow(gm.trace_a1, dim) - s.trace_gap + fam_sum;
    out.sum_sq_check = std::pow(gm.trace_sq_a1, dim) - s.trace_sq_gap + fam_sq;

    if (out.sum_trunc < 0.999 * out.sum_all)
        throw NumericError("stored eigenvalues carry only " + std::to_string(out.sum_trunc / out.sum_all) +
                           " of the null mean; increase J (recommended " +
                           std::to_string(recommended_roots(rho, dim)) + ")");
    return out;
}

}  // namespace cfcsr
