#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace cfcsr {

// Eigenvalue with multiplicity.
struct Eigenvalue {
    double value;
    std::int64_t multiplicity;
};

// Roots tau_k and eigenvalues lambda = 2 rho/(tau^2 + rho^2) of the cosine (A1)
// and sine (A2) blocks of the one-dimensional operator.
struct OneDimSpectra {
    double rho = 0.0;
    int J = 0;
    std::vector<double> tau_a1, tau_a2;
    std::vector<double> lambda_a1, lambda_a2;
    // tau_{J+1} of each family, bounding everything not stored
    double next_lambda_a1 = 0.0, next_lambda_a2 = 0.0;
};

// tau_k in ((2k-2)pi, (2k-1)pi) solving tau sin(tau/2) - rho cos(tau/2) = 0.
std::vector<double> roots_a1(double rho, int J);
// tau_k in ((2k-1)pi, 2k pi) solving rho sin(tau/2) + tau cos(tau/2) = 0.
std::vector<double> roots_a2(double rho, int J);
OneDimSpectra one_dim_spectra(double rho, int J);

// G_m = sum_j u_j^m with u_j = 2 rho/((2 pi j)^2 + rho^2), m = 1..5.
double g_sum(int m, double rho);

struct GMoments {
    double alpha, beta, gamma;
    std::array<double, 6> G;            // G[1..5]; G[0] unused
    std::array<double, 6> a1_power_11;  // (A1^m)_{11}, m = 0..5
    // closed-form traces of A1, A2 and of their squares
    double trace_a1, trace_a2, trace_sq_a1, trace_sq_a2;
};
GMoments g_moments(double rho);

// Squared weights zeta'_k^2 of the rank-two update for one A1 eigenvalue.
double zeta_sq(double rho, double alpha, double tau, double lambda);

struct SecularStats {
    std::size_t solved = 0;         // gaps handled by the quadratic iteration
    std::size_t no_root = 0;        // quadratic had no root in the gap; mu set to the lower end
    std::size_t bisection = 0;      // steps that fell back to bisection
    std::size_t unconverged = 0;    // hit the iteration cap
    std::size_t clamped = 0;        // iterate left the bracket and was clamped
};

// Eigenvalues of S = A1^{(x)D} - B1^{(x)D} - B1'^{(x)D} + C1^{(x)D} above `cutoff`.
struct SSpectrum {
    std::vector<Eigenvalue> lambda;  // distinct products of A1^{(x)D} above cutoff, by multiset
    std::vector<double> mu;          // mu_g in [lambda_{g+1}, lambda_g], one per gap
    double cutoff = 0.0;
    std::size_t first_unsolved = 0;  // groups g >= this have mu_g = lambda_{g+1}
    double trace_gap = 0.0;          // sum_k (lambda_k - mu_k), telescoped tail included
    double trace_sq_gap = 0.0;       // sum_k (lambda_k^2 - mu_k^2), same tail rule
    SecularStats stats;
    // residual of each solved gap: the rank-two characteristic function at mu
    // and the same function built from term magnitudes
    std::vector<std::array<double, 2>> residuals;
};

// Solves for mu. J is the per-family root count; cutoff <= 0 picks the
// default (1e-8 relative, or the bound implied by J if larger).
SSpectrum eigvals_s(double rho, int dim, int J, double cutoff = 0.0, std::size_t max_solved = 2000);

struct NullSpectrum {
    int dim = 0;
    double rho = 0.0;
    int J = 0;
    std::vector<Eigenvalue> eigs;  // strictly decreasing values
    double sum_all = 0.0;          // E(Delta)
    double sum_sq_all = 0.0;       // sum of squared eigenvalues, half the limiting variance
    double sum_trunc = 0.0;
    double sum_sq_trunc = 0.0;
    double cutoff = 0.0;
    // independent totals: stored S spectrum plus closed-form traces
    double sum_check = 0.0;
    double sum_sq_check = 0.0;
    double trace_gap = 0.0;  // sum (lambda_k - mu_k) of the S block
    SecularStats secular;

    std::size_t count() const;  // eigenvalues with multiplicity
};

// J <= 0 uses max(1000, recommended_roots(rho, dim)).
NullSpectrum build_spectrum(double rho, int dim, int J = 0);
// Smallest root count whose omitted one-dimensional eigenvalues are all
// below 1e-8 of the leading one; build_spectrum needs at least this many to
// keep every eigenvalue above the 1e-8 relative cutoff.
int recommended_roots(double rho, int dim);

}  // namespace cfcsr
