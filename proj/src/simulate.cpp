#include "cfcsr/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cfcsr/errors.hpp"

namespace cfcsr {

namespace {

constexpr long kMaternTries = 1000000;
constexpr long kSsiProposals = 1000000;

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x9e3779b9u};
    return Rng(seq);
}

const char* to_string(SimKind kind) {
    switch (kind) {
        case SimKind::csr: return "csr";
        case SimKind::matern: return "matern";
        case SimKind::ssi: return "ssi";
        case SimKind::inhom_poisson: return "inhom_poisson";
    }
    return "?";
}

SimKind sim_kind_from_string(const std::string& name) {
    if (name == "csr") return SimKind::csr;
    if (name == "matern") return SimKind::matern;
    if (name == "ssi") return SimKind::ssi;
    if (name == "inhom_poisson" || name == "inhom") return SimKind::inhom_poisson;
    throw InputError("unknown process '" + name + "'");
}

void SimSpec::validate() const {
    if (n < 1) throw InputError("n must be >= 1");
    if (dim < 1) throw InputError("dimension must be >= 1");
    switch (kind) {
        case SimKind::csr: break;
        case SimKind::matern:
            if (dim != 2) throw InputError("Matern process is two-dimensional");
            if (!(r > 0.0 && mu > 0.0 && kappa > 0.0)) throw InputError("Matern needs r, mu, kappa > 0");
            break;
        case SimKind::ssi:
            if (dim != 2) throw InputError("SSI process is two-dimensional");
            if (!(delta > 0.0)) throw InputError("SSI needs delta > 0");
            break;
        case SimKind::inhom_poisson:
            if (dim != 2) throw InputError("inhomogeneous Poisson process is two-dimensional");
            if (!(theta1 >= 1.0 && theta2 >= 1.0)) throw InputError("theta1, theta2 must be >= 1");
            break;
    }
}

std::string SimSpec::describe() const {
    std::ostringstream os;
    os << to_string(kind);
    switch (kind) {
        case SimKind::csr: break;
        case SimKind::matern: os << " r=" << r << " mu=" << mu << " kappa=" << kappa; break;
        case SimKind::ssi: os << " delta=" << delta; break;
        case SimKind::inhom_poisson: os << " theta=(" << theta1 << "," << theta2 << ")"; break;
    }
    return os.str();
}

SimSpec matern_study_spec(long n, double r) {
    double e;
    if (std::fabs(r - 0.075) < 1e-12) e = 0.25;
    else if (std::fabs(r - 0.15) < 1e-12) e = 1.0 / 3.0;
    else if (std::fabs(r - 0.30) < 1e-12) e = 0.5;
    else throw InputError("cluster radius must be 0.075, 0.15 or 0.30");
    SimSpec s;
    s.kind = SimKind::matern;
    s.n = n;
    s.r = r;
    s.mu = std::pow(static_cast<double>(n), e);
    s.kappa = std::pow(static_cast<double>(n), 1.0 - e);
    return s;
}

PointPattern sim_csr(long n, int dim, Rng& rng) {
    if (n < 1 || dim < 1) throw InputError("sim_csr needs n >= 1 and dim >= 1");
    std::vector<double> c(static_cast<std::size_t>(n) * dim);
    for (double& v : c) v = uniform01(rng);
    return PointPattern(dim, std::move(c));
}

PointPattern sim_matern(long n, double mu, double kappa, double r, Rng& rng) {
    SimSpec{SimKind::matern, n, 2, r, mu, kappa}.validate();
    std::poisson_distribution<long> parents(kappa), offspring(mu);
    const double two_pi = 2.0 * std::acos(-1.0);
    std::vector<double> c;
    c.reserve(2 * static_cast<std::size_t>(n));
    for (long attempt = 0; attempt < kMaternTries; ++attempt) {
        c.clear();
        const long np = parents(rng);
        bool over = false;
        for (long p = 0; p < np && !over; ++p) {
            const double px = uniform01(rng), py = uniform01(rng);
            const long k = offspring(rng);
            for (long j = 0; j < k; ++j) {
                const double rad = r * std::sqrt(uniform01(rng));
                const double ang = two_pi * uniform01(rng);
                const double x = px + rad * std::cos(ang), y = py + rad * std::sin(ang);
                if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) continue;
                if (static_cast<long>(c.size() / 2) == n) {
                    over = true;
                    break;
                }
                c.push_back(x);
                c.push_back(y);
            }
        }
        if (!over && static_cast<long>(c.size() / 2) == n) return PointPattern(2, c);
    }
    std::ostringstream os;
    os << "Matern process with n=" << n << " mu=" << mu << " kappa=" << kappa << " r=" << r
       << " did not hit the sample size in " << kMaternTries << " tries";
    throw InfeasibleError(os.str());
}

PointPattern sim_ssi(long n, double delta, Rng& rng) {
    SimSpec s;
    s.kind = SimKind::ssi;
    s.n = n;
    s.delta = delta;
    s.validate();
    const double d2 = delta * delta;
    std::vector<double> c;
    c.reserve(2 * static_cast<std::size_t>(n));
    long proposals = 0;
    while (static_cast<long>(c.size() / 2) < n) {
        if (++proposals > kSsiProposals) {
            std::ostringstream os;
            os << "packing infeasible: SSI with n=" << n << " delta=" << delta << " exceeded " << kSsiProposals
               << " proposals";
            throw InfeasibleError(os.str());
        }
        const double x = uniform01(rng), y = uniform01(rng);
        bool ok = true;
        for (std::size_t i = 0; i < c.size() && ok; i += 2) {
            const double dx = c[i] - x, dy = c[i + 1] - y;
            ok = dx * dx + dy * dy >= d2;
        }
        if (ok) {
            c.push_back(x);
            c.push_back(y);
        }
    }
    return PointPattern(2, c);
}

PointPattern sim_inhom(long n, double theta1, double theta2, Rng& rng) {
    SimSpec s;
    s.kind = SimKind::inhom_poisson;
    s.n = n;
    s.theta1 = theta1;
    s.theta2 = theta2;
    s.validate();
    const double top = theta1 * theta2;
    std::vector<double> c;
    c.reserve(2 * static_cast<std::size_t>(n));
    while (static_cast<long>(c.size() / 2) < n) {
        const double x = uniform01(rng), y = uniform01(rng);
        const double lam = (theta1 - (theta1 - 1.0) * x) * (theta2 - (theta2 - 1.0) * y);
        if (uniform01(rng) * top <= lam) {
            c.push_back(x);
            c.push_back(y);
        }
    }
    return PointPattern(2, c);
}

PointPattern simulate(const SimSpec& spec, std::uint64_t stream) {
    spec.validate();
    Rng rng = make_rng(spec.seed, stream);
    PointPattern p;
    switch (spec.kind) {
        case SimKind::csr: p = sim_csr(spec.n, spec.dim, rng); break;
        case SimKind::matern: p = sim_matern(spec.n, spec.mu, spec.kappa, spec.r, rng); break;
        case SimKind::ssi: p = sim_ssi(spec.n, spec.delta, rng); break;
        case SimKind::inhom_poisson: p = sim_inhom(spec.n, spec.theta1, spec.theta2, rng); break;
    }
    p.set_label(spec.describe());
    return p;
}

std::vector<double> mc_null_sample(const PatternStatistic& stat, long n, int dim, long reps, std::uint64_t seed) {
    if (reps < 1) throw InputError("reps must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(reps));
    std::string failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < reps; ++i) {
        try {
            Rng rng = make_rng(seed, static_cast<std::uint64_t>(i));
            out[i] = stat(sim_csr(n, dim, rng));
        } catch (const std::exception& e) {
#pragma omp critical
            failure = e.what();
        }
    }
    if (!failure.empty()) throw NumericError("Monte Carlo replicate failed: " + failure);
    return out;
}

double empirical_quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw InputError("empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("probability must lie in [0,1]");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

CriticalValues mc_critical_values(const PatternStatistic& stat, long n, int dim, double alpha, long reps,
                                  std::uint64_t seed) {
    if (reps < 1000) throw InputError("mc_critical_values needs reps >= 1000");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0,1)");
    auto sample = mc_null_sample(stat, n, dim, reps, seed);
    std::sort(sample.begin(), sample.end());
    return {empirical_quantile(sample, 0.5 * alpha), empirical_quantile(sample, 1.0 - 0.5 * alpha)};
}

}  // namespace cfcsr
