#include "cfcsr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cfcsr/competing.hpp"
#include "cfcsr/errors.hpp"
#include "cfcsr/statistic.hpp"

namespace cfcsr {

namespace {

constexpr std::uint64_t kNullStream = 0x9E3779B97F4A7C15ULL;

double binomial_se(double p, long reps) { return std::sqrt(p * (1.0 - p) / static_cast<double>(reps)); }

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

// statistics computed for every pattern of the power study
struct StatPlan {
    std::vector<double> cf_rhos;
    std::vector<double> omnibus_rhos;
    std::vector<double> all_rhos;  // cf then omnibus

    std::vector<double> operator()(const PointPattern& p) const {
        CfDistanceCache cache(p);
        std::vector<double> out = cache.statistic(all_rhos);
        out.push_back(omega_bar_squared(p));
        out.push_back(l_test(p).statistic);
        out.push_back(clark_evans(p).statistic);
        return out;
    }
    std::size_t omega_index() const { return all_rhos.size(); }
    std::size_t l_index() const { return all_rhos.size() + 1; }
    std::size_t ce_index() const { return all_rhos.size() + 2; }
};

// two-sided Monte Carlo p-value against a sorted null sample
double mc_two_sided(const std::vector<double>& sorted, double x) {
    const double m = static_cast<double>(sorted.size());
    const auto ge = sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), x);
    const auto le = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
    const double upper = (1.0 + static_cast<double>(ge)) / (m + 1.0);
    const double lower = (1.0 + static_cast<double>(le)) / (m + 1.0);
    return std::min(1.0, 2.0 * std::min(lower, upper));
}

std::string alternative_name(SimKind kind) {
    switch (kind) {
        case SimKind::matern: return "matern";
        case SimKind::ssi: return "ssi";
        case SimKind::inhom_poisson: return "inhom_poisson";
        default: return "csr";
    }
}

std::string params_of(const SimSpec& s) {
    switch (s.kind) {
        case SimKind::matern: return "r=" + fmt(s.r) + ";mu=" + fmt(s.mu) + ";kappa=" + fmt(s.kappa);
        case SimKind::ssi: return "delta=" + fmt(s.delta);
        case SimKind::inhom_poisson: return "theta1=" + fmt(s.theta1) + ";theta2=" + fmt(s.theta2);
        default: return "";
    }
}

}  // namespace

std::vector<double> type1_rhos(long n) {
    const double h = std::acos(-1.0) * std::sqrt(static_cast<double>(n));
    return {1.0, 0.5 * h, h, 2.0 * h};
}

std::vector<Type1Row> type1_study(const Type1Config& config) {
    if (!(config.alpha >= 0.0 && config.alpha < 1.0)) throw InputError("alpha must lie in [0,1)");
    if (config.reps < 1) throw InputError("reps must be at least 1");
    std::vector<Type1Row> rows;
    for (long n : config.ns) {
        const std::vector<double> rhos = config.rhos.empty() ? type1_rhos(n) : config.rhos;
        const long reps = config.reps;
        std::vector<std::vector<double>> stats(reps);
#pragma omp parallel for schedule(dynamic, 16)
        for (long i = 0; i < reps; ++i) {
            Rng rng = make_rng(config.seed + static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i));
            stats[i] = CfDistanceCache(sim_csr(n, config.dim, rng)).statistic(rhos);
        }
        for (std::size_t k = 0; k < rhos.size(); ++k) {
            NullDistribution null(rhos[k], n, config.dim, config.null);
            double lo = -std::numeric_limits<double>::infinity();
            double hi = std::numeric_limits<double>::infinity();
            if (config.alpha > 0.0) {
                lo = null.quantile(config.alpha / 2.0);
                hi = null.quantile(1.0 - config.alpha / 2.0);
            }
            long below = 0, above = 0;
            for (const auto& s : stats) {
                below += s[k] < lo;
                above += s[k] > hi;
            }
            const auto add = [&](Tail tail, long count) {
                const double rate = static_cast<double>(count) / static_cast<double>(reps);
                rows.push_back({n, rhos[k], tail, null.method(), rate, binomial_se(rate, reps), reps});
            };
            add(Tail::two_sided, below + above);
            add(Tail::lower, below);
            add(Tail::upper, above);
        }
    }
    return rows;
}

std::vector<SimSpec> power_study_cells(std::uint64_t seed) {
    std::vector<SimSpec> cells;
    for (long n : {25L, 75L}) {
        for (double r : {0.075, 0.15, 0.30}) cells.push_back(matern_study_spec(n, r));
        const std::vector<double> deltas = n == 25 ? std::vector<double>{0.05, 0.06, 0.07}
                                                   : std::vector<double>{0.015, 0.02, 0.025};
        for (double d : deltas) {
            SimSpec s;
            s.kind = SimKind::ssi;
            s.n = n;
            s.delta = d;
            cells.push_back(s);
        }
        for (auto [t1, t2] : {std::pair{1.0, 4.0}, std::pair{4.0, 4.0}, std::pair{4.0, 10.0}}) {
            SimSpec s;
            s.kind = SimKind::inhom_poisson;
            s.n = n;
            s.theta1 = t1;
            s.theta2 = t2;
            cells.push_back(s);
        }
    }
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i].seed = seed + 1 + i;
    return cells;
}

std::string cf_test_name(double rho) { return "cf_rho" + fmt(rho); }

std::size_t PowerCell::index(const std::string& test) const {
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].test == test) return i;
    throw InputError("no test named '" + test + "' in the power table");
}

const PowerRow& PowerCell::row(const std::string& test) const { return rows[index(test)]; }

double PowerCell::paired_se(const std::string& a, const std::string& b) const {
    const auto& ra = rejections[index(a)];
    const auto& rb = rejections[index(b)];
    const double m = static_cast<double>(ra.size());
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const double d = static_cast<double>(ra[i]) - static_cast<double>(rb[i]);
        sum += d;
        sum_sq += d * d;
    }
    const double mean = sum / m;
    return std::sqrt(std::max(0.0, sum_sq / m - mean * mean) / m);
}

std::vector<PowerCell> power_study(const PowerConfig& config) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw InputError("alpha must lie in (0,1)");
    if (config.reps < 1) throw InputError("reps must be at least 1");
    if (config.null_reps < 1000) throw InputError("null_reps must be at least 1000");
    const std::vector<SimSpec> cells = config.cells.empty() ? power_study_cells(config.seed) : config.cells;

    std::vector<long> ns;
    for (const auto& c : cells) {
        c.validate();
        if (c.dim != 2) throw InputError("power study cells must be two-dimensional");
        if (std::find(ns.begin(), ns.end(), c.n) == ns.end()) ns.push_back(c.n);
    }

    std::vector<PowerCell> out;
    for (long n : ns) {
        StatPlan plan;
        plan.cf_rhos = config.cf_rhos;
        plan.omnibus_rhos = config.omnibus_rhos.empty() ? config.cf_rhos : config.omnibus_rhos;
        if (config.omnibus_default_rhos) plan.omnibus_rhos = default_rhos(n, 2);
        plan.all_rhos = plan.cf_rhos;
        plan.all_rhos.insert(plan.all_rhos.end(), plan.omnibus_rhos.begin(), plan.omnibus_rhos.end());
        const std::size_t n_stats = plan.ce_index() + 1;

        // null sample of every statistic, replicate i from stream i
        std::vector<std::vector<double>> null_stats(config.null_reps);
#pragma omp parallel for schedule(dynamic, 16)
        for (long i = 0; i < config.null_reps; ++i) {
            Rng rng = make_rng(config.seed ^ kNullStream, static_cast<std::uint64_t>(n) << 32 | static_cast<std::uint64_t>(i));
            null_stats[i] = plan(sim_csr(n, 2, rng));
        }
        std::vector<std::vector<double>> sorted(n_stats, std::vector<double>(config.null_reps));
        for (std::size_t s = 0; s < n_stats; ++s) {
            for (long i = 0; i < config.null_reps; ++i) sorted[s][i] = null_stats[i][s];
            std::sort(sorted[s].begin(), sorted[s].end());
        }
        std::vector<CriticalValues> crit(n_stats);
        for (std::size_t s = 0; s < n_stats; ++s) {
            crit[s] = {empirical_quantile(sorted[s], config.alpha / 2.0),
                       empirical_quantile(sorted[s], 1.0 - config.alpha / 2.0)};
        }
        const double l_upper = empirical_quantile(sorted[plan.l_index()], 1.0 - config.alpha);

        for (const auto& spec : cells) {
            if (spec.n != n) continue;
            PowerCell cell;
            cell.spec = spec;
            cell.alternative = alternative_name(spec.kind);
            cell.params = params_of(spec);
            std::vector<std::string> names;
            for (double r : plan.cf_rhos) names.push_back(cf_test_name(r));
            names.insert(names.end(), {"omnibus", "omega_bar", "l_test", "clark_evans"});
            const std::size_t n_tests = names.size();
            cell.rejections.assign(n_tests, std::vector<std::uint8_t>(config.reps, 0));

            std::string failure;
            const auto two_sided = [&](std::size_t s, double x) { return x < crit[s].lower || x > crit[s].upper; };
#pragma omp parallel for schedule(dynamic, 8)
            for (long i = 0; i < config.reps; ++i) {
                std::vector<double> st;
                try {
                    st = plan(simulate(spec, static_cast<std::uint64_t>(i)));
                } catch (const std::exception& e) {
#pragma omp critical
                    failure = e.what();
                    continue;
                }
                std::size_t t = 0;
                for (std::size_t k = 0; k < plan.cf_rhos.size(); ++k) cell.rejections[t++][i] = two_sided(k, st[k]);
                std::vector<double> ps;
                for (std::size_t k = 0; k < plan.omnibus_rhos.size(); ++k) {
                    const std::size_t s = plan.cf_rhos.size() + k;
                    ps.push_back(mc_two_sided(sorted[s], st[s]));
                }
                cell.rejections[t++][i] = bonferroni(ps) <= config.alpha;
                cell.rejections[t++][i] = two_sided(plan.omega_index(), st[plan.omega_index()]);
                cell.rejections[t++][i] = st[plan.l_index()] > l_upper;
                cell.rejections[t++][i] = two_sided(plan.ce_index(), st[plan.ce_index()]);
            }
            if (!failure.empty()) {
                cell.failed = true;
                cell.error = failure;
            }
            for (std::size_t t = 0; t < n_tests; ++t) {
                long hits = 0;
                for (auto r : cell.rejections[t]) hits += r;
                const double p = static_cast<double>(hits) / static_cast<double>(config.reps);
                cell.rows.push_back({names[t], p, binomial_se(p, config.reps)});
            }
            out.push_back(std::move(cell));
        }
    }
    return out;
}

}  // namespace cfcsr
