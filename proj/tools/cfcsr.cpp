#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfcsr/errors.hpp"
#include "cfcsr/experiments.hpp"
#include "cfcsr/imhof.hpp"
#include "cfcsr/inference.hpp"
#include "cfcsr/io.hpp"
#include "cfcsr/null_moments.hpp"
#include "cfcsr/patterns.hpp"
#include "cfcsr/simulate.hpp"
#include "cfcsr/spectrum.hpp"

using namespace cfcsr;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInput = 2, kNumeric = 3, kInfeasible = 4 };

struct Common {
    std::string output;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::string method = "auto";
    bool no_adjust = false;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("CFCSR_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw InputError(std::string("CFCSR_SEED is not an unsigned integer: ") + env);
        }
    }
    return 20240101;
}

// Opens the output only once the result exists, so failures leave no file.
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

PointPattern read_input(const std::string& path, int dim, const std::vector<double>& window) {
    PointPattern raw = load_pattern_file(path, dim);
    Window w = Window::unit(dim);
    if (!window.empty()) {
        if (window.size() != static_cast<std::size_t>(2 * dim))
            throw InputError("--window needs 2*dim numbers: lower and upper per coordinate");
        for (int d = 0; d < dim; ++d) {
            w.lower[d] = window[2 * d];
            w.upper[d] = window[2 * d + 1];
        }
    }
    return rescale_to_unit(raw, w);
}

TestOptions options_from(const Common& c, long reps) {
    TestOptions o;
    o.method = method_from_string(c.method);
    o.reps = reps;
    o.seed = resolve_seed(c.seed);
    o.adjust_variance = !c.no_adjust;
    return o;
}

void add_common(CLI::App* cmd, Common& c, bool with_format) {
    cmd->add_option("-o,--output", c.output, "output file (default stdout)");
    cmd->add_option("--seed", c.seed, "random seed (default $CFCSR_SEED or 20240101)");
    if (with_format) cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

std::string omnibus_label(const PowerConfig& c) {
    if (c.omnibus_default_rhos) return "default";
    const auto& r = c.omnibus_rhos.empty() ? c.cf_rhos : c.omnibus_rhos;
    std::ostringstream os;
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? ";" : "") << r[i];
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Characteristic-function tests for complete spatial randomness"};
    app.require_subcommand(1);

    // test
    Common test_c;
    std::string test_input;
    int test_dim = 2;
    std::vector<double> test_window;
    double test_rho = 1.0;
    bool test_omnibus = false;
    std::vector<double> test_rhos;
    std::string test_tail = "two";
    long test_reps = 2000;
    auto* test = app.add_subcommand("test", "CF test of one pattern");
    test->add_option("-i,--input", test_input, "pattern CSV")->required();
    test->add_option("--dim", test_dim, "coordinates per point")->check(CLI::Range(1, 3));
    test->add_option("--window", test_window, "lower,upper per coordinate (default unit cube)")->delimiter(',');
    test->add_option("--rho", test_rho, "resolution")->check(CLI::PositiveNumber);
    test->add_flag("--omnibus", test_omnibus, "Bonferroni test over the default rho triple");
    test->add_option("--rhos", test_rhos, "omnibus resolutions")->delimiter(',');
    test->add_option("--tail", test_tail, "two, upper or lower")->check(CLI::IsMember({"two", "two_sided", "upper", "lower"}));
    test->add_option("--method", test_c.method, "auto, imhof, high_rho or monte_carlo");
    test->add_option("--reps", test_reps, "Monte Carlo replicates")->check(CLI::PositiveNumber);
    test->add_flag("--no-adjust", test_c.no_adjust, "use the asymptotic variance as is");
    add_common(test, test_c, false);

    // envelope
    Common env_c;
    std::string env_input;
    int env_dim = 2;
    std::vector<double> env_window, env_grid;
    int env_points = 64;
    auto* env = app.add_subcommand("envelope", "Delta(rho) with 95% and 99% null bands");
    env->add_option("-i,--input", env_input, "pattern CSV")->required();
    env->add_option("--dim", env_dim)->check(CLI::Range(1, 3));
    env->add_option("--window", env_window)->delimiter(',');
    env->add_option("--grid", env_grid, "explicit increasing rho grid")->delimiter(',');
    env->add_option("--points", env_points, "log-spaced points on [1, 2 pi n^{1/2}]")->check(CLI::Range(2, 100000));
    env->add_option("--method", env_c.method);
    env->add_flag("--no-adjust", env_c.no_adjust);
    add_common(env, env_c, true);

    // nulldist
    Common nd_c;
    double nd_rho = 1.0;
    long nd_n = 100;
    int nd_dim = 2;
    std::vector<double> nd_p, nd_x;
    std::string nd_spectrum;
    auto* nd = app.add_subcommand("nulldist", "null CDF values and quantiles");
    nd->add_option("--rho", nd_rho)->check(CLI::PositiveNumber);
    nd->add_option("--n", nd_n)->check(CLI::Range(2L, 100000000L));
    nd->add_option("--dim", nd_dim)->check(CLI::Range(1, 3));
    nd->add_option("--p", nd_p, "probabilities for quantiles")->delimiter(',');
    nd->add_option("--x", nd_x, "points for the CDF")->delimiter(',');
    nd->add_option("--method", nd_c.method);
    nd->add_flag("--no-adjust", nd_c.no_adjust);
    nd->add_option("--spectrum", nd_spectrum, "also write the eigenvalue list as JSON");
    add_common(nd, nd_c, false);

    // simulate
    Common sim_c;
    SimSpec sim;
    std::string sim_kind = "csr", sim_spec_file, sim_spec_out;
    long sim_stream = 0;
    auto* simc = app.add_subcommand("simulate", "draw one pattern");
    simc->add_option("--kind", sim_kind, "csr, matern, ssi or inhom_poisson");
    simc->add_option("--n", sim.n);
    simc->add_option("--dim", sim.dim);
    simc->add_option("--r", sim.r, "matern cluster radius");
    simc->add_option("--mu", sim.mu, "matern mean offspring (default: study triple for r)");
    simc->add_option("--kappa", sim.kappa, "matern parent intensity");
    simc->add_option("--delta", sim.delta, "ssi inhibition distance");
    simc->add_option("--theta1", sim.theta1);
    simc->add_option("--theta2", sim.theta2);
    simc->add_option("--stream", sim_stream, "replicate index");
    simc->add_option("--spec", sim_spec_file, "read the spec from JSON instead");
    simc->add_option("--spec-out", sim_spec_out, "write the resolved spec as JSON");
    add_common(simc, sim_c, false);

    // type1
    Common t1_c;
    Type1Config t1;
    bool t1_full = false;
    auto* t1c = app.add_subcommand("type1", "type I error rates under CSR");
    t1c->add_option("--n", t1.ns, "sample sizes")->delimiter(',');
    t1c->add_option("--rho", t1.rhos, "resolutions (default 1, pi n^.5/2, pi n^.5, 2 pi n^.5)")->delimiter(',');
    t1c->add_option("--alpha", t1.alpha)->check(CLI::Range(0.0, 0.999999));
    t1c->add_option("--reps", t1.reps)->check(CLI::PositiveNumber);
    t1c->add_option("--method", t1_c.method);
    t1c->add_flag("--no-adjust", t1_c.no_adjust);
    t1c->add_flag("--full-scale", t1_full, "5e4 replicates");
    add_common(t1c, t1_c, true);

    // power
    Common pw_c;
    PowerConfig pw;
    bool pw_full = false;
    auto* pwc = app.add_subcommand("power", "power against the clustered, regular and inhomogeneous alternatives");
    pwc->add_option("--reps", pw.reps, "replicates per cell")->check(CLI::PositiveNumber);
    pwc->add_option("--null-reps", pw.null_reps, "CSR replicates for thresholds")->check(CLI::Range(1000L, 100000000L));
    pwc->add_option("--alpha", pw.alpha)->check(CLI::Range(0.000001, 0.999999));
    pwc->add_option("--cf-rho", pw.cf_rhos, "CF resolutions")->delimiter(',');
    pwc->add_option("--omnibus-rho", pw.omnibus_rhos, "omnibus resolutions (default: the CF resolutions)")->delimiter(',');
    pwc->add_flag("--omnibus-default", pw.omnibus_default_rhos, "omnibus over 1, (2 pi n^.5)^.5, 2 pi n^.5 per cell");
    pwc->add_flag("--full-scale", pw_full, "2e4 replicates per cell, 5e4 for thresholds");
    add_common(pwc, pw_c, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    try {
        if (*test) {
            const PointPattern p = read_input(test_input, test_dim, test_window);
            const TestOptions o = options_from(test_c, test_reps);
            TestReport r = test_omnibus || !test_rhos.empty() ? omnibus_test(p, test_rhos, o)
                                                              : cf_test(p, test_rho, tail_from_string(test_tail), o);
            json j = to_json(r);
            j["input"] = test_input;
            for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
            emit(test_c.output, j.dump(2) + "\n");
        } else if (*env) {
            const PointPattern p = read_input(env_input, env_dim, env_window);
            std::vector<double> grid = env_grid.empty() ? default_envelope_grid(static_cast<long>(p.size()), env_points)
                                                        : env_grid;
            const EnvelopeCurve c = envelope(p, grid, options_from(env_c, 2000));
            std::ostringstream os;
            if (env_c.format == "json") {
                json j{{"input", env_input}, {"n", p.size()}, {"dim", p.dim()}, {"rho", c.rho_grid},
                       {"delta", c.delta}, {"mean", c.null_mean}};
                json methods = json::array();
                for (auto m : c.method) methods.push_back(to_string(m));
                j["method"] = methods;
                j["band_95"] = c.band_95;
                j["band_99"] = c.band_99;
                os << j.dump(2) << '\n';
            } else {
                os << "# input=" << env_input << " n=" << p.size() << " dim=" << p.dim() << '\n';
                write_envelope_csv(os, c);
            }
            emit(env_c.output, os.str());
        } else if (*nd) {
            const TestOptions o = options_from(nd_c, 2000);
            NullDistribution null(nd_rho, nd_n, nd_dim, o);
            json j{{"rho", nd_rho},
                   {"n", nd_n},
                   {"dim", nd_dim},
                   {"method", to_string(null.method())},
                   {"mean", null.mean()},
                   {"variance", null_variance(nd_rho, nd_dim, nd_n)}};
            if (null.method() == NullMethod::monte_carlo) j["seed"] = o.seed;
            json qs = json::array(), cs = json::array();
            for (double p : nd_p) qs.push_back({{"p", p}, {"quantile", null.quantile(p)}});
            for (double x : nd_x) cs.push_back({{"x", x}, {"cdf", null.cdf(x)}});
            j["quantiles"] = qs;
            j["cdf"] = cs;
            if (!null.warnings().empty()) j["warnings"] = null.warnings();
            if (!nd_spectrum.empty()) emit(nd_spectrum, to_json(build_spectrum(nd_rho, nd_dim)).dump() + "\n");
            emit(nd_c.output, j.dump(2) + "\n");
        } else if (*simc) {
            SimSpec spec = sim;
            if (!sim_spec_file.empty()) {
                std::ifstream in(sim_spec_file);
                if (!in) throw InputError("cannot read '" + sim_spec_file + "'");
                json j;
                try {
                    in >> j;
                } catch (const json::exception& e) {
                    throw InputError(std::string("bad JSON in spec file: ") + e.what());
                }
                spec = sim_spec_from_json(j);
                if (sim_c.seed) spec.seed = *sim_c.seed;
            } else {
                spec.kind = sim_kind_from_string(sim_kind);
                if (spec.kind == SimKind::matern && spec.mu == 0.0 && spec.kappa == 0.0) {
                    const SimSpec triple = matern_study_spec(spec.n, spec.r);
                    spec.mu = triple.mu;
                    spec.kappa = triple.kappa;
                }
                spec.seed = resolve_seed(sim_c.seed);
                spec.validate();
            }
            const PointPattern p = simulate(spec, static_cast<std::uint64_t>(sim_stream));
            std::ostringstream os;
            write_pattern(os, p);
            if (!sim_spec_out.empty()) {
                json j = to_json(spec);
                j["stream"] = sim_stream;
                emit(sim_spec_out, j.dump(2) + "\n");
            }
            emit(sim_c.output, os.str());
        } else if (*t1c) {
            if (t1_full) t1.reps = 50000;
            t1.seed = resolve_seed(t1_c.seed);
            t1.null = options_from(t1_c, 2000);
            const auto rows = type1_study(t1);
            std::ostringstream os;
            if (t1_c.format == "json") {
                json arr = json::array();
                for (const auto& r : rows)
                    arr.push_back({{"n", r.n}, {"rho", r.rho}, {"tail", to_string(r.tail)},
                                   {"method", to_string(r.method)}, {"rejection_rate", r.rejection_rate},
                                   {"mc_se", r.mc_se}});
                os << json{{"alpha", t1.alpha}, {"reps", t1.reps}, {"seed", t1.seed}, {"rows", arr}}.dump(2) << '\n';
            } else {
                os << "# alpha=" << t1.alpha << " reps=" << t1.reps << " seed=" << t1.seed << '\n';
                write_type1_csv(os, rows);
            }
            emit(t1_c.output, os.str());
        } else if (*pwc) {
            if (pw_full) {
                pw.reps = 20000;
                pw.null_reps = 50000;
            }
            pw.seed = resolve_seed(pw_c.seed);
            const auto cells = power_study(pw);
            std::ostringstream os;
            if (pw_c.format == "json") {
                json arr = json::array();
                for (const auto& c : cells) {
                    json rows = json::array();
                    for (const auto& r : c.rows) rows.push_back({{"test", r.test}, {"power", r.power}, {"mc_se", r.mc_se}});
                    json cell{{"alternative", c.alternative}, {"params", c.params}, {"n", c.spec.n},
                              {"failed", c.failed}, {"rows", rows}};
                    if (c.failed) cell["error"] = c.error;
                    arr.push_back(cell);
                }
                os << json{{"alpha", pw.alpha}, {"reps", pw.reps}, {"null_reps", pw.null_reps}, {"seed", pw.seed},
                           {"omnibus", omnibus_label(pw)}, {"cells", arr}}.dump(2) << '\n';
            } else {
                os << "# alpha=" << pw.alpha << " reps=" << pw.reps << " null_reps=" << pw.null_reps
                   << " seed=" << pw.seed << " omnibus=" << omnibus_label(pw) << '\n';
                write_power_csv(os, cells);
            }
            for (const auto& c : cells)
                if (c.failed) std::cerr << "cell " << c.alternative << ' ' << c.params << " failed: " << c.error << '\n';
            emit(pw_c.output, os.str());
        }
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInput;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible simulation: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumeric;
    }
    return kOk;
}
