#include "cfcsr/io.hpp"

#include <iomanip>
#include <ostream>

#include "cfcsr/errors.hpp"

namespace cfcsr {

using nlohmann::json;

json to_json(const TestReport& r) {
    json j;
    j["statistic"] = r.statistic;
    j["p_value"] = r.p_value;
    j["tail"] = to_string(r.tail);
    j["method"] = to_string(r.method);
    if (r.rho.size() == 1) j["rho"] = r.rho.front();
    else j["rho"] = r.rho;
    j["n"] = r.n;
    j["dim"] = r.dim;
    if (r.seed) j["seed"] = *r.seed;
    if (r.reps) j["reps"] = *r.reps;
    if (r.rho.size() > 1) {
        json per = json::array();
        for (std::size_t i = 0; i < r.rho.size(); ++i) {
            per.push_back({{"rho", r.rho[i]},
                           {"statistic", r.statistics[i]},
                           {"p_value", r.p_values[i]},
                           {"method", to_string(r.methods[i])}});
        }
        j["per_rho"] = per;
        if (r.contributing_rho) j["contributing_rho"] = *r.contributing_rho;
    }
    if (!r.warnings.empty()) j["warnings"] = r.warnings;
    return j;
}

json to_json(const SimSpec& s) {
    json j{{"kind", to_string(s.kind)}, {"n", s.n}, {"dim", s.dim}, {"seed", s.seed}};
    switch (s.kind) {
        case SimKind::matern:
            j["r"] = s.r;
            j["mu"] = s.mu;
            j["kappa"] = s.kappa;
            break;
        case SimKind::ssi: j["delta"] = s.delta; break;
        case SimKind::inhom_poisson:
            j["theta1"] = s.theta1;
            j["theta2"] = s.theta2;
            break;
        case SimKind::csr: break;
    }
    return j;
}

SimSpec sim_spec_from_json(const json& j) {
    SimSpec s;
    try {
        s.kind = sim_kind_from_string(j.at("kind").get<std::string>());
        s.n = j.at("n").get<long>();
        s.dim = j.value("dim", 2);
        s.seed = j.value("seed", std::uint64_t{0});
        s.r = j.value("r", 0.0);
        s.mu = j.value("mu", 0.0);
        s.kappa = j.value("kappa", 0.0);
        s.delta = j.value("delta", 0.0);
        s.theta1 = j.value("theta1", 1.0);
        s.theta2 = j.value("theta2", 1.0);
    } catch (const json::exception& e) {
        throw InputError(std::string("bad simulation spec: ") + e.what());
    }
    s.validate();
    return s;
}

json to_json(const NullSpectrum& s) {
    json values = json::array();
    json mult = json::array();
    for (const auto& e : s.eigs) {
        values.push_back(e.value);
        mult.push_back(e.multiplicity);
    }
    return {{"rho", s.rho},
            {"dim", s.dim},
            {"J", s.J},
            {"cutoff", s.cutoff},
            {"sum_all", s.sum_all},
            {"sum_sq_all", s.sum_sq_all},
            {"sum_trunc", s.sum_trunc},
            {"sum_sq_trunc", s.sum_sq_trunc},
            {"sum_check", s.sum_check},
            {"sum_sq_check", s.sum_sq_check},
            {"trace_gap", s.trace_gap},
            {"values", values},
            {"multiplicities", mult}};
}

void write_envelope_csv(std::ostream& out, const EnvelopeCurve& c) {
    out << "rho,delta,mean,lo95,hi95,lo99,hi99\n" << std::setprecision(10);
    for (std::size_t i = 0; i < c.rho_grid.size(); ++i) {
        out << c.rho_grid[i] << ',' << c.delta[i] << ',' << c.null_mean[i] << ',' << c.band_95[i].first << ','
            << c.band_95[i].second << ',' << c.band_99[i].first << ',' << c.band_99[i].second << '\n';
    }
}

void write_type1_csv(std::ostream& out, const std::vector<Type1Row>& rows) {
    out << "n,rho,tail,method,rejection_rate,mc_se\n" << std::setprecision(8);
    for (const auto& r : rows) {
        out << r.n << ',' << r.rho << ',' << to_string(r.tail) << ',' << to_string(r.method) << ','
            << r.rejection_rate << ',' << r.mc_se << '\n';
    }
}

void write_power_csv(std::ostream& out, const std::vector<PowerCell>& cells) {
    out << "alternative,params,n,test,power,mc_se,status\n" << std::setprecision(6);
    for (const auto& c : cells) {
        for (const auto& r : c.rows) {
            out << c.alternative << ',' << c.params << ',' << c.spec.n << ',' << r.test << ',';
            if (c.failed) out << ",,failed\n";
            else out << r.power << ',' << r.mc_se << ",ok\n";
        }
    }
}

}  // namespace cfcsr
