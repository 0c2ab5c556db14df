#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "cfcsr/experiments.hpp"
#include "cfcsr/inference.hpp"
#include "cfcsr/simulate.hpp"
#include "cfcsr/spectrum.hpp"

namespace cfcsr {

// {statistic, p_value, tail, method, rho, n, dim, seed?} plus per-rho detail.
nlohmann::json to_json(const TestReport& report);

nlohmann::json to_json(const SimSpec& spec);
// Missing kind-specific fields keep their defaults; validate() is applied.
SimSpec sim_spec_from_json(const nlohmann::json& j);

// Eigenvalues with multiplicities and the trace bookkeeping.
nlohmann::json to_json(const NullSpectrum& spectrum);

// rho,delta,mean,lo95,hi95,lo99,hi99
void write_envelope_csv(std::ostream& out, const EnvelopeCurve& curve);
// n,rho,tail,method,rejection_rate,mc_se
void write_type1_csv(std::ostream& out, const std::vector<Type1Row>& rows);
// alternative,params,n,test,power,mc_se (failed cells carry status failed)
void write_power_csv(std::ostream& out, const std::vector<PowerCell>& cells);

}  // namespace cfcsr
