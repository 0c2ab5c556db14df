#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfcsr/patterns.hpp"

namespace cfcsr {

enum class BaselineKind { l_test, clark_evans, omega_bar };
const char* to_string(BaselineKind kind);

struct BaselineResult {
    BaselineKind name;
    double statistic = 0.0;
    std::optional<double> p_value;  // Monte Carlo calibrated, when computed
};

// Fraction of the circle of radius r around p that lies inside [0,1]^2.
double isotropic_weight(double px, double py, double r);

// Ripley's K with the isotropic edge correction on the unit square:
// (1/n^2) sum_{j != k} 1{d_jk <= r}/w_jk.
double ripley_khat(const PointPattern& pattern, double r);

// Pair distances with their two correction weights, sorted by distance, so
// K at many radii costs one pass.
class KFunction {
public:
    explicit KFunction(const PointPattern& pattern);
    double operator()(double r) const;
    std::vector<double> at(const std::vector<double>& radii) const;  // radii increasing

private:
    double n_ = 0.0;
    std::vector<double> dist_;
    std::vector<double> cum_;  // cum_[i] = sum over the first i pairs of 1/w_jk + 1/w_kj
};

double l_test_default_s(long n);
// sup over grid_size equal steps r in (0, s] of |sqrt(K(r)/pi) - r|.
BaselineResult l_test(const PointPattern& pattern, double s, int grid_size = 512);
BaselineResult l_test(const PointPattern& pattern);

// Clark-Evans z with the Donnelly edge correction for the unit square.
BaselineResult clark_evans(const PointPattern& pattern);

BaselineResult omega_bar(const PointPattern& pattern);

}  // namespace cfcsr
