#include "cfcsr/competing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "cfcsr/errors.hpp"
#include "cfcsr/statistic.hpp"

namespace cfcsr {

namespace {

void require_plane(const PointPattern& p, const char* what) {
    require_unit_pattern(p, what);
    if (p.dim() != 2) throw InputError(std::string(what) + " needs a two-dimensional pattern");
}

}  // namespace

const char* to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::l_test: return "l_test";
        case BaselineKind::clark_evans: return "clark_evans";
        case BaselineKind::omega_bar: return "omega_bar";
    }
    return "?";
}

double isotropic_weight(double px, double py, double r) {
    const double pi = std::acos(-1.0);
    if (!(r > 0.0)) return 1.0;
    // distances to left, bottom, right, top; adjacent sides are cyclic neighbours
    const std::array<double, 4> e{px, py, 1.0 - px, 1.0 - py};
    std::array<double, 4> a{};
    double outside = 0.0;
    for (int i = 0; i < 4; ++i) {
        a[i] = e[i] < r ? std::acos(e[i] / r) : 0.0;
        outside += 2.0 * a[i];
    }
    // arcs cut by two adjacent sides overlap when the corner is inside the circle
    for (int i = 0; i < 4; ++i) {
        const int j = (i + 1) % 4;
        if (e[i] * e[i] + e[j] * e[j] < r * r) outside -= a[i] + a[j] - 0.5 * pi;
    }
    return std::clamp(1.0 - outside / (2.0 * pi), 0.0, 1.0);
}

double ripley_khat(const PointPattern& pattern, double r) {
    require_plane(pattern, "ripley_khat");
    const std::size_t n = pattern.size();
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            if (j == k) continue;
            const double dx = pattern.coord(j, 0) - pattern.coord(k, 0);
            const double dy = pattern.coord(j, 1) - pattern.coord(k, 1);
            const double d = std::hypot(dx, dy);
            if (d <= r) sum += 1.0 / isotropic_weight(pattern.coord(j, 0), pattern.coord(j, 1), d);
        }
    }
    const double nn = static_cast<double>(n);
    return sum / (nn * nn);
}

KFunction::KFunction(const PointPattern& pattern) {
    require_plane(pattern, "KFunction");
    const std::size_t n = pattern.size();
    n_ = static_cast<double>(n);
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            const double xj = pattern.coord(j, 0), yj = pattern.coord(j, 1);
            const double xk = pattern.coord(k, 0), yk = pattern.coord(k, 1);
            const double d = std::hypot(xj - xk, yj - yk);
            pairs.emplace_back(d, 1.0 / isotropic_weight(xj, yj, d) + 1.0 / isotropic_weight(xk, yk, d));
        }
    }
    std::sort(pairs.begin(), pairs.end());
    dist_.reserve(pairs.size());
    cum_.assign(1, 0.0);
    for (const auto& [d, w] : pairs) {
        dist_.push_back(d);
        cum_.push_back(cum_.back() + w);
    }
}

double KFunction::operator()(double r) const {
    const auto it = std::upper_bound(dist_.begin(), dist_.end(), r);
    return cum_[static_cast<std::size_t>(it - dist_.begin())] / (n_ * n_);
}

std::vector<double> KFunction::at(const std::vector<double>& radii) const {
    std::vector<double> out;
    out.reserve(radii.size());
    std::size_t i = 0;
    for (double r : radii) {
        while (i < dist_.size() && dist_[i] <= r) ++i;
        out.push_back(cum_[i] / (n_ * n_));
    }
    return out;
}

double l_test_default_s(long n) {
    if (n < 1) throw InputError("n must be >= 1");
    return 1.25 / std::sqrt(static_cast<double>(n));
}

BaselineResult l_test(const PointPattern& pattern, double s, int grid_size) {
    if (!(s > 0.0)) throw InputError("L-test range s must be positive");
    if (grid_size < 1) throw InputError("grid size must be >= 1");
    const KFunction K(pattern);
    std::vector<double> radii(grid_size);
    for (int i = 0; i < grid_size; ++i) radii[i] = s * (i + 1) / grid_size;
    const auto k = K.at(radii);
    const double pi = std::acos(-1.0);
    double sup = 0.0;
    for (int i = 0; i < grid_size; ++i) sup = std::max(sup, std::fabs(std::sqrt(k[i] / pi) - radii[i]));
    return {BaselineKind::l_test, sup, std::nullopt};
}

BaselineResult l_test(const PointPattern& pattern) {
    return l_test(pattern, l_test_default_s(static_cast<long>(pattern.size())));
}

BaselineResult clark_evans(const PointPattern& pattern) {
    require_plane(pattern, "clark_evans");
    const std::size_t n = pattern.size();
    if (n < 2) throw InputError("clark_evans needs n >= 2");
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j) continue;
            const double dx = pattern.coord(j, 0) - pattern.coord(k, 0);
            const double dy = pattern.coord(j, 1) - pattern.coord(k, 1);
            best = std::min(best, dx * dx + dy * dy);
        }
        total += std::sqrt(best);
    }
    const double nn = static_cast<double>(n);
    const double area = 1.0, perimeter = 4.0;
    const double mean_nn = total / nn;
    const double expected = 0.5 * std::sqrt(area / nn) + (0.0514 + 0.041 / std::sqrt(nn)) * perimeter / nn;
    const double var = 0.070 * area / (nn * nn) + 0.037 * perimeter * std::sqrt(area) / std::pow(nn, 2.5);
    return {BaselineKind::clark_evans, (mean_nn - expected) / std::sqrt(var), std::nullopt};
}

BaselineResult omega_bar(const PointPattern& pattern) {
    return {BaselineKind::omega_bar, omega_bar_squared(pattern), std::nullopt};
}

}  // namespace cfcsr
