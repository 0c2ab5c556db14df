#include "cfcsr/patterns.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "cfcsr/errors.hpp"

namespace cfcsr {

PointPattern::PointPattern(int dim, std::vector<double> coords, std::string label)
    : dim_(dim), coords_(std::move(coords)), label_(std::move(label)) {
    if (dim_ < 1) throw InputError("point pattern dimension must be >= 1");
    if (coords_.size() % static_cast<std::size_t>(dim_) != 0)
        throw InputError("coordinate count is not a multiple of the dimension");
}

bool PointPattern::in_unit_cube() const noexcept {
    return std::all_of(coords_.begin(), coords_.end(),
                       [](double c) { return c >= 0.0 && c <= 1.0; });
}

Window Window::unit(int dim) {
    return Window{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

void Window::validate() const {
    if (lower.empty() || lower.size() != upper.size())
        throw InputError("window bounds must be non-empty and of equal dimension");
    for (std::size_t d = 0; d < lower.size(); ++d) {
        if (!(lower[d] < upper[d]) || !std::isfinite(lower[d]) || !std::isfinite(upper[d]))
            throw InputError("window lower bound must be below upper bound in every dimension");
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_double(std::string_view field, double& value) {
    if (field.empty()) return false;
    if (field.front() == '+') field.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    return ec == std::errc{} && ptr == field.data() + field.size() && std::isfinite(value);
}

}  // namespace

PointPattern load_pattern(std::istream& in, int dim) {
    if (dim < 1) throw InputError("dimension must be >= 1");
    std::vector<double> coords;
    std::string line;
    std::size_t line_no = 0;
    bool first_record = true;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = trim(line);
        if (view.empty()) continue;
        auto fields = split_fields(view);
        if (first_record) {
            first_record = false;
            double probe = 0.0;
            if (!parse_double(fields.front(), probe)) continue;  // header
        }
        if (fields.size() != static_cast<std::size_t>(dim)) {
            throw InputError("row " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                             " fields, found " + std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            double v = 0.0;
            if (!parse_double(fields[c], v)) {
                throw InputError("row " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                 ": cannot parse '" + std::string(fields[c]) + "' as a number");
            }
            coords.push_back(v);
        }
    }
    if (coords.empty()) throw InputError("no point records found");
    return PointPattern(dim, std::move(coords));
}

PointPattern load_pattern_file(const std::string& path, int dim) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    auto pattern = load_pattern(in, dim);
    auto slash = path.find_last_of('/');
    pattern.set_label(slash == std::string::npos ? path : path.substr(slash + 1));
    return pattern;
}

void write_pattern(std::ostream& out, const PointPattern& pattern) {
    char buf[32];
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        for (int d = 0; d < pattern.dim(); ++d) {
            std::snprintf(buf, sizeof buf, "%.17g", pattern.coord(i, d));
            if (d) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

PointPattern rescale_to_unit(const PointPattern& pattern, const Window& window) {
    window.validate();
    if (window.dim() != pattern.dim())
        throw InputError("window dimension does not match pattern dimension");
    const int dim = pattern.dim();
    std::vector<double> out(pattern.coords().begin(), pattern.coords().end());
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        for (int d = 0; d < dim; ++d) {
            const double x = pattern.coord(i, d);
            if (x < window.lower[d] || x > window.upper[d])
                throw InputError("point " + std::to_string(i) + " lies outside the window");
            double y = (x - window.lower[d]) / (window.upper[d] - window.lower[d]);
            out[i * dim + d] = std::clamp(y, 0.0, 1.0);
        }
    }
    return PointPattern(dim, std::move(out), pattern.label());
}

std::vector<std::pair<std::size_t, std::size_t>> duplicate_points(const PointPattern& pattern) {
    std::map<std::vector<double>, std::size_t> seen;
    std::vector<std::pair<std::size_t, std::size_t>> dups;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        auto p = pattern.point(i);
        std::vector<double> key(p.begin(), p.end());
        auto [it, inserted] = seen.emplace(std::move(key), i);
        if (!inserted) dups.emplace_back(it->second, i);
    }
    return dups;
}

void require_unit_pattern(const PointPattern& pattern, const char* context) {
    if (pattern.empty()) throw InputError(std::string(context) + ": pattern has no points");
    if (!pattern.in_unit_cube())
        throw InputError(std::string(context) + ": pattern must lie in the unit cube (rescale first)");
}

}  // namespace cfcsr
