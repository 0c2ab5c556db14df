#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cfcsr {

// n points in D dimensions, stored row-major. After rescale_to_unit() every
// coordinate lies in [0,1]; patterns straight out of load_pattern() are still
// in data units.
class PointPattern {
public:
    PointPattern() = default;
    PointPattern(int dim, std::vector<double> coords, std::string label = {});

    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ > 0 ? coords_.size() / dim_ : 0; }
    bool empty() const noexcept { return coords_.empty(); }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }
    double coord(std::size_t i, int d) const { return coords_[i * dim_ + d]; }
    std::span<const double> coords() const noexcept { return coords_; }

    const std::string& label() const noexcept { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    bool in_unit_cube() const noexcept;

    friend bool operator==(const PointPattern&, const PointPattern&) = default;

private:
    int dim_ = 0;
    std::vector<double> coords_;
    std::string label_;
};

// Closed axis-aligned box in data units.
struct Window {
    std::vector<double> lower;
    std::vector<double> upper;

    static Window unit(int dim);
    int dim() const noexcept { return static_cast<int>(lower.size()); }
    void validate() const;
};

// Reads comma-separated records of `dim` numeric fields. A single leading
// header line is skipped when its first field is not numeric. Blank lines are
// ignored. Throws InputError naming the 1-based row and column of a bad field.
PointPattern load_pattern(std::istream& in, int dim);
PointPattern load_pattern_file(const std::string& path, int dim);

// Writes one point per line with 17 significant digits, so that
// load_pattern(write_pattern(p)) reproduces p exactly.
void write_pattern(std::ostream& out, const PointPattern& pattern);

// Maps the window linearly onto [0,1]^D. Throws InputError naming the first
// point outside the (closed) window.
PointPattern rescale_to_unit(const PointPattern& pattern, const Window& window);

// Index pairs (i<j) of points with identical coordinates.
std::vector<std::pair<std::size_t, std::size_t>> duplicate_points(const PointPattern& pattern);

// Throws InputError unless the pattern is non-empty and inside [0,1]^D.
void require_unit_pattern(const PointPattern& pattern, const char* context);

}  // namespace cfcsr
