#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace markcorr {

struct MarkSummary {
    double mean = 0.0;
    double variance = 0.0; // divisor N-1
};

// Locations in a rectangular window, one real-valued mark per point.
// Immutable after construction.
class MarkedPointPattern {
public:
    MarkedPointPattern(Window window, std::vector<Point> points, std::vector<double> marks);

    const Window& window() const { return window_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<Point>& points() const { return points_; }
    const std::vector<double>& marks() const { return marks_; }
    Point point(std::size_t i) const { return points_[i]; }
    double mark(std::size_t i) const { return marks_[i]; }

    // Ingestion notes (duplicate locations etc.); never fatal.
    const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

private:
    Window window_;
    std::vector<Point> points_;
    std::vector<double> marks_;
    std::vector<std::string> warnings_;
};

// CSV with header `x,y,mark`, `#` comment lines ignored.
MarkedPointPattern read_pattern(const std::string& path, const Window& window);
// Window inferred as the tight bounding box of the data (degenerate axes are
// padded by 0.5 on each side); needs at least one row.
MarkedPointPattern read_pattern_auto(const std::string& path);
void write_pattern(const MarkedPointPattern& pattern, const std::string& path);

MarkSummary mark_summary(const MarkedPointPattern& pattern);

// Same locations, marks uniformly permuted; deterministic in seed.
MarkedPointPattern permute_marks(const MarkedPointPattern& pattern, std::uint64_t seed);

} // namespace markcorr
