#include "pattern.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "error.hpp"
#include "io_util.hpp"
#include "rng.hpp"

namespace markcorr {

MarkedPointPattern::MarkedPointPattern(Window window, std::vector<Point> points,
                                       std::vector<double> marks)
    : window_(window), points_(std::move(points)), marks_(std::move(marks)) {
    if (points_.size() != marks_.size()) {
        fail(ErrorCode::invalid_argument, "pattern needs one mark per point (" +
                                              std::to_string(points_.size()) + " points, " +
                                              std::to_string(marks_.size()) + " marks)");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!window_.contains(points_[i])) {
            fail(ErrorCode::domain, "point " + std::to_string(i) + " lies outside the window");
        }
        if (!std::isfinite(marks_[i])) {
            fail(ErrorCode::domain, "mark " + std::to_string(i) + " is not finite");
        }
    }
}

namespace {

bool parse_double(const std::string& field, double& out) {
    const char* begin = field.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

struct CsvRow {
    std::size_t line;
    double x, y, mark;
};

std::vector<CsvRow> parse_rows(const std::string& path) {
    std::ifstream file(path);
    if (!file) fail(ErrorCode::io, "cannot open " + path);

    std::vector<CsvRow> rows;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    while (std::getline(file, line)) {
        ++row;
        const std::string content = trim(line);
        if (content.empty() || content[0] == '#') continue;
        if (!header_seen) {
            // header row: x,y,mark
            const auto fields = split_csv(content);
            if (fields.size() < 3 || trim(fields[0]) != "x" || trim(fields[1]) != "y" ||
                trim(fields[2]) != "mark") {
                fail(ErrorCode::parse,
                     path + ":" + std::to_string(row) + ": expected header `x,y,mark`");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_csv(content);
        if (fields.size() != 3) {
            fail(ErrorCode::parse, path + ":" + std::to_string(row) + ": expected 3 fields, got " +
                                       std::to_string(fields.size()));
        }
        double x, y, m;
        if (!parse_double(trim(fields[0]), x) || !parse_double(trim(fields[1]), y)) {
            fail(ErrorCode::parse,
                 path + ":" + std::to_string(row) + ": malformed coordinate");
        }
        if (!parse_double(trim(fields[2]), m)) {
            fail(ErrorCode::parse, path + ":" + std::to_string(row) + ": malformed mark");
        }
        if (!std::isfinite(x) || !std::isfinite(y)) {
            fail(ErrorCode::parse, path + ":" + std::to_string(row) + ": non-finite coordinate");
        }
        if (!std::isfinite(m)) {
            fail(ErrorCode::domain, path + ":" + std::to_string(row) + ": non-finite mark");
        }
        rows.push_back({row, x, y, m});
    }
    if (!header_seen) fail(ErrorCode::parse, path + ": missing header `x,y,mark`");
    return rows;
}

MarkedPointPattern pattern_from_rows(const std::string& path, const Window& window,
                                     const std::vector<CsvRow>& rows) {
    std::vector<Point> points;
    std::vector<double> marks;
    std::vector<std::size_t> outside_rows;
    for (const CsvRow& r : rows) {
        if (!window.contains({r.x, r.y})) {
            outside_rows.push_back(r.line);
            continue;
        }
        points.push_back({r.x, r.y});
        marks.push_back(r.mark);
    }
    if (!outside_rows.empty()) {
        std::string listed;
        for (std::size_t i = 0; i < outside_rows.size(); ++i) {
            if (i) listed += ", ";
            listed += std::to_string(outside_rows[i]);
        }
        fail(ErrorCode::domain, path + ": points outside the window at rows " + listed);
    }

    MarkedPointPattern pattern(window, std::move(points), std::move(marks));

    // Duplicate locations are tolerated; they carry no pairwise weight anyway.
    std::unordered_set<std::string> seen;
    std::size_t duplicates = 0;
    for (const Point& p : pattern.points()) {
        char key[64];
        std::snprintf(key, sizeof key, "%.17g,%.17g", p.x, p.y);
        if (!seen.insert(key).second) ++duplicates;
    }
    if (duplicates > 0) {
        pattern.add_warning(path + ": " + std::to_string(duplicates) +
                            " duplicate point location(s)");
    }
    return pattern;
}

MarkedPointPattern read_pattern(const std::string& path, const Window& window) {
    return pattern_from_rows(path, window, parse_rows(path));
}

MarkedPointPattern read_pattern_auto(const std::string& path) {
    const auto rows = parse_rows(path);
    if (rows.empty()) {
        fail(ErrorCode::domain, path + ": cannot infer a window from an empty pattern");
    }
    double xmin = rows[0].x, xmax = rows[0].x, ymin = rows[0].y, ymax = rows[0].y;
    for (const CsvRow& r : rows) {
        xmin = std::min(xmin, r.x);
        xmax = std::max(xmax, r.x);
        ymin = std::min(ymin, r.y);
        ymax = std::max(ymax, r.y);
    }
    if (xmax <= xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax <= ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    return pattern_from_rows(path, Window(xmin, xmax, ymin, ymax), rows);
}

void write_pattern(const MarkedPointPattern& pattern, const std::string& path) {
    std::string out = "x,y,mark\n";
    char buf[128];
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const Point p = pattern.point(i);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.x, p.y, pattern.mark(i));
        out += buf;
    }
    write_text_atomic(path, out);
}

MarkSummary mark_summary(const MarkedPointPattern& pattern) {
    const std::size_t n = pattern.size();
    if (n < 2) {
        fail(ErrorCode::domain,
             "mark summary needs at least 2 points, got " + std::to_string(n));
    }
    double sum = 0.0;
    for (double m : pattern.marks()) sum += m;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double m : pattern.marks()) ss += (m - mean) * (m - mean);
    return {mean, ss / static_cast<double>(n - 1)};
}

MarkedPointPattern permute_marks(const MarkedPointPattern& pattern, std::uint64_t seed) {
    std::vector<double> marks = pattern.marks();
    CounterRng rng(derive_key(seed, RngStream::permutation, 0));
    rng.shuffle(marks);
    return MarkedPointPattern(pattern.window(), pattern.points(), std::move(marks));
}

} // namespace markcorr
