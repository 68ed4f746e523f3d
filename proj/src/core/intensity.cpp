#include "intensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace markcorr {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double gaussian_kernel2(double dx, double dy, double bandwidth) {
    const double h2 = bandwidth * bandwidth;
    return std::exp(-0.5 * (dx * dx + dy * dy) / h2) / (kTwoPi * h2);
}

double normal_cdf(double z) { return 0.5 * (1.0 + std::erf(z * 0.70710678118654752440)); }

void clamp_values(std::vector<double>& values, double floor, std::int64_t& count) {
    for (double& v : values) {
        if (v < floor) {
            v = floor;
            ++count;
        }
    }
}

void require_points(const MarkedPointPattern& pattern, std::size_t minimum, const char* op) {
    if (pattern.size() < minimum) {
        fail(ErrorCode::domain, std::string(op) + " needs at least " + std::to_string(minimum) +
                                    " points, got " + std::to_string(pattern.size()));
    }
}

void require_bandwidth(double bandwidth) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        fail(ErrorCode::invalid_argument, "bandwidth must be positive and finite");
    }
}

} // namespace

const char* intensity_kind_name(IntensityKind kind) {
    switch (kind) {
        case IntensityKind::uniform_corrected: return "uniform-corrected-kernel";
        case IntensityKind::mass_conserving: return "mass-conserving-kernel";
        case IntensityKind::voronoi_resample: return "voronoi-resample";
        case IntensityKind::constant: return "constant";
        case IntensityKind::external: return "external";
    }
    return "unknown";
}

double IntensityField::grid_mass() const {
    double sum = 0.0;
    for (double v : grid_values) sum += v;
    return sum * grid.cell_area();
}

double intensity_clamp_floor(std::size_t n_points, double window_area) {
    return 1e-8 * static_cast<double>(n_points) / window_area;
}

double gaussian_edge_factor(const Window& w, Point u, double bandwidth) {
    require_bandwidth(bandwidth);
    const double fx =
        normal_cdf((w.xmax() - u.x) / bandwidth) - normal_cdf((w.xmin() - u.x) / bandwidth);
    const double fy =
        normal_cdf((w.ymax() - u.y) / bandwidth) - normal_cdf((w.ymin() - u.y) / bandwidth);
    return fx * fy;
}

namespace {

// Shared skeleton of the two kernel estimators: evaluate `eval` at all data
// points and grid centres, then clamp.
template <typename Eval>
IntensityField build_kernel_field(const MarkedPointPattern& pattern, const QuadratureGrid& grid,
                                  IntensityKind kind, double bandwidth, Eval eval) {
    IntensityField field(grid);
    field.kind = kind;
    field.bandwidth = bandwidth;
    field.clamp_floor = intensity_clamp_floor(pattern.size(), pattern.window().area());

    field.at_points.resize(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) field.at_points[i] = eval(pattern.point(i));

    field.grid_values.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t c) { field.grid_values[c] = eval(grid.center(c)); });

    clamp_values(field.at_points, field.clamp_floor, field.clamp_count);
    clamp_values(field.grid_values, field.clamp_floor, field.clamp_count);
    return field;
}

} // namespace

IntensityField kernel_intensity_uniform(const MarkedPointPattern& pattern, double bandwidth,
                                        const QuadratureGrid& grid) {
    require_points(pattern, 1, "kernel intensity");
    require_bandwidth(bandwidth);
    const Window& w = pattern.window();
    auto field = build_kernel_field(pattern, grid, IntensityKind::uniform_corrected, bandwidth,
                                    [&](Point u) {
                                        double sum = 0.0;
                                        for (const Point& x : pattern.points()) {
                                            sum += gaussian_kernel2(u.x - x.x, u.y - x.y, bandwidth);
                                        }
                                        return sum / gaussian_edge_factor(w, u, bandwidth);
                                    });
    field.loo_at_points.resize(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const Point u = pattern.point(i);
        const double self =
            gaussian_kernel2(0.0, 0.0, bandwidth) / gaussian_edge_factor(w, u, bandwidth);
        field.loo_at_points[i] = std::max(field.at_points[i] - self, field.clamp_floor);
    }
    return field;
}

IntensityField kernel_intensity_mass_conserving(const MarkedPointPattern& pattern,
                                                double bandwidth, const QuadratureGrid& grid) {
    require_points(pattern, 1, "kernel intensity");
    require_bandwidth(bandwidth);
    const Window& w = pattern.window();
    // one edge factor per data point, reused at every evaluation location
    std::vector<double> edge(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        edge[i] = gaussian_edge_factor(w, pattern.point(i), bandwidth);
    }
    auto field = build_kernel_field(pattern, grid, IntensityKind::mass_conserving, bandwidth,
                                    [&](Point u) {
                                        double sum = 0.0;
                                        for (std::size_t i = 0; i < pattern.size(); ++i) {
                                            const Point x = pattern.point(i);
                                            sum += gaussian_kernel2(u.x - x.x, u.y - x.y,
                                                                    bandwidth) /
                                                   edge[i];
                                        }
                                        return sum;
                                    });
    field.loo_at_points.resize(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const double self = gaussian_kernel2(0.0, 0.0, bandwidth) / edge[i];
        field.loo_at_points[i] = std::max(field.at_points[i] - self, field.clamp_floor);
    }
    return field;
}

IntensityField constant_intensity(const MarkedPointPattern& pattern, const QuadratureGrid& grid) {
    require_points(pattern, 1, "constant intensity");
    IntensityField field(grid);
    field.kind = IntensityKind::constant;
    field.clamp_floor = intensity_clamp_floor(pattern.size(), pattern.window().area());
    const double value = static_cast<double>(pattern.size()) / pattern.window().area();
    field.at_points.assign(pattern.size(), value);
    field.grid_values.assign(grid.size(), value);
    return field;
}

IntensityField intensity_from_function(const MarkedPointPattern& pattern,
                                       const QuadratureGrid& grid,
                                       const std::function<double(double, double)>& fn) {
    IntensityField field(grid);
    field.kind = IntensityKind::external;
    field.clamp_floor = intensity_clamp_floor(pattern.size(), pattern.window().area());
    field.at_points.resize(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const Point p = pattern.point(i);
        field.at_points[i] = fn(p.x, p.y);
    }
    field.grid_values.resize(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const Point u = grid.center(c);
        field.grid_values[c] = fn(u.x, u.y);
    }
    for (double v : field.at_points) {
        if (!std::isfinite(v)) fail(ErrorCode::numeric, "intensity surface not finite at a data point");
    }
    clamp_values(field.at_points, field.clamp_floor, field.clamp_count);
    clamp_values(field.grid_values, field.clamp_floor, field.clamp_count);
    return field;
}

IntensityField intensity_from_raster(const MarkedPointPattern& pattern, const QuadratureGrid& grid,
                                     int nx, int ny, const std::vector<double>& values) {
    if (nx < 1 || ny < 1 || values.size() != static_cast<std::size_t>(nx) * ny) {
        fail(ErrorCode::invalid_argument, "raster dimensions do not match value count");
    }
    const QuadratureGrid raster(pattern.window(), nx, ny);
    auto field = intensity_from_function(
        pattern, grid, [&](double x, double y) { return values[raster.cell_index({x, y})]; });
    return field;
}

double cvl_objective(const MarkedPointPattern& pattern, double bandwidth) {
    require_points(pattern, 2, "bandwidth selection");
    require_bandwidth(bandwidth);
    const Window& w = pattern.window();
    // The reciprocal sum uses the globally corrected estimator, leave-one-out;
    // the selected bandwidth then drives whichever estimator the caller plugs
    // it into. Leave-in (or the per-point correction) keeps the sum on one
    // side of |W| for every h and the argmin degenerates to the range edge.
    std::vector<double> edge(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        edge[i] = gaussian_edge_factor(w, pattern.point(i), bandwidth);
    }
    const double floor = intensity_clamp_floor(pattern.size(), w.area());
    double reciprocal_sum = 0.0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const Point u = pattern.point(i);
        double kernel_sum = 0.0;
        for (std::size_t j = 0; j < pattern.size(); ++j) {
            if (j == i) continue;
            const Point x = pattern.point(j);
            kernel_sum += gaussian_kernel2(u.x - x.x, u.y - x.y, bandwidth);
        }
        reciprocal_sum += 1.0 / std::max(kernel_sum / edge[i], floor);
    }
    return std::abs(reciprocal_sum - w.area());
}

std::vector<double> default_bandwidth_candidates(const Window& w) {
    constexpr int kCount = 32;
    const double lo = w.shorter_side() / 100.0;
    const double hi = w.shorter_side() / 2.0;
    std::vector<double> candidates(kCount);
    for (int i = 0; i < kCount; ++i) {
        candidates[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (kCount - 1));
    }
    return candidates;
}

double select_bandwidth_cvl(const MarkedPointPattern& pattern,
                            const std::vector<double>& candidates) {
    require_points(pattern, 2, "bandwidth selection");
    if (candidates.empty()) fail(ErrorCode::invalid_argument, "empty bandwidth candidate set");

    std::vector<double> objective(candidates.size());
    parallel_for(candidates.size(),
                 [&](std::size_t i) { objective[i] = cvl_objective(pattern, candidates[i]); });

    double best = std::numeric_limits<double>::quiet_NaN();
    double best_objective = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!std::isfinite(objective[i])) continue;
        // strict < keeps the smaller of tied candidates when sorted ascending
        const bool better = objective[i] < best_objective ||
                            (objective[i] == best_objective && candidates[i] < best);
        if (better) {
            best = candidates[i];
            best_objective = objective[i];
        }
    }
    if (!std::isfinite(best)) {
        fail(ErrorCode::numeric, "bandwidth selection degenerate: no finite objective value");
    }
    return best;
}

namespace {

// Sutherland-Hodgman clip of a convex polygon by the half-plane
// { q : dot(q - origin, normal) <= bound }.
void clip_halfplane(std::vector<Point>& poly, Point origin, Point normal, double bound,
                    std::vector<Point>& scratch) {
    scratch.clear();
    const auto side = [&](Point q) {
        return (q.x - origin.x) * normal.x + (q.y - origin.y) * normal.y - bound;
    };
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = poly[i];
        const Point b = poly[(i + 1) % n];
        const double sa = side(a);
        const double sb = side(b);
        if (sa <= 0.0) scratch.push_back(a);
        if ((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb <= 0.0)) {
            const double t = sa / (sa - sb);
            scratch.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
        }
    }
    poly.swap(scratch);
}

double polygon_area(const std::vector<Point>& poly) {
    double twice = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = poly[i];
        const Point b = poly[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * std::abs(twice);
}

std::size_t nearest_site(const std::vector<Point>& sites, Point u) {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const double dx = u.x - sites[i].x;
        const double dy = u.y - sites[i].y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

} // namespace

VoronoiTessellation voronoi_tessellation(const std::vector<Point>& sites, const Window& w) {
    VoronoiTessellation tess;
    // merge exact duplicates so every cell has a unique site
    for (const Point& p : sites) {
        bool merged = false;
        for (std::size_t i = 0; i < tess.sites.size(); ++i) {
            if (tess.sites[i].x == p.x && tess.sites[i].y == p.y) {
                ++tess.multiplicity[i];
                merged = true;
                break;
            }
        }
        if (!merged) {
            tess.sites.push_back(p);
            tess.multiplicity.push_back(1);
        }
    }

    tess.areas.resize(tess.sites.size());
    std::vector<Point> poly, scratch;
    for (std::size_t i = 0; i < tess.sites.size(); ++i) {
        const Point pi = tess.sites[i];
        poly = {{w.xmin(), w.ymin()}, {w.xmax(), w.ymin()}, {w.xmax(), w.ymax()}, {w.xmin(), w.ymax()}};
        for (std::size_t j = 0; j < tess.sites.size() && !poly.empty(); ++j) {
            if (j == i) continue;
            const Point pj = tess.sites[j];
            // bisector half-plane closer to pi: dot(q - mid, pj - pi) <= 0
            const Point mid{0.5 * (pi.x + pj.x), 0.5 * (pi.y + pj.y)};
            clip_halfplane(poly, mid, {pj.x - pi.x, pj.y - pi.y}, 0.0, scratch);
        }
        tess.areas[i] = polygon_area(poly);
    }
    return tess;
}

IntensityField voronoi_intensity(const MarkedPointPattern& pattern, double retention,
                                 int replicates, std::uint64_t seed, const QuadratureGrid& grid) {
    require_points(pattern, 1, "voronoi intensity");
    if (!(retention > 0.0) || retention > 1.0) {
        fail(ErrorCode::invalid_argument, "retention probability must lie in (0, 1]");
    }
    if (replicates < 1) fail(ErrorCode::invalid_argument, "at least one replicate required");

    IntensityField field(grid);
    field.kind = IntensityKind::voronoi_resample;
    field.clamp_floor = intensity_clamp_floor(pattern.size(), pattern.window().area());
    field.at_points.assign(pattern.size(), 0.0);
    field.grid_values.assign(grid.size(), 0.0);

    std::vector<std::vector<double>> at_points_rep(replicates);
    std::vector<std::vector<double>> grid_rep(replicates);

    parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t rep) {
        CounterRng rng(derive_key(seed, RngStream::thinning, rep));
        std::vector<Point> retained;
        for (std::size_t i = 0; i < pattern.size(); ++i) {
            if (retention >= 1.0 || rng.next_double() < retention) {
                retained.push_back(pattern.point(i));
            }
        }
        auto& at_pts = at_points_rep[rep];
        auto& at_grid = grid_rep[rep];
        at_pts.assign(pattern.size(), 0.0);
        at_grid.assign(grid.size(), 0.0);
        if (retained.empty()) return; // empty thinning contributes zero

        const auto tess = voronoi_tessellation(retained, pattern.window());
        const auto value_at = [&](Point u) {
            const std::size_t cell = nearest_site(tess.sites, u);
            return tess.multiplicity[cell] / (tess.areas[cell] * retention);
        };
        for (std::size_t i = 0; i < pattern.size(); ++i) at_pts[i] = value_at(pattern.point(i));
        for (std::size_t c = 0; c < grid.size(); ++c) at_grid[c] = value_at(grid.center(c));
    });

    // fixed reduction order over replicates
    for (int rep = 0; rep < replicates; ++rep) {
        for (std::size_t i = 0; i < pattern.size(); ++i) {
            field.at_points[i] += at_points_rep[rep][i];
        }
        for (std::size_t c = 0; c < grid.size(); ++c) field.grid_values[c] += grid_rep[rep][c];
    }
    const double inv_m = 1.0 / replicates;
    for (double& v : field.at_points) v *= inv_m;
    for (double& v : field.grid_values) v *= inv_m;

    clamp_values(field.at_points, field.clamp_floor, field.clamp_count);
    clamp_values(field.grid_values, field.clamp_floor, field.clamp_count);
    return field;
}

MarkSurface nadaraya_watson_mark_surface(const MarkedPointPattern& pattern, double bandwidth,
                                         const QuadratureGrid& grid, SurfaceStatistic statistic) {
    require_points(pattern, 2, "mark surface");
    require_bandwidth(bandwidth);

    MarkSurface surface{grid, {}, {}, bandwidth, statistic};
    surface.values.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    surface.missing.assign(grid.size(), 0);

    parallel_for(grid.size(), [&](std::size_t c) {
        const Point u = grid.center(c);
        double weight_sum = 0.0;
        double weighted_mark = 0.0;
        for (std::size_t i = 0; i < pattern.size(); ++i) {
            const Point x = pattern.point(i);
            const double k = gaussian_kernel2(u.x - x.x, u.y - x.y, bandwidth);
            weight_sum += k;
            weighted_mark += k * pattern.mark(i);
        }
        if (!(weight_sum > 0.0)) {
            surface.missing[c] = 1;
            return;
        }
        const double mean = weighted_mark / weight_sum;
        if (statistic == SurfaceStatistic::mean) {
            surface.values[c] = mean;
        } else {
            double weighted_sq = 0.0;
            for (std::size_t i = 0; i < pattern.size(); ++i) {
                const Point x = pattern.point(i);
                const double k = gaussian_kernel2(u.x - x.x, u.y - x.y, bandwidth);
                const double d = pattern.mark(i) - mean;
                weighted_sq += k * d * d;
            }
            surface.values[c] = weighted_sq / weight_sum;
        }
    });
    return surface;
}

} // namespace markcorr
