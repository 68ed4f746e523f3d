#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "pattern.hpp"

namespace markcorr {

enum class IntensityKind {
    uniform_corrected,  // global edge factor outside the sum
    mass_conserving,    // per-point edge factor inside the sum
    voronoi_resample,
    constant,
    external, // user-supplied surface (known truth, raster)
};

const char* intensity_kind_name(IntensityKind kind);

// Nonnegative intensity surface evaluated at the data points and on a grid.
// Stored values are floored at clamp_floor so downstream reciprocals stay
// bounded; clamp_count records how many evaluations hit the floor.
struct IntensityField {
    explicit IntensityField(QuadratureGrid g) : grid(g) {}

    IntensityKind kind = IntensityKind::constant;
    std::vector<double> at_points;
    QuadratureGrid grid;
    std::vector<double> grid_values;
    // Kernel estimators also carry leave-one-out evaluations at the data
    // points: a point's own kernel mass would otherwise dominate its estimate
    // wherever the pattern is sparse. These feed the pair-sum weights.
    std::vector<double> loo_at_points;
    double bandwidth = std::numeric_limits<double>::quiet_NaN();
    double clamp_floor = 0.0;
    std::int64_t clamp_count = 0;

    // quadrature integral over the window
    double grid_mass() const;

    // values used for 1/lambda(x) weights: leave-one-out when available
    const std::vector<double>& weight_values() const {
        return loo_at_points.empty() ? at_points : loo_at_points;
    }
};

// Intensity evaluations are floored at 1e-8 * N/|W|.
double intensity_clamp_floor(std::size_t n_points, double window_area);

// Gaussian kernel mass inside the window: product of 1-D normal CDF
// differences; in (0, 1].
double gaussian_edge_factor(const Window& w, Point u, double bandwidth);

// lambda(u) = (1/c_W(u)) * sum_x K(u - x); unbiased under homogeneity.
IntensityField kernel_intensity_uniform(const MarkedPointPattern& pattern, double bandwidth,
                                        const QuadratureGrid& grid);

// lambda(u) = sum_x K(u - x) / c_W(x); integrates to N over the window.
IntensityField kernel_intensity_mass_conserving(const MarkedPointPattern& pattern,
                                                double bandwidth, const QuadratureGrid& grid);

IntensityField constant_intensity(const MarkedPointPattern& pattern, const QuadratureGrid& grid);

// Known intensity surface (e.g. the generating intensity of a simulation).
IntensityField intensity_from_function(const MarkedPointPattern& pattern,
                                       const QuadratureGrid& grid,
                                       const std::function<double(double, double)>& fn);

// Piecewise-constant surface from raster values on an nx-by-ny grid over the
// pattern window (row-major, x fastest).
IntensityField intensity_from_raster(const MarkedPointPattern& pattern, const QuadratureGrid& grid,
                                     int nx, int ny, const std::vector<double>& values);

// |sum_x 1/lambda_h(x) - |W|| for the mass-conserving estimator at the data
// points; the selection objective. Evaluation is leave-one-out: with the
// self term included the sum is capped by |W| from below for every h, so the
// objective would degenerate into "pick the largest candidate".
double cvl_objective(const MarkedPointPattern& pattern, double bandwidth);

// 32 log-spaced candidates from shorter_side/100 to shorter_side/2.
std::vector<double> default_bandwidth_candidates(const Window& w);

// Candidate minimising the objective; ties break toward the smaller value.
double select_bandwidth_cvl(const MarkedPointPattern& pattern,
                            const std::vector<double>& candidates);

// Areas of the Voronoi cells of `sites` clipped to the window, by half-plane
// clipping of the window rectangle. Exact duplicates of a site are merged;
// `multiplicity` reports how many input points share each returned cell.
struct VoronoiTessellation {
    std::vector<Point> sites;
    std::vector<double> areas;
    std::vector<int> multiplicity;
};
VoronoiTessellation voronoi_tessellation(const std::vector<Point>& sites, const Window& w);

// Resample-smoothed Voronoi estimator: average of m rescaled Voronoi
// estimators of independent p-thinnings. Deterministic in seed.
IntensityField voronoi_intensity(const MarkedPointPattern& pattern, double retention,
                                 int replicates, std::uint64_t seed, const QuadratureGrid& grid);

enum class SurfaceStatistic { mean, variance };

struct MarkSurface {
    QuadratureGrid grid;
    std::vector<double> values;
    std::vector<std::uint8_t> missing; // kernel mass underflowed at the cell
    double bandwidth = 0.0;
    SurfaceStatistic statistic = SurfaceStatistic::mean;
};

MarkSurface nadaraya_watson_mark_surface(const MarkedPointPattern& pattern, double bandwidth,
                                         const QuadratureGrid& grid, SurfaceStatistic statistic);

} // namespace markcorr
