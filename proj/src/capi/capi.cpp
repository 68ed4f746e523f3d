#include "markcorr/markcorr.h"

#include <cstring>
#include <string>

#include "core/envelope.hpp"
#include "core/error.hpp"
#include "core/export.hpp"
#include "core/intensity.hpp"
#include "core/markcorr.hpp"
#include "core/pattern.hpp"
#include "core/power.hpp"
#include "core/simulate.hpp"

using namespace markcorr;

struct mcf_pattern {
    MarkedPointPattern value;
};
struct mcf_intensity {
    IntensityField value;
};
struct mcf_curve {
    SummaryCurve value;
};
struct mcf_envelope {
    EnvelopeResult value;
};
struct mcf_simulator {
    ScenarioSimulator value;
};

namespace {

thread_local std::string g_last_error;

mcf_status to_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return MCF_ERR_INVALID;
        case ErrorCode::parse: return MCF_ERR_PARSE;
        case ErrorCode::io: return MCF_ERR_IO;
        case ErrorCode::domain: return MCF_ERR_DOMAIN;
        case ErrorCode::numeric: return MCF_ERR_NUMERIC;
    }
    return MCF_ERR_INVALID;
}

template <typename Fn>
mcf_status guarded(Fn&& fn) {
    try {
        fn();
        return MCF_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MCF_ERR_NUMERIC;
    } catch (...) {
        g_last_error = "unknown failure";
        return MCF_ERR_NUMERIC;
    }
}

mcf_status require(bool condition, const char* message) {
    if (condition) return MCF_OK;
    g_last_error = message;
    return MCF_ERR_INVALID;
}

Window to_window(const double window[4]) {
    return Window(window[0], window[1], window[2], window[3]);
}

RGrid resolve_rgrid_spec(const mcf_rgrid_spec* spec, const MarkedPointPattern& pattern) {
    const double r_max = (spec && spec->r_max > 0.0) ? spec->r_max
                                                     : pattern.window().shorter_side() / 4.0;
    const int steps = (spec && spec->r_steps > 0) ? spec->r_steps : 100;
    const double bw = (spec && spec->pair_bandwidth > 0.0)
                          ? spec->pair_bandwidth
                          : stoyan_pair_bandwidth(pattern.size(), pattern.window().area());
    return RGrid::regular(r_max, steps, bw);
}

TestFunction to_testfunction(mcf_testfunction tf) {
    return tf == MCF_TF_MM ? TestFunction::mm() : TestFunction::vario();
}

EdgeCorrection to_edge(mcf_edge edge) {
    return edge == MCF_EDGE_TRANSLATION ? EdgeCorrection::translation : EdgeCorrection::ripley;
}

CurveForm to_form(mcf_form form) {
    return form == MCF_FORM_DENSITY ? CurveForm::density : CurveForm::cumulative;
}

// Constant field over a trivial grid; the estimators only read at_points.
IntensityField fallback_constant(const MarkedPointPattern& pattern) {
    return constant_intensity(pattern, QuadratureGrid(pattern.window(), 1, 1));
}

StatisticSpec to_statistic_spec(const mcf_statistic_spec* spec) {
    StatisticSpec out;
    if (spec == nullptr) return out;
    out.flavor = spec->flavor == MCF_FLAVOR_HOMOGENEOUS ? Flavor::homogeneous
                                                        : Flavor::inhomogeneous;
    out.tf = to_testfunction(spec->tf);
    out.form = to_form(spec->form);
    out.edge = to_edge(spec->edge);
    if (spec->rgrid.r_max > 0.0) out.r_max = spec->rgrid.r_max;
    if (spec->rgrid.r_steps > 0) out.r_steps = spec->rgrid.r_steps;
    if (spec->rgrid.pair_bandwidth > 0.0) out.pair_bandwidth = spec->rgrid.pair_bandwidth;
    if (spec->intensity_bandwidth > 0.0) out.intensity_bandwidth = spec->intensity_bandwidth;
    if (spec->grid_nx > 0) out.grid_nx = spec->grid_nx;
    if (spec->grid_ny > 0) out.grid_ny = spec->grid_ny;
    return out;
}

} // namespace

extern "C" {

const char* mcf_last_error(void) { return g_last_error.c_str(); }

/* ---- patterns ----------------------------------------------------------- */

mcf_status mcf_pattern_create(const double window[4], const double* x, const double* y,
                              const double* mark, size_t n, mcf_pattern** out) {
    if (auto s = require(window && out && (n == 0 || (x && y && mark)), "null argument"); s) return s;
    return guarded([&] {
        std::vector<Point> points(n);
        for (size_t i = 0; i < n; ++i) points[i] = {x[i], y[i]};
        std::vector<double> marks(mark, mark + n);
        *out = new mcf_pattern{MarkedPointPattern(to_window(window), std::move(points),
                                                  std::move(marks))};
    });
}

mcf_status mcf_pattern_read_csv(const char* path, const double window[4], mcf_pattern** out) {
    if (auto s = require(path && out, "null argument"); s) return s;
    return guarded([&] {
        *out = new mcf_pattern{window ? read_pattern(path, to_window(window))
                                      : read_pattern_auto(path)};
    });
}

mcf_status mcf_pattern_write_csv(const mcf_pattern* pattern, const char* path) {
    if (auto s = require(pattern && path, "null argument"); s) return s;
    return guarded([&] { write_pattern(pattern->value, path); });
}

size_t mcf_pattern_size(const mcf_pattern* pattern) {
    return pattern ? pattern->value.size() : 0;
}

void mcf_pattern_window(const mcf_pattern* pattern, double window[4]) {
    if (!pattern || !window) return;
    const Window& w = pattern->value.window();
    window[0] = w.xmin();
    window[1] = w.xmax();
    window[2] = w.ymin();
    window[3] = w.ymax();
}

mcf_status mcf_pattern_coords(const mcf_pattern* pattern, double* x, double* y, double* mark) {
    if (auto s = require(pattern != nullptr, "null pattern"); s) return s;
    for (size_t i = 0; i < pattern->value.size(); ++i) {
        if (x) x[i] = pattern->value.point(i).x;
        if (y) y[i] = pattern->value.point(i).y;
        if (mark) mark[i] = pattern->value.mark(i);
    }
    return MCF_OK;
}

mcf_status mcf_pattern_mark_summary(const mcf_pattern* pattern, double* mean, double* variance) {
    if (auto s = require(pattern != nullptr, "null pattern"); s) return s;
    return guarded([&] {
        const MarkSummary summary = mark_summary(pattern->value);
        if (mean) *mean = summary.mean;
        if (variance) *variance = summary.variance;
    });
}

mcf_status mcf_pattern_permute_marks(const mcf_pattern* pattern, uint64_t seed,
                                     mcf_pattern** out) {
    if (auto s = require(pattern && out, "null argument"); s) return s;
    return guarded([&] { *out = new mcf_pattern{permute_marks(pattern->value, seed)}; });
}

size_t mcf_pattern_warning_count(const mcf_pattern* pattern) {
    return pattern ? pattern->value.warnings().size() : 0;
}

const char* mcf_pattern_warning(const mcf_pattern* pattern, size_t index) {
    if (!pattern || index >= pattern->value.warnings().size()) return "";
    return pattern->value.warnings()[index].c_str();
}

void mcf_pattern_free(mcf_pattern* pattern) { delete pattern; }

/* ---- intensity ---------------------------------------------------------- */

mcf_status mcf_intensity_kernel(const mcf_pattern* pattern, mcf_intensity_kind kind,
                                double bandwidth, int grid_nx, int grid_ny, mcf_intensity** out) {
    if (auto s = require(pattern && out, "null argument"); s) return s;
    return guarded([&] {
        const QuadratureGrid grid(pattern->value.window(), grid_nx > 0 ? grid_nx : 128,
                                  grid_ny > 0 ? grid_ny : 128);
        const double bw = bandwidth > 0.0
                              ? bandwidth
                              : select_bandwidth_cvl(
                                    pattern->value,
                                    default_bandwidth_candidates(pattern->value.window()));
        *out = new mcf_intensity{kind == MCF_INTENSITY_UNIFORM
                                     ? kernel_intensity_uniform(pattern->value, bw, grid)
                                     : kernel_intensity_mass_conserving(pattern->value, bw, grid)};
    });
}

mcf_status mcf_intensity_voronoi(const mcf_pattern* pattern, double retention, int replicates,
                                 uint64_t seed, int grid_nx, int grid_ny, mcf_intensity** out) {
    if (auto s = require(pattern && out, "null argument"); s) return s;
    return guarded([&] {
        const QuadratureGrid grid(pattern->value.window(), grid_nx > 0 ? grid_nx : 128,
                                  grid_ny > 0 ? grid_ny : 128);
        *out = new mcf_intensity{
            voronoi_intensity(pattern->value, retention, replicates, seed, grid)};
    });
}

mcf_status mcf_intensity_constant(const mcf_pattern* pattern, mcf_intensity** out) {
    if (auto s = require(pattern && out, "null argument"); s) return s;
    return guarded([&] { *out = new mcf_intensity{fallback_constant(pattern->value)}; });
}

mcf_status mcf_intensity_from_raster(const mcf_pattern* pattern, int raster_nx, int raster_ny,
                                     const double* values, int grid_nx, int grid_ny,
                                     mcf_intensity** out) {
    if (auto s = require(pattern && values && out, "null argument"); s) return s;
    return guarded([&] {
        const QuadratureGrid grid(pattern->value.window(), grid_nx > 0 ? grid_nx : 128,
                                  grid_ny > 0 ? grid_ny : 128);
        std::vector<double> raster(values,
                                   values + static_cast<size_t>(raster_nx) * raster_ny);
        *out = new mcf_intensity{
            intensity_from_raster(pattern->value, grid, raster_nx, raster_ny, raster)};
    });
}

double mcf_intensity_bandwidth(const mcf_intensity* intensity) {
    return intensity ? intensity->value.bandwidth : std::numeric_limits<double>::quiet_NaN();
}

double mcf_intensity_grid_mass(const mcf_intensity* intensity) {
    return intensity ? intensity->value.grid_mass() : std::numeric_limits<double>::quiet_NaN();
}

mcf_status mcf_intensity_write(const mcf_intensity* intensity, const char* csv_path,
                               const char* json_path) {
    if (auto s = require(intensity != nullptr, "null intensity"); s) return s;
    return guarded([&] {
        if (csv_path) write_intensity_csv(intensity->value, csv_path);
        if (json_path) write_intensity_json(intensity->value, json_path);
    });
}

void mcf_intensity_free(mcf_intensity* intensity) { delete intensity; }

mcf_status mcf_mark_surface_write(const mcf_pattern* pattern, double bandwidth, int grid_nx,
                                  int grid_ny, int statistic, const char* csv_path,
                                  const char* json_path, double* selected_bandwidth) {
    if (auto s = require(pattern != nullptr, "null pattern"); s) return s;
    if (auto s = require(statistic == 0 || statistic == 1, "statistic must be 0 or 1"); s) return s;
    return guarded([&] {
        const QuadratureGrid grid(pattern->value.window(), grid_nx > 0 ? grid_nx : 128,
                                  grid_ny > 0 ? grid_ny : 128);
        const double bw = bandwidth > 0.0
                              ? bandwidth
                              : select_bandwidth_cvl(
                                    pattern->value,
                                    default_bandwidth_candidates(pattern->value.window()));
        const MarkSurface surface = nadaraya_watson_mark_surface(
            pattern->value, bw, grid,
            statistic == 0 ? SurfaceStatistic::mean : SurfaceStatistic::variance);
        if (csv_path) write_surface_csv(surface, csv_path);
        if (json_path) write_surface_json(surface, json_path);
        if (selected_bandwidth) *selected_bandwidth = bw;
    });
}

/* ---- summary curves ----------------------------------------------------- */

namespace {

mcf_status compute_curve(const mcf_pattern* pattern, const mcf_intensity* intensity,
                         mcf_testfunction tf, mcf_form form, mcf_edge edge,
                         const mcf_rgrid_spec* rgrid, bool normalised, mcf_curve** out) {
    return guarded([&] {
        const MarkedPointPattern& x = pattern->value;
        const RGrid grid = resolve_rgrid_spec(rgrid, x);
        const IntensityField field = intensity ? intensity->value : fallback_constant(x);
        const TestFunction test_function = to_testfunction(tf);
        const EdgeCorrection correction = to_edge(edge);
        SummaryCurve curve;
        if (to_form(form) == CurveForm::density) {
            curve = normalised ? kappa_inhom(x, test_function, field, grid, correction)
                               : c_inhom(x, test_function, field, grid, correction);
        } else {
            if (normalised) {
                const double norm = normalizer_value(x, test_function);
                PairSumPlan plan(x, field.at_points, grid, correction, CurveForm::cumulative);
                curve = plan.ratio_curve(plan.numerator_raw(x.marks(), test_function),
                                         CurveKind::k_ratio, norm);
                curve.flavor = field.kind == IntensityKind::constant ? Flavor::homogeneous
                                                                     : Flavor::inhomogeneous;
                curve.edge = correction;
                curve.intensity_provenance = intensity_kind_name(field.kind);
            } else {
                curve = k_ratio_inhom(x, test_function, field, grid, correction);
            }
        }
        *out = new mcf_curve{std::move(curve)};
    });
}

} // namespace

mcf_status mcf_curve_kappa(const mcf_pattern* pattern, const mcf_intensity* intensity,
                           mcf_testfunction tf, mcf_form form, mcf_edge edge,
                           const mcf_rgrid_spec* rgrid, mcf_curve** out) {
    if (auto s = require(pattern && out, "null argument"); s) return s;
    return compute_curve(pattern, intensity, tf, form, edge, rgrid, true, out);
}

mcf_status mcf_curve_unnormalised(const mcf_pattern* pattern, const mcf_intensity* intensity,
                                  mcf_testfunction tf, mcf_form form, mcf_edge edge,
                                  const mcf_rgrid_spec* rgrid, mcf_curve** out) {
    if (auto s = require(pattern && out, "null argument"); s) return s;
    return compute_curve(pattern, intensity, tf, form, edge, rgrid, false, out);
}

mcf_status mcf_curve_pcf(const mcf_pattern* pattern, const mcf_intensity* intensity, mcf_edge edge,
                         const mcf_rgrid_spec* rgrid, mcf_curve** out) {
    if (auto s = require(pattern && out, "null argument"); s) return s;
    return guarded([&] {
        const MarkedPointPattern& x = pattern->value;
        const RGrid grid = resolve_rgrid_spec(rgrid, x);
        const IntensityField field = intensity ? intensity->value : fallback_constant(x);
        *out = new mcf_curve{pcf_inhom(x, field, grid, to_edge(edge))};
    });
}

size_t mcf_curve_size(const mcf_curve* curve) { return curve ? curve->value.values.size() : 0; }

mcf_status mcf_curve_values(const mcf_curve* curve, double* r, double* value, int* missing) {
    if (auto s = require(curve != nullptr, "null curve"); s) return s;
    for (size_t k = 0; k < curve->value.values.size(); ++k) {
        if (r) r[k] = curve->value.grid.r[k];
        if (value) value[k] = curve->value.values[k];
        if (missing) missing[k] = curve->value.missing[k];
    }
    return MCF_OK;
}

double mcf_curve_normalizer(const mcf_curve* curve) {
    return curve ? curve->value.normalizer : std::numeric_limits<double>::quiet_NaN();
}

mcf_status mcf_curve_write(const mcf_curve* curve, const char* csv_path, const char* json_path) {
    if (auto s = require(curve != nullptr, "null curve"); s) return s;
    return guarded([&] {
        if (csv_path) write_curve_csv(curve->value, csv_path);
        if (json_path) write_curve_json(curve->value, json_path);
    });
}

void mcf_curve_free(mcf_curve* curve) { delete curve; }

/* ---- envelope ------------------------------------------------------------ */

void mcf_statistic_spec_default(mcf_statistic_spec* spec) {
    if (!spec) return;
    spec->flavor = MCF_FLAVOR_INHOMOGENEOUS;
    spec->tf = MCF_TF_MM;
    spec->form = MCF_FORM_DENSITY;
    spec->edge = MCF_EDGE_TRANSLATION;
    spec->rgrid = {0.0, 0, 0.0};
    spec->intensity_bandwidth = 0.0;
    spec->grid_nx = 0;
    spec->grid_ny = 0;
}

mcf_status mcf_envelope_run(const mcf_pattern* pattern, const mcf_statistic_spec* spec,
                            int permutations, double alpha, uint64_t seed, mcf_envelope** out) {
    if (auto s = require(pattern && out, "null argument"); s) return s;
    return guarded([&] {
        *out = new mcf_envelope{run_random_labelling_test(pattern->value, to_statistic_spec(spec),
                                                          permutations, alpha, seed)};
    });
}

int mcf_envelope_reject(const mcf_envelope* envelope) {
    return envelope && envelope->value.reject ? 1 : 0;
}

void mcf_envelope_pvalues(const mcf_envelope* envelope, double* p_lower, double* p_upper) {
    if (!envelope) return;
    if (p_lower) *p_lower = envelope->value.p_lower;
    if (p_upper) *p_upper = envelope->value.p_upper;
}

size_t mcf_envelope_size(const mcf_envelope* envelope) {
    return envelope ? envelope->value.data_curve.size() : 0;
}

mcf_status mcf_envelope_values(const mcf_envelope* envelope, double* r, double* data, double* lo,
                               double* hi, double* central, int* missing) {
    if (auto s = require(envelope != nullptr, "null envelope"); s) return s;
    const EnvelopeResult& e = envelope->value;
    for (size_t k = 0; k < e.data_curve.size(); ++k) {
        if (r) r[k] = e.grid.r[k];
        if (data) data[k] = e.data_curve[k];
        if (lo) lo[k] = e.lower[k];
        if (hi) hi[k] = e.upper[k];
        if (central) central[k] = e.central[k];
        if (missing) missing[k] = e.missing[k];
    }
    return MCF_OK;
}

mcf_status mcf_envelope_write(const mcf_envelope* envelope, const char* csv_path,
                              const char* json_path) {
    if (auto s = require(envelope != nullptr, "null envelope"); s) return s;
    return guarded([&] {
        if (csv_path) write_envelope_csv(envelope->value, csv_path);
        if (json_path) write_envelope_json(envelope->value, json_path);
    });
}

void mcf_envelope_free(mcf_envelope* envelope) { delete envelope; }

/* ---- simulation ----------------------------------------------------------- */

mcf_status mcf_simulator_create(const char* preset, mcf_simulator** out) {
    if (auto s = require(preset && out, "null argument"); s) return s;
    return guarded([&] { *out = new mcf_simulator{ScenarioSimulator(scenario_preset(preset))}; });
}

mcf_status mcf_simulator_replicate(const mcf_simulator* simulator, uint64_t seed, uint64_t index,
                                   mcf_pattern** out) {
    if (auto s = require(simulator && out, "null argument"); s) return s;
    return guarded([&] { *out = new mcf_pattern{simulator->value.replicate(seed, index)}; });
}

void mcf_simulator_free(mcf_simulator* simulator) { delete simulator; }

mcf_status mcf_simulate_poisson_raster(const double window[4], int raster_nx, int raster_ny,
                                       const double* values, uint64_t seed, mcf_pattern** out) {
    if (auto s = require(window && values && out, "null argument"); s) return s;
    if (auto s = require(raster_nx > 0 && raster_ny > 0, "raster dimensions must be positive"); s) {
        return s;
    }
    return guarded([&] {
        const Window w = to_window(window);
        const QuadratureGrid raster(w, raster_nx, raster_ny);
        std::vector<double> grid_values(values,
                                        values + static_cast<size_t>(raster_nx) * raster_ny);
        *out = new mcf_pattern{simulate_inhomogeneous_poisson(
            [&raster, &grid_values](double x, double y) {
                return grid_values[raster.cell_index({x, y})];
            },
            w, seed)};
    });
}

mcf_status mcf_assign_marks(const mcf_pattern* pattern, const char* rule, uint64_t seed,
                            mcf_pattern** out) {
    if (auto s = require(pattern && rule && out, "null argument"); s) return s;
    return guarded([&] {
        *out = new mcf_pattern{assign_marks(pattern->value, mark_rule_from_name(rule), seed)};
    });
}

/* ---- power study ---------------------------------------------------------- */

mcf_status mcf_power_study(const char* preset, int n_patterns, int permutations, double alpha,
                           uint64_t seed, const mcf_statistic_spec* statistic_or_null,
                           mcf_power_result* out) {
    if (auto s = require(preset && out, "null argument"); s) return s;
    return guarded([&] {
        PowerStudyConfig config;
        config.preset = preset;
        config.n_patterns = n_patterns;
        config.permutations = permutations;
        config.alpha = alpha;
        config.seed = seed;
        config.statistic = to_statistic_spec(statistic_or_null);
        const PowerStudyResult result = run_power_study(config);
        out->power_inhomogeneous = result.power_inhomogeneous;
        out->power_homogeneous = result.power_homogeneous;
        out->type1_inhomogeneous = result.type1_inhomogeneous;
        out->type1_homogeneous = result.type1_homogeneous;
        out->completed_power = result.completed_power;
        out->completed_type1 = result.completed_type1;
        out->failures = result.failures;
    });
}

} // extern "C"
