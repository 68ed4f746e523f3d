#include "export.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "io_util.hpp"

namespace markcorr {

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

nlohmann::json json_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

} // namespace

void write_curve_csv(const SummaryCurve& curve, const std::string& path) {
    std::string out = "r,value,kind,flavor,missing\n";
    for (std::size_t k = 0; k < curve.values.size(); ++k) {
        out += format_double(curve.grid.r[k]);
        out += ',';
        out += format_double(curve.values[k]);
        out += ',';
        out += curve_kind_name(curve.kind);
        out += ',';
        out += flavor_name(curve.flavor);
        out += ',';
        out += curve.missing[k] ? '1' : '0';
        out += '\n';
    }
    write_text_atomic(path, out);
}

void write_curve_json(const SummaryCurve& curve, const std::string& path) {
    nlohmann::json j;
    j["kind"] = curve_kind_name(curve.kind);
    j["flavor"] = flavor_name(curve.flavor);
    j["edge_correction"] = edge_correction_name(curve.edge);
    j["pair_bandwidth"] = curve.grid.pair_bandwidth;
    j["r_min"] = curve.grid.r.front();
    j["r_max"] = curve.grid.r.back();
    j["r_count"] = curve.grid.r.size();
    j["normalizer"] = json_or_null(curve.normalizer);
    j["intensity"] = curve.intensity_provenance;
    write_text_atomic(path, j.dump(2) + "\n");
}

void write_envelope_csv(const EnvelopeResult& result, const std::string& path) {
    std::string out = "r,data,lo,hi,central,missing\n";
    for (std::size_t k = 0; k < result.data_curve.size(); ++k) {
        out += format_double(result.grid.r[k]);
        out += ',';
        out += format_double(result.data_curve[k]);
        out += ',';
        out += format_double(result.lower[k]);
        out += ',';
        out += format_double(result.upper[k]);
        out += ',';
        out += format_double(result.central[k]);
        out += ',';
        out += result.missing[k] ? '1' : '0';
        out += '\n';
    }
    write_text_atomic(path, out);
}

void write_envelope_json(const EnvelopeResult& result, const std::string& path) {
    nlohmann::json j;
    j["p_lower"] = result.p_lower;
    j["p_upper"] = result.p_upper;
    j["alpha"] = result.alpha;
    j["permutations"] = result.n_permutations;
    j["seed"] = result.seed;
    j["reject"] = result.reject;
    j["boundary_case"] = result.boundary_case;
    j["insufficient_permutations"] = result.insufficient_permutations;
    j["data_erl_rank"] = result.data_erl_rank;
    j["statistic"] = result.statistic_id;
    j["flavor"] = flavor_name(result.flavor);
    j["form"] = curve_form_name(result.form);
    j["edge_correction"] = edge_correction_name(result.edge);
    j["intensity_bandwidth"] = json_or_null(result.intensity_bandwidth);
    j["pair_bandwidth"] = json_or_null(result.pair_bandwidth);
    j["normalizer"] = json_or_null(result.normalizer);
    write_text_atomic(path, j.dump(2) + "\n");
}

namespace {

std::string grid_csv(const QuadratureGrid& grid, const std::vector<double>& values) {
    std::string out = "cell_x,cell_y,value\n";
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const Point u = grid.center(c);
        out += format_double(u.x);
        out += ',';
        out += format_double(u.y);
        out += ',';
        out += format_double(values[c]);
        out += '\n';
    }
    return out;
}

} // namespace

void write_grid_csv(const QuadratureGrid& grid, const std::vector<double>& values,
                    const std::string& path) {
    write_text_atomic(path, grid_csv(grid, values));
}

void write_intensity_csv(const IntensityField& field, const std::string& path) {
    write_text_atomic(path, grid_csv(field.grid, field.grid_values));
}

void write_intensity_json(const IntensityField& field, const std::string& path) {
    nlohmann::json j;
    j["estimator"] = intensity_kind_name(field.kind);
    j["bandwidth"] = json_or_null(field.bandwidth);
    j["clamp_floor"] = field.clamp_floor;
    j["clamp_count"] = field.clamp_count;
    j["grid_nx"] = field.grid.nx();
    j["grid_ny"] = field.grid.ny();
    j["grid_mass"] = field.grid_mass();
    write_text_atomic(path, j.dump(2) + "\n");
}

void write_surface_csv(const MarkSurface& surface, const std::string& path) {
    write_text_atomic(path, grid_csv(surface.grid, surface.values));
}

void write_surface_json(const MarkSurface& surface, const std::string& path) {
    nlohmann::json j;
    j["statistic"] = surface.statistic == SurfaceStatistic::mean ? "mean" : "variance";
    j["bandwidth"] = surface.bandwidth;
    j["grid_nx"] = surface.grid.nx();
    j["grid_ny"] = surface.grid.ny();
    std::size_t missing = 0;
    for (auto m : surface.missing) missing += m;
    j["missing_cells"] = missing;
    write_text_atomic(path, j.dump(2) + "\n");
}

} // namespace markcorr
