#pragma once

#include <string>

#include "envelope.hpp"
#include "intensity.hpp"
#include "markcorr.hpp"

namespace markcorr {

// curve CSV: r,value,kind,flavor,missing
void write_curve_csv(const SummaryCurve& curve, const std::string& path);
// sidecar: bandwidths, edge correction, normalizer, intensity provenance
void write_curve_json(const SummaryCurve& curve, const std::string& path);

// envelope CSV: r,data,lo,hi,central,missing
void write_envelope_csv(const EnvelopeResult& result, const std::string& path);
// verdict: p interval, alpha, s, seed, reject flag, statistic metadata
void write_envelope_json(const EnvelopeResult& result, const std::string& path);

// grid CSV: cell_x,cell_y,value
void write_grid_csv(const QuadratureGrid& grid, const std::vector<double>& values,
                    const std::string& path);
void write_intensity_csv(const IntensityField& field, const std::string& path);
void write_intensity_json(const IntensityField& field, const std::string& path);

void write_surface_csv(const MarkSurface& surface, const std::string& path);
void write_surface_json(const MarkSurface& surface, const std::string& path);

} // namespace markcorr
