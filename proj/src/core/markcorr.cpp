#include "markcorr.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace markcorr {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double epanechnikov(double t, double h) {
    const double u = t / h;
    return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) / h : 0.0;
}
} // namespace

TestFunction TestFunction::mm() {
    return {"mm", [](double a, double b) { return a * b; }, Normalizer::mean_squared,
            std::numeric_limits<double>::quiet_NaN()};
}

TestFunction TestFunction::vario() {
    return {"vario", [](double a, double b) { return 0.5 * (a - b) * (a - b); },
            Normalizer::variance, std::numeric_limits<double>::quiet_NaN()};
}

TestFunction TestFunction::with_constant(std::string id, std::function<double(double, double)> f,
                                         double normalizer) {
    return {std::move(id), std::move(f), Normalizer::constant, normalizer};
}

RGrid RGrid::regular(double r_max, int steps, double pair_bandwidth) {
    if (!(r_max > 0.0)) fail(ErrorCode::invalid_argument, "r_max must be positive");
    if (steps < 1) fail(ErrorCode::invalid_argument, "r grid needs at least 2 values");
    if (!(pair_bandwidth > 0.0)) fail(ErrorCode::invalid_argument, "pair bandwidth must be positive");
    RGrid grid;
    grid.pair_bandwidth = pair_bandwidth;
    grid.r.resize(steps + 1);
    for (int i = 0; i <= steps; ++i) grid.r[i] = r_max * static_cast<double>(i) / steps;
    return grid;
}

double stoyan_pair_bandwidth(std::size_t n_points, double window_area) {
    return 0.15 / std::sqrt(static_cast<double>(n_points) / window_area);
}

const char* edge_correction_name(EdgeCorrection e) {
    return e == EdgeCorrection::translation ? "translation" : "ripley";
}
const char* flavor_name(Flavor f) {
    return f == Flavor::homogeneous ? "homogeneous" : "inhomogeneous";
}
const char* curve_kind_name(CurveKind k) {
    switch (k) {
        case CurveKind::numerator: return "numerator";
        case CurveKind::denominator: return "denominator";
        case CurveKind::c_unnorm: return "c_unnorm";
        case CurveKind::kappa: return "kappa";
        case CurveKind::pcf: return "pcf";
        case CurveKind::k_ratio: return "k_ratio";
    }
    return "unknown";
}
const char* curve_form_name(CurveForm f) {
    return f == CurveForm::density ? "density" : "cumulative";
}

PairSumPlan::PairSumPlan(const MarkedPointPattern& pattern,
                         const std::vector<double>& intensity_at_points, const RGrid& rgrid,
                         EdgeCorrection edge, CurveForm form)
    : rgrid_(rgrid), form_(form), window_area_(pattern.window().area()),
      n_points_(pattern.size()) {
    if (pattern.size() < 2) {
        fail(ErrorCode::domain, "pair sums need at least 2 points, got " +
                                    std::to_string(pattern.size()));
    }
    if (intensity_at_points.size() != pattern.size()) {
        fail(ErrorCode::invalid_argument, "intensity values do not match the pattern size");
    }
    if (rgrid.r.size() < 2) fail(ErrorCode::invalid_argument, "r grid needs at least 2 values");
    for (std::size_t k = 0; k + 1 < rgrid.r.size(); ++k) {
        if (!(rgrid.r[k] < rgrid.r[k + 1])) {
            fail(ErrorCode::invalid_argument, "r grid must be strictly increasing");
        }
    }
    if (rgrid.r.front() < 0.0) fail(ErrorCode::invalid_argument, "r grid must be nonnegative");
    for (double v : intensity_at_points) {
        if (!(v > 0.0)) fail(ErrorCode::domain, "intensity must be positive at every data point");
    }

    const double intensity_scale =
        static_cast<double>(pattern.size()) / window_area_;
    denominator_floor_ = 1e-12 * intensity_scale * intensity_scale;

    const Window& w = pattern.window();
    const double h = rgrid.pair_bandwidth;
    const std::size_t k_bins = rgrid.r.size();
    denominator_raw_.assign(k_bins, 0.0);

    for (std::size_t i = 0; i + 1 < pattern.size(); ++i) {
        for (std::size_t j = i + 1; j < pattern.size(); ++j) {
            const Point a = pattern.point(i);
            const Point b = pattern.point(j);
            const double d = distance(a, b);
            if (d == 0.0) continue; // coincident points carry no pair weight

            double edge_sum; // e(a,b) + e(b,a)
            if (edge == EdgeCorrection::translation) {
                edge_sum = 2.0 * translation_correction(w, a, b);
            } else {
                edge_sum = ripley_correction(w, a, d) + ripley_correction(w, b, d);
            }
            const double base = edge_sum / (intensity_at_points[i] * intensity_at_points[j]);

            if (form_ == CurveForm::density) {
                // bins with |d - r| < h
                const auto lo = std::lower_bound(rgrid.r.begin(), rgrid.r.end(), d - h);
                const auto hi = std::upper_bound(rgrid.r.begin(), rgrid.r.end(), d + h);
                for (auto it = lo; it != hi; ++it) {
                    const double kernel = epanechnikov(d - *it, h);
                    if (kernel <= 0.0) continue;
                    const auto bin = static_cast<std::uint32_t>(it - rgrid.r.begin());
                    entries_.push_back({static_cast<std::uint32_t>(i),
                                        static_cast<std::uint32_t>(j), bin, kernel * base});
                    denominator_raw_[bin] += kernel * base;
                }
            } else {
                // first bin with r >= d; prefix sums later make it cumulative
                const auto it = std::lower_bound(rgrid.r.begin(), rgrid.r.end(), d);
                if (it == rgrid.r.end()) continue;
                const auto bin = static_cast<std::uint32_t>(it - rgrid.r.begin());
                entries_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                    bin, base});
                denominator_raw_[bin] += base;
            }
        }
    }
    if (form_ == CurveForm::cumulative) {
        for (std::size_t k = 1; k < k_bins; ++k) denominator_raw_[k] += denominator_raw_[k - 1];
    }
}

std::vector<double> PairSumPlan::numerator_raw(const std::vector<double>& marks,
                                               const TestFunction& tf) const {
    if (marks.size() != n_points_) {
        fail(ErrorCode::invalid_argument, "mark vector does not match the plan's pattern size");
    }
    std::vector<double> raw(rgrid_.r.size(), 0.0);
    for (const Entry& e : entries_) {
        raw[e.bin] += tf.f(marks[e.i], marks[e.j]) * e.weight;
    }
    if (form_ == CurveForm::cumulative) {
        for (std::size_t k = 1; k < raw.size(); ++k) raw[k] += raw[k - 1];
    }
    return raw;
}

SummaryCurve PairSumPlan::ratio_curve(const std::vector<double>& numerator_raw, CurveKind kind,
                                      double normalizer) const {
    SummaryCurve curve;
    curve.grid = rgrid_;
    curve.kind = kind;
    curve.normalizer = normalizer;
    const std::size_t k_bins = rgrid_.r.size();
    curve.values.assign(k_bins, std::numeric_limits<double>::quiet_NaN());
    curve.missing.assign(k_bins, 1);
    bool any_valid = false;
    for (std::size_t k = 0; k < k_bins; ++k) {
        if (denominator_raw_[k] < denominator_floor_) continue;
        curve.values[k] = numerator_raw[k] / denominator_raw_[k] / normalizer;
        curve.missing[k] = 0;
        any_valid = true;
    }
    if (!any_valid) {
        fail(ErrorCode::numeric, "no r grid entry has a usable denominator");
    }
    return curve;
}

SummaryCurve PairSumPlan::density_curve(const std::vector<double>& raw, CurveKind kind) const {
    SummaryCurve curve;
    curve.grid = rgrid_;
    curve.kind = kind;
    const std::size_t k_bins = rgrid_.r.size();
    curve.values.assign(k_bins, std::numeric_limits<double>::quiet_NaN());
    curve.missing.assign(k_bins, 1);
    for (std::size_t k = 0; k < k_bins; ++k) {
        const double r = rgrid_.r[k];
        if (r == 0.0) continue; // prefactor singular
        curve.values[k] = raw[k] / (kTwoPi * r * window_area_);
        curve.missing[k] = 0;
    }
    return curve;
}

double normalizer_value(const MarkedPointPattern& pattern, const TestFunction& tf) {
    switch (tf.normalizer) {
        case TestFunction::Normalizer::mean_squared: {
            const MarkSummary s = mark_summary(pattern);
            const double value = s.mean * s.mean;
            if (value == 0.0) {
                fail(ErrorCode::domain, "zero normalizer: mark mean is zero for `" + tf.id + "`");
            }
            return value;
        }
        case TestFunction::Normalizer::variance: {
            const MarkSummary s = mark_summary(pattern);
            if (s.variance == 0.0) {
                fail(ErrorCode::domain,
                     "zero normalizer: marks are constant, `" + tf.id + "` has no scale");
            }
            return s.variance;
        }
        case TestFunction::Normalizer::constant:
            if (!(tf.constant > 0.0) && tf.constant != 0.0) {
                // NaN or negative
                fail(ErrorCode::invalid_argument, "custom normalizer must be a finite number");
            }
            if (tf.constant == 0.0) fail(ErrorCode::domain, "zero normalizer for `" + tf.id + "`");
            return tf.constant;
    }
    fail(ErrorCode::invalid_argument, "unknown normalizer rule");
}

namespace {

struct CurveMeta {
    Flavor flavor;
    EdgeCorrection edge;
    std::string provenance;
};

SummaryCurve finish(SummaryCurve curve, const CurveMeta& meta) {
    curve.flavor = meta.flavor;
    curve.edge = meta.edge;
    curve.intensity_provenance = meta.provenance;
    return curve;
}

CurveMeta meta_for(const IntensityField& intensity, EdgeCorrection edge) {
    const Flavor flavor = intensity.kind == IntensityKind::constant ? Flavor::homogeneous
                                                                    : Flavor::inhomogeneous;
    return {flavor, edge, intensity_kind_name(intensity.kind)};
}

} // namespace

SummaryCurve pairsum_numerator(const MarkedPointPattern& pattern, const TestFunction& tf,
                               const IntensityField& intensity, const RGrid& rgrid,
                               EdgeCorrection edge) {
    PairSumPlan plan(pattern, intensity.weight_values(), rgrid, edge, CurveForm::density);
    return finish(plan.density_curve(plan.numerator_raw(pattern.marks(), tf), CurveKind::numerator),
                  meta_for(intensity, edge));
}

SummaryCurve pairsum_denominator(const MarkedPointPattern& pattern, const IntensityField& intensity,
                                 const RGrid& rgrid, EdgeCorrection edge) {
    PairSumPlan plan(pattern, intensity.weight_values(), rgrid, edge, CurveForm::density);
    return finish(plan.density_curve(plan.denominator_raw(), CurveKind::denominator),
                  meta_for(intensity, edge));
}

SummaryCurve c_inhom(const MarkedPointPattern& pattern, const TestFunction& tf,
                     const IntensityField& intensity, const RGrid& rgrid, EdgeCorrection edge) {
    PairSumPlan plan(pattern, intensity.weight_values(), rgrid, edge, CurveForm::density);
    return finish(plan.ratio_curve(plan.numerator_raw(pattern.marks(), tf), CurveKind::c_unnorm,
                                   1.0),
                  meta_for(intensity, edge));
}

SummaryCurve kappa_inhom(const MarkedPointPattern& pattern, const TestFunction& tf,
                         const IntensityField& intensity, const RGrid& rgrid, EdgeCorrection edge) {
    const double norm = normalizer_value(pattern, tf);
    PairSumPlan plan(pattern, intensity.weight_values(), rgrid, edge, CurveForm::density);
    return finish(plan.ratio_curve(plan.numerator_raw(pattern.marks(), tf), CurveKind::kappa, norm),
                  meta_for(intensity, edge));
}

SummaryCurve c_homogeneous(const MarkedPointPattern& pattern, const TestFunction& tf,
                           const RGrid& rgrid, EdgeCorrection edge) {
    const QuadratureGrid grid(pattern.window(), 1, 1);
    return c_inhom(pattern, tf, constant_intensity(pattern, grid), rgrid, edge);
}

SummaryCurve kappa_homogeneous(const MarkedPointPattern& pattern, const TestFunction& tf,
                               const RGrid& rgrid, EdgeCorrection edge) {
    const QuadratureGrid grid(pattern.window(), 1, 1);
    return kappa_inhom(pattern, tf, constant_intensity(pattern, grid), rgrid, edge);
}

SummaryCurve k_ratio_inhom(const MarkedPointPattern& pattern, const TestFunction& tf,
                           const IntensityField& intensity, const RGrid& rgrid,
                           EdgeCorrection edge) {
    PairSumPlan plan(pattern, intensity.weight_values(), rgrid, edge, CurveForm::cumulative);
    auto curve = plan.ratio_curve(plan.numerator_raw(pattern.marks(), tf), CurveKind::k_ratio, 1.0);
    return finish(std::move(curve), meta_for(intensity, edge));
}

SummaryCurve k_ratio_homogeneous(const MarkedPointPattern& pattern, const TestFunction& tf,
                                 const RGrid& rgrid, EdgeCorrection edge) {
    const QuadratureGrid grid(pattern.window(), 1, 1);
    return k_ratio_inhom(pattern, tf, constant_intensity(pattern, grid), rgrid, edge);
}

SummaryCurve pcf_inhom(const MarkedPointPattern& pattern, const IntensityField& intensity,
                       const RGrid& rgrid, EdgeCorrection edge) {
    PairSumPlan plan(pattern, intensity.weight_values(), rgrid, edge, CurveForm::density);
    auto curve = plan.density_curve(plan.denominator_raw(), CurveKind::pcf);
    return finish(std::move(curve), meta_for(intensity, edge));
}

} // namespace markcorr
