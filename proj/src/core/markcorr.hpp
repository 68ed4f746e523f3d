#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "intensity.hpp"
#include "pattern.hpp"

namespace markcorr {

// Symmetric nonnegative function of two marks plus the rule for the
// normalising constant used by the kappa curves.
struct TestFunction {
    enum class Normalizer { mean_squared, variance, constant };

    std::string id;
    std::function<double(double, double)> f;
    Normalizer normalizer = Normalizer::mean_squared;
    double constant = std::numeric_limits<double>::quiet_NaN();

    // tf(m1, m2) = m1 * m2, normalised by the squared mark mean
    static TestFunction mm();
    // tf(m1, m2) = 0.5 (m1 - m2)^2, normalised by the mark variance
    static TestFunction vario();
    static TestFunction with_constant(std::string id, std::function<double(double, double)> f,
                                      double normalizer);
};

// Evaluation grid for all distance curves, plus the pair-kernel bandwidth.
struct RGrid {
    std::vector<double> r;
    double pair_bandwidth = 0.0;

    // steps+1 equispaced values from 0 to r_max
    static RGrid regular(double r_max, int steps, double pair_bandwidth);
    std::size_t size() const { return r.size(); }
};

// Rule-of-thumb pair-kernel bandwidth, 0.15 / sqrt(n / area).
double stoyan_pair_bandwidth(std::size_t n_points, double window_area);

enum class EdgeCorrection { translation, ripley };
enum class Flavor { homogeneous, inhomogeneous };
enum class CurveForm { density, cumulative }; // kernel-smoothed vs indicator sums
enum class CurveKind { numerator, denominator, c_unnorm, kappa, pcf, k_ratio };

const char* edge_correction_name(EdgeCorrection e);
const char* flavor_name(Flavor f);
const char* curve_kind_name(CurveKind k);
const char* curve_form_name(CurveForm f);

struct SummaryCurve {
    RGrid grid;
    std::vector<double> values;
    std::vector<std::uint8_t> missing;
    CurveKind kind = CurveKind::c_unnorm;
    Flavor flavor = Flavor::inhomogeneous;
    EdgeCorrection edge = EdgeCorrection::translation;
    std::string intensity_provenance;
    double normalizer = std::numeric_limits<double>::quiet_NaN();
};

// Everything in the pair sums except the marks: for each close pair, the
// kernel (or indicator) weight times edge correction over the intensity
// product. Build once per pattern geometry, then evaluate cheaply for any
// mark vector - permutation tests reuse one plan for all relabellings.
class PairSumPlan {
public:
    PairSumPlan(const MarkedPointPattern& pattern, const std::vector<double>& intensity_at_points,
                const RGrid& rgrid, EdgeCorrection edge, CurveForm form);

    // Sum over unordered pairs of tf(m_i, m_j) * w; cumulative form returns
    // prefix sums over r. No 1/(2 pi r |W|) prefactor.
    std::vector<double> numerator_raw(const std::vector<double>& marks,
                                      const TestFunction& tf) const;
    const std::vector<double>& denominator_raw() const { return denominator_raw_; }

    const RGrid& rgrid() const { return rgrid_; }
    CurveForm form() const { return form_; }
    double window_area() const { return window_area_; }
    std::size_t n_points() const { return n_points_; }

    // Denominator stability floor; entries below it are flagged missing.
    double denominator_floor() const { return denominator_floor_; }

    // values = num_raw/den_raw (optionally / normalizer); missing below floor
    SummaryCurve ratio_curve(const std::vector<double>& numerator_raw, CurveKind kind,
                             double normalizer) const;
    // values = raw / (2 pi r |W|), r = 0 flagged missing
    SummaryCurve density_curve(const std::vector<double>& raw, CurveKind kind) const;

private:
    struct Entry {
        std::uint32_t i;
        std::uint32_t j;
        std::uint32_t bin;
        double weight;
    };
    std::vector<Entry> entries_;
    std::vector<double> denominator_raw_;
    RGrid rgrid_;
    CurveForm form_;
    double window_area_ = 0.0;
    double denominator_floor_ = 0.0;
    std::size_t n_points_ = 0;
};

double normalizer_value(const MarkedPointPattern& pattern, const TestFunction& tf);

// Kernel-smoothed pair-sum estimators on the r grid. The inhomogeneous ops
// weight each pair by 1/(lambda(x) lambda(y)); the homogeneous ops are the
// same with the constant field N/|W|.
SummaryCurve pairsum_numerator(const MarkedPointPattern& pattern, const TestFunction& tf,
                               const IntensityField& intensity, const RGrid& rgrid,
                               EdgeCorrection edge);
SummaryCurve pairsum_denominator(const MarkedPointPattern& pattern, const IntensityField& intensity,
                                 const RGrid& rgrid, EdgeCorrection edge);
SummaryCurve c_inhom(const MarkedPointPattern& pattern, const TestFunction& tf,
                     const IntensityField& intensity, const RGrid& rgrid, EdgeCorrection edge);
SummaryCurve kappa_inhom(const MarkedPointPattern& pattern, const TestFunction& tf,
                         const IntensityField& intensity, const RGrid& rgrid, EdgeCorrection edge);
SummaryCurve c_homogeneous(const MarkedPointPattern& pattern, const TestFunction& tf,
                           const RGrid& rgrid, EdgeCorrection edge);
SummaryCurve kappa_homogeneous(const MarkedPointPattern& pattern, const TestFunction& tf,
                               const RGrid& rgrid, EdgeCorrection edge);

// Cumulative (indicator) form of the ratio, and its homogeneous reduction.
SummaryCurve k_ratio_inhom(const MarkedPointPattern& pattern, const TestFunction& tf,
                           const IntensityField& intensity, const RGrid& rgrid,
                           EdgeCorrection edge);
SummaryCurve k_ratio_homogeneous(const MarkedPointPattern& pattern, const TestFunction& tf,
                                 const RGrid& rgrid, EdgeCorrection edge);

// Intensity-reweighted pair correlation function of the ground process.
SummaryCurve pcf_inhom(const MarkedPointPattern& pattern, const IntensityField& intensity,
                       const RGrid& rgrid, EdgeCorrection edge);

} // namespace markcorr
