#include "envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace markcorr {

namespace {

std::vector<std::size_t> valid_indices(const CurveEnsemble& ensemble) {
    std::vector<std::size_t> valid;
    for (std::size_t j = 0; j < ensemble.missing.size(); ++j) {
        if (!ensemble.missing[j]) valid.push_back(j);
    }
    return valid;
}

} // namespace

std::vector<std::vector<int>> pointwise_ranks(const CurveEnsemble& ensemble) {
    const std::size_t n_curves = ensemble.curves.size();
    if (n_curves < 2) fail(ErrorCode::invalid_argument, "ranking needs at least 2 curves");
    const auto valid = valid_indices(ensemble);

    std::vector<std::vector<int>> ranks(n_curves, std::vector<int>(valid.size()));
    std::vector<double> sorted(n_curves);
    for (std::size_t v = 0; v < valid.size(); ++v) {
        const std::size_t j = valid[v];
        for (std::size_t i = 0; i < n_curves; ++i) sorted[i] = ensemble.curves[i][j];
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n_curves; ++i) {
            const double value = ensemble.curves[i][j];
            const auto lo = std::lower_bound(sorted.begin(), sorted.end(), value);
            const auto hi = std::upper_bound(lo, sorted.end(), value);
            const int below = static_cast<int>(lo - sorted.begin());
            const int above = static_cast<int>(sorted.end() - hi);
            ranks[i][v] = std::min(below, above);
        }
    }
    return ranks;
}

std::vector<std::vector<int>> erl_vectors(const std::vector<std::vector<int>>& ranks) {
    std::vector<std::vector<int>> erl = ranks;
    for (auto& vec : erl) std::sort(vec.begin(), vec.end());
    return erl;
}

EnvelopeResult rank_envelope_test(const CurveEnsemble& ensemble, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        fail(ErrorCode::invalid_argument, "alpha must lie in (0, 1)");
    }
    const std::size_t n_curves = ensemble.curves.size();
    if (n_curves < 2) fail(ErrorCode::invalid_argument, "envelope test needs permutation curves");
    const int s = static_cast<int>(n_curves) - 1;
    const auto valid = valid_indices(ensemble);
    if (valid.empty()) fail(ErrorCode::numeric, "every grid entry is missing");

    const auto erl = erl_vectors(pointwise_ranks(ensemble));

    int at_least = 0;
    int strictly = 0;
    for (std::size_t i = 0; i < n_curves; ++i) {
        if (erl[i] < erl[0]) ++strictly;
        if (erl[i] <= erl[0]) ++at_least;
    }

    EnvelopeResult result;
    result.grid = ensemble.grid;
    result.missing = ensemble.missing;
    result.data_curve = ensemble.curves[0];
    result.alpha = alpha;
    result.n_permutations = s;
    result.p_upper = static_cast<double>(at_least) / n_curves;
    result.p_lower = static_cast<double>(strictly) / n_curves;
    result.data_erl_rank = at_least;
    result.reject = result.p_upper < alpha;
    result.boundary_case = !result.reject && result.p_lower < alpha;

    const int n_drop = static_cast<int>(std::floor(alpha * n_curves));
    result.insufficient_permutations = n_drop < 1;

    // keep the n_curves - n_drop least extreme curves
    std::vector<std::size_t> order(n_curves);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (erl[a] != erl[b]) return erl[a] < erl[b]; // more extreme first
        return a < b;
    });

    const std::size_t grid_size = ensemble.grid.r.size();
    const auto nan = std::numeric_limits<double>::quiet_NaN();
    result.lower.assign(grid_size, nan);
    result.upper.assign(grid_size, nan);
    result.central.assign(grid_size, nan);

    for (const std::size_t j : valid) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t k = static_cast<std::size_t>(n_drop); k < n_curves; ++k) {
            const double v = ensemble.curves[order[k]][j];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        result.lower[j] = lo;
        result.upper[j] = hi;
    }

    // pointwise median of the permutation curves
    if (s >= 1) {
        std::vector<double> column(s);
        for (const std::size_t j : valid) {
            for (int i = 0; i < s; ++i) column[i] = ensemble.curves[i + 1][j];
            std::sort(column.begin(), column.end());
            result.central[j] =
                (s % 2 == 1) ? column[s / 2] : 0.5 * (column[s / 2 - 1] + column[s / 2]);
        }
    }
    return result;
}

RGrid resolve_rgrid(const StatisticSpec& spec, const MarkedPointPattern& pattern) {
    const double r_max =
        spec.r_max > 0.0 ? spec.r_max : pattern.window().shorter_side() / 4.0;
    const double bandwidth =
        spec.pair_bandwidth > 0.0
            ? spec.pair_bandwidth
            : stoyan_pair_bandwidth(pattern.size(), pattern.window().area());
    return RGrid::regular(r_max, spec.r_steps, bandwidth);
}

EnvelopeResult run_random_labelling_test(const MarkedPointPattern& pattern,
                                         const StatisticSpec& spec, int permutations, double alpha,
                                         std::uint64_t seed) {
    if (permutations < 1) fail(ErrorCode::invalid_argument, "at least one permutation required");
    if (pattern.size() < 2) {
        fail(ErrorCode::domain, "random labelling test needs at least 2 points");
    }

    const RGrid rgrid = resolve_rgrid(spec, pattern);

    // Locations are fixed under random labelling, so the intensity is
    // estimated once and shared by every relabelling.
    double intensity_bandwidth = std::numeric_limits<double>::quiet_NaN();
    IntensityField intensity(QuadratureGrid(pattern.window(), 1, 1));
    if (spec.intensity_override != nullptr) {
        intensity = *spec.intensity_override;
    } else if (spec.flavor == Flavor::homogeneous) {
        intensity = constant_intensity(pattern, QuadratureGrid(pattern.window(), 1, 1));
    } else {
        intensity_bandwidth =
            spec.intensity_bandwidth > 0.0
                ? spec.intensity_bandwidth
                : select_bandwidth_cvl(pattern, default_bandwidth_candidates(pattern.window()));
        intensity = kernel_intensity_mass_conserving(
            pattern, intensity_bandwidth, QuadratureGrid(pattern.window(), spec.grid_nx, spec.grid_ny));
    }

    const PairSumPlan plan(pattern, intensity.weight_values(), rgrid, spec.edge, spec.form);
    const double normalizer = normalizer_value(pattern, spec.tf);

    CurveEnsemble ensemble;
    ensemble.grid = rgrid;
    ensemble.curves.assign(static_cast<std::size_t>(permutations) + 1, {});

    // shared mask: the denominator does not involve marks
    ensemble.missing.assign(rgrid.r.size(), 0);
    for (std::size_t k = 0; k < rgrid.r.size(); ++k) {
        if (plan.denominator_raw()[k] < plan.denominator_floor()) ensemble.missing[k] = 1;
    }
    if (std::all_of(ensemble.missing.begin(), ensemble.missing.end(),
                    [](std::uint8_t m) { return m != 0; })) {
        fail(ErrorCode::numeric, "no r grid entry has a usable denominator");
    }

    const auto kappa_values = [&](const std::vector<double>& marks) {
        auto raw = plan.numerator_raw(marks, spec.tf);
        std::vector<double> values(raw.size(), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t k = 0; k < raw.size(); ++k) {
            if (!ensemble.missing[k]) values[k] = raw[k] / plan.denominator_raw()[k] / normalizer;
        }
        return values;
    };

    ensemble.curves[0] = kappa_values(pattern.marks());
    parallel_for(static_cast<std::size_t>(permutations), [&](std::size_t i) {
        std::vector<double> marks = pattern.marks();
        CounterRng rng(derive_key(seed, RngStream::permutation, i + 1));
        rng.shuffle(marks);
        ensemble.curves[i + 1] = kappa_values(marks);
    });

    EnvelopeResult result = rank_envelope_test(ensemble, alpha);
    result.seed = seed;
    result.statistic_id = spec.tf.id;
    result.flavor = spec.flavor;
    result.form = spec.form;
    result.edge = spec.edge;
    result.intensity_bandwidth = intensity_bandwidth;
    result.pair_bandwidth = rgrid.pair_bandwidth;
    result.normalizer = normalizer;
    return result;
}

} // namespace markcorr
