#pragma once

#include <cstdint>
#include <vector>

#include "markcorr.hpp"

namespace markcorr {

// Data curve plus permutation curves on one r grid. Grid entries missing in
// any curve are masked out of the ranking for all curves.
struct CurveEnsemble {
    RGrid grid;
    std::vector<std::vector<double>> curves; // curves[0] is the data curve
    std::vector<std::uint8_t> missing;       // shared mask, one flag per grid entry
};

// Two-sided pointwise ranks over the valid grid entries: for each curve and
// entry, min(#strictly below, #strictly above); smaller = more extreme.
// ranks[i] is indexed by valid-entry position.
std::vector<std::vector<int>> pointwise_ranks(const CurveEnsemble& ensemble);

// A curve's extreme-rank-length vector: its pointwise ranks sorted ascending.
// Curves compare by lexicographic order of these vectors (smaller = more
// extreme); equal vectors tie.
std::vector<std::vector<int>> erl_vectors(const std::vector<std::vector<int>>& ranks);

struct EnvelopeResult {
    RGrid grid;
    std::vector<double> data_curve;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> central; // pointwise median of the permutation curves
    std::vector<std::uint8_t> missing;

    double p_lower = 0.0;
    double p_upper = 0.0;
    double alpha = 0.05;
    int n_permutations = 0;   // s
    int data_erl_rank = 0;    // #{curves at least as extreme as the data curve}
    bool reject = false;      // p_upper < alpha
    bool boundary_case = false;
    bool insufficient_permutations = false; // alpha * (s+1) < 1
    std::uint64_t seed = 0;

    // statistic metadata for sidecar files
    std::string statistic_id;
    Flavor flavor = Flavor::inhomogeneous;
    CurveForm form = CurveForm::density;
    EdgeCorrection edge = EdgeCorrection::translation;
    double intensity_bandwidth = std::numeric_limits<double>::quiet_NaN();
    double pair_bandwidth = std::numeric_limits<double>::quiet_NaN();
    double normalizer = std::numeric_limits<double>::quiet_NaN();
};

EnvelopeResult rank_envelope_test(const CurveEnsemble& ensemble, double alpha);

// Curve recipe for the permutation test.
struct StatisticSpec {
    Flavor flavor = Flavor::inhomogeneous;
    TestFunction tf = TestFunction::mm();
    CurveForm form = CurveForm::density;
    EdgeCorrection edge = EdgeCorrection::translation;

    double r_max = 0.0;               // <= 0: shorter window side / 4
    int r_steps = 100;                // grid has r_steps + 1 values
    double pair_bandwidth = 0.0;      // <= 0: Stoyan rule of thumb
    double intensity_bandwidth = 0.0; // <= 0: Cronie-van Lieshout selection
    int grid_nx = 128;
    int grid_ny = 128;

    // Known intensity surface; overrides estimation when set.
    const IntensityField* intensity_override = nullptr;
};

RGrid resolve_rgrid(const StatisticSpec& spec, const MarkedPointPattern& pattern);

// Estimates the intensity once from the locations, evaluates the statistic on
// the data marks and on s random relabellings, and runs the rank envelope
// test. Deterministic in seed.
EnvelopeResult run_random_labelling_test(const MarkedPointPattern& pattern,
                                         const StatisticSpec& spec, int permutations, double alpha,
                                         std::uint64_t seed);

} // namespace markcorr
