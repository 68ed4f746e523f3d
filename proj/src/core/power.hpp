#pragma once

#include <cstdint>
#include <string>

#include "envelope.hpp"
#include "simulate.hpp"

namespace markcorr {

struct PowerStudyConfig {
    std::string preset = "assoc-poisson";
    int n_patterns = 50;
    int permutations = 199;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    StatisticSpec statistic; // tf is taken from the preset's mark family
};

// Per (flavor, mark rule) cell: rejection rate over the completed patterns.
struct PowerStudyResult {
    std::string preset;
    std::string statistic_id; // mm for association scenarios, vario otherwise
    int n_patterns = 0;

    double power_inhomogeneous = 0.0;
    double power_homogeneous = 0.0;
    double type1_inhomogeneous = 0.0;
    double type1_homogeneous = 0.0;

    int completed_power = 0; // patterns contributing to the power cells
    int completed_type1 = 0;
    int failures = 0; // patterns dropped because some stage errored
};

// Simulates n patterns from the preset and tests each with both estimator
// flavors, under the preset's mark rule (power) and under iid uniform
// relabelling of the same locations (type I error).
PowerStudyResult run_power_study(const PowerStudyConfig& config);

} // namespace markcorr
