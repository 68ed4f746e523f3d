#include "power.hpp"

#include <atomic>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace markcorr {

PowerStudyResult run_power_study(const PowerStudyConfig& config) {
    if (config.n_patterns < 1) fail(ErrorCode::invalid_argument, "need at least one pattern");
    const ScenarioSpec scenario = scenario_preset(config.preset);
    const ScenarioSimulator simulator(scenario);

    const TestFunction tf = scenario.mark_rule == MarkRule::sin_association
                                ? TestFunction::mm()
                                : TestFunction::vario();

    PowerStudyResult result;
    result.preset = config.preset;
    result.statistic_id = tf.id;
    result.n_patterns = config.n_patterns;

    struct Cell {
        std::atomic<int> rejected{0};
        std::atomic<int> completed{0};
    };
    Cell power_inhom, power_hom, type1_inhom, type1_hom;
    std::atomic<int> failures{0};

    const auto run_one = [&](const MarkedPointPattern& pattern, Flavor flavor, Cell& cell,
                             std::uint64_t perm_seed) {
        StatisticSpec spec = config.statistic;
        spec.tf = tf;
        spec.flavor = flavor;
        const EnvelopeResult env =
            run_random_labelling_test(pattern, spec, config.permutations, config.alpha, perm_seed);
        cell.completed.fetch_add(1);
        if (env.reject) cell.rejected.fetch_add(1);
    };

    parallel_for(static_cast<std::size_t>(config.n_patterns), [&](std::size_t i) {
        try {
            const MarkedPointPattern pattern = simulator.replicate(config.seed, i);
            const MarkedPointPattern null_pattern =
                assign_marks(pattern, MarkRule::iid_uniform,
                             derive_key(config.seed, RngStream::null_marks, i));

            const std::uint64_t perm_seed = derive_key(config.seed, RngStream::pattern, i);
            run_one(pattern, Flavor::inhomogeneous, power_inhom, perm_seed);
            run_one(pattern, Flavor::homogeneous, power_hom, perm_seed + 1);
            run_one(null_pattern, Flavor::inhomogeneous, type1_inhom, perm_seed + 2);
            run_one(null_pattern, Flavor::homogeneous, type1_hom, perm_seed + 3);
        } catch (const Error&) {
            failures.fetch_add(1);
        }
    });

    const auto rate = [](const Cell& cell) {
        const int done = cell.completed.load();
        return done > 0 ? static_cast<double>(cell.rejected.load()) / done : 0.0;
    };
    result.power_inhomogeneous = rate(power_inhom);
    result.power_homogeneous = rate(power_hom);
    result.type1_inhomogeneous = rate(type1_inhom);
    result.type1_homogeneous = rate(type1_hom);
    result.completed_power = power_inhom.completed.load();
    result.completed_type1 = type1_inhom.completed.load();
    result.failures = failures.load();
    return result;
}

} // namespace markcorr
