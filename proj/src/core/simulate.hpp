#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "pattern.hpp"

namespace markcorr {

struct CovarianceSpec {
    enum class Kind { exponential, gaussian };

    Kind kind = Kind::exponential;
    double variance = 1.0;
    double scale = 1.0; // exponential: exp(-d/scale)
    double rate = 0.0;  // gaussian: exp(-rate * d^2)

    static CovarianceSpec exponential(double variance, double scale) {
        return {Kind::exponential, variance, scale, 0.0};
    }
    static CovarianceSpec gaussian_squared(double variance, double rate) {
        return {Kind::gaussian, variance, 0.0, rate};
    }

    double operator()(double d) const;
};

struct GaussianFieldSample {
    QuadratureGrid grid;
    std::vector<double> values;
    std::uint64_t seed = 0;
};

// Stationary Gaussian field on grid cell centres via dense Cholesky with
// jitter escalation. The factorization happens once at construction; draws
// are matrix-vector products, so replicate generation stays cheap.
class GaussianFieldSampler {
public:
    GaussianFieldSampler(const QuadratureGrid& grid,
                         std::function<double(double, double)> mean, CovarianceSpec covariance);
    ~GaussianFieldSampler();
    GaussianFieldSampler(GaussianFieldSampler&&) noexcept;
    GaussianFieldSampler& operator=(GaussianFieldSampler&&) noexcept;

    GaussianFieldSample draw(std::uint64_t seed) const;
    const QuadratureGrid& grid() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Thinning sampler: the bound is the grid maximum of the intensity times a
// 1.1 safety factor. Marks are zero; assign_marks fills them.
MarkedPointPattern simulate_inhomogeneous_poisson(
    const std::function<double(double, double)>& intensity, const Window& window,
    std::uint64_t seed);

// Draw a field, exponentiate it cellwise, then place per-cell Poisson counts
// uniformly within cells.
MarkedPointPattern simulate_lgcp(const GaussianFieldSampler& sampler, std::uint64_t seed);

enum class MarkRule { sin_association, noisy_amplitude, iid_uniform };

MarkRule mark_rule_from_name(const std::string& name);
const char* mark_rule_name(MarkRule rule);

MarkedPointPattern assign_marks(const MarkedPointPattern& pattern, MarkRule rule,
                                std::uint64_t seed);

struct ScenarioSpec {
    std::string name;
    Window window = Window::unit_square();
    enum class Ground { poisson, lgcp } ground = Ground::poisson;

    // ground intensity; for lgcp this is the expected (lognormal-mean) surface
    std::function<double(double, double)> intensity;
    std::function<double(double, double)> field_mean; // lgcp only
    CovarianceSpec covariance;                        // lgcp only
    int field_nx = 64;
    int field_ny = 64;

    MarkRule mark_rule = MarkRule::sin_association;
};

// Presets: assoc-poisson, assoc-lgcp, vario-poisson, vario-lgcp.
ScenarioSpec scenario_preset(const std::string& name);
std::vector<std::string> scenario_preset_names();

// Caches the field factorization across replicates of one scenario.
class ScenarioSimulator {
public:
    explicit ScenarioSimulator(ScenarioSpec spec);

    const ScenarioSpec& spec() const { return spec_; }

    // Marked pattern for replicate `index`; deterministic in (seed, index).
    MarkedPointPattern replicate(std::uint64_t seed, std::uint64_t index) const;
    // Ground process only (marks zero).
    MarkedPointPattern replicate_ground(std::uint64_t seed, std::uint64_t index) const;

private:
    ScenarioSpec spec_;
    std::shared_ptr<const GaussianFieldSampler> field_; // null for poisson ground
};

} // namespace markcorr
