#include "simulate.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "error.hpp"
#include "rng.hpp"

namespace markcorr {

double CovarianceSpec::operator()(double d) const {
    switch (kind) {
        case Kind::exponential: return variance * std::exp(-d / scale);
        case Kind::gaussian: return variance * std::exp(-rate * d * d);
    }
    return 0.0;
}

struct GaussianFieldSampler::Impl {
    QuadratureGrid grid;
    std::vector<double> mean;
    Eigen::MatrixXd factor; // lower Cholesky factor; empty when variance == 0
};

GaussianFieldSampler::GaussianFieldSampler(const QuadratureGrid& grid,
                                           std::function<double(double, double)> mean,
                                           CovarianceSpec covariance)
    : impl_(new Impl{grid, {}, {}}) {
    const std::size_t n = grid.size();
    impl_->mean.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point u = grid.center(i);
        impl_->mean[i] = mean(u.x, u.y);
        if (!std::isfinite(impl_->mean[i])) {
            fail(ErrorCode::numeric, "field mean not finite on the grid");
        }
    }
    if (covariance.variance < 0.0) {
        fail(ErrorCode::invalid_argument, "field variance must be nonnegative");
    }
    if (covariance.variance == 0.0) return; // degenerate field equals its mean

    Eigen::MatrixXd cov(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = grid.center(i);
        cov(i, i) = covariance.variance;
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point b = grid.center(j);
            const double c = covariance(distance(a, b));
            cov(i, j) = c;
            cov(j, i) = c;
        }
    }

    double jitter = 0.0;
    for (;;) {
        Eigen::MatrixXd attempt = cov;
        if (jitter > 0.0) attempt.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(attempt);
        if (llt.info() == Eigen::Success) {
            impl_->factor = llt.matrixL();
            return;
        }
        jitter = jitter == 0.0 ? 1e-12 * covariance.variance : jitter * 10.0;
        if (jitter > 1e-6 * covariance.variance) {
            fail(ErrorCode::numeric,
                 "covariance matrix not positive definite even with maximal jitter");
        }
    }
}

GaussianFieldSampler::~GaussianFieldSampler() = default;
GaussianFieldSampler::GaussianFieldSampler(GaussianFieldSampler&&) noexcept = default;
GaussianFieldSampler& GaussianFieldSampler::operator=(GaussianFieldSampler&&) noexcept = default;

const QuadratureGrid& GaussianFieldSampler::grid() const { return impl_->grid; }

GaussianFieldSample GaussianFieldSampler::draw(std::uint64_t seed) const {
    const std::size_t n = impl_->grid.size();
    GaussianFieldSample sample{impl_->grid, std::vector<double>(impl_->mean), seed};
    if (impl_->factor.size() == 0) return sample;

    CounterRng rng(derive_key(seed, RngStream::field, 0));
    Eigen::VectorXd normals(n);
    for (std::size_t i = 0; i < n; ++i) normals[i] = rng.next_normal();
    const Eigen::VectorXd correlated = impl_->factor * normals;
    for (std::size_t i = 0; i < n; ++i) sample.values[i] += correlated[i];
    return sample;
}

MarkedPointPattern simulate_inhomogeneous_poisson(
    const std::function<double(double, double)>& intensity, const Window& window,
    std::uint64_t seed) {
    // bound via grid maximization
    constexpr int kMaxGrid = 256;
    const QuadratureGrid probe(window, kMaxGrid, kMaxGrid);
    double bound = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        const Point u = probe.center(i);
        const double v = intensity(u.x, u.y);
        if (!std::isfinite(v)) {
            fail(ErrorCode::numeric, "intensity not finite during bound computation");
        }
        if (v < 0.0) fail(ErrorCode::invalid_argument, "intensity must be nonnegative");
        bound = std::max(bound, v);
    }
    bound *= 1.1;

    std::vector<Point> points;
    std::vector<double> marks;
    if (bound > 0.0) {
        CounterRng rng(derive_key(seed, RngStream::placement, 0));
        const long total = rng.next_poisson(bound * window.area());
        points.reserve(static_cast<std::size_t>(total));
        for (long k = 0; k < total; ++k) {
            const Point u{
                std::clamp(window.xmin() + rng.next_double() * window.width(), window.xmin(),
                           window.xmax()),
                std::clamp(window.ymin() + rng.next_double() * window.height(), window.ymin(),
                           window.ymax())};
            const double keep = intensity(u.x, u.y) / bound;
            if (rng.next_double() < keep) points.push_back(u);
        }
        marks.assign(points.size(), 0.0);
    }
    return MarkedPointPattern(window, std::move(points), std::move(marks));
}

MarkedPointPattern simulate_lgcp(const GaussianFieldSampler& sampler, std::uint64_t seed) {
    const GaussianFieldSample field = sampler.draw(seed);
    const QuadratureGrid& grid = field.grid;
    const Window& window = grid.window();

    CounterRng rng(derive_key(seed, RngStream::placement, 1));
    std::vector<Point> points;
    const double cell_area = grid.cell_area();
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const double cell_intensity = std::exp(field.values[c]);
        const long count = rng.next_poisson(cell_intensity * cell_area);
        const Point centre = grid.center(c);
        for (long k = 0; k < count; ++k) {
            // clamp guards against the cell edge rounding past the window
            points.push_back(
                {std::clamp(centre.x + (rng.next_double() - 0.5) * grid.dx(), window.xmin(),
                            window.xmax()),
                 std::clamp(centre.y + (rng.next_double() - 0.5) * grid.dy(), window.ymin(),
                            window.ymax())});
        }
    }
    std::vector<double> marks(points.size(), 0.0);
    return MarkedPointPattern(window, std::move(points), std::move(marks));
}

MarkRule mark_rule_from_name(const std::string& name) {
    if (name == "sin-association") return MarkRule::sin_association;
    if (name == "noisy-amplitude") return MarkRule::noisy_amplitude;
    if (name == "iid-uniform") return MarkRule::iid_uniform;
    fail(ErrorCode::invalid_argument, "unknown mark rule `" + name + "`");
}

const char* mark_rule_name(MarkRule rule) {
    switch (rule) {
        case MarkRule::sin_association: return "sin-association";
        case MarkRule::noisy_amplitude: return "noisy-amplitude";
        case MarkRule::iid_uniform: return "iid-uniform";
    }
    return "unknown";
}

MarkedPointPattern assign_marks(const MarkedPointPattern& pattern, MarkRule rule,
                                std::uint64_t seed) {
    CounterRng rng(derive_key(seed, RngStream::marks, 0));
    std::vector<double> marks(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const Point p = pattern.point(i);
        switch (rule) {
            case MarkRule::sin_association:
                marks[i] = std::sin(p.x * p.x + p.y * p.y);
                break;
            case MarkRule::noisy_amplitude:
                marks[i] = 0.5 * rng.next_double() * std::sin(std::hypot(p.x, p.y));
                break;
            case MarkRule::iid_uniform:
                marks[i] = rng.next_double();
                break;
        }
    }
    return MarkedPointPattern(pattern.window(), pattern.points(), std::move(marks));
}

ScenarioSpec scenario_preset(const std::string& name) {
    ScenarioSpec spec;
    spec.name = name;
    spec.window = Window::unit_square();
    if (name == "assoc-poisson") {
        spec.ground = ScenarioSpec::Ground::poisson;
        spec.intensity = [](double x, double y) {
            return 50.0 * std::exp(std::sin(4.0 * x * x + 4.0 * y * y));
        };
        spec.mark_rule = MarkRule::sin_association;
    } else if (name == "assoc-lgcp") {
        spec.ground = ScenarioSpec::Ground::lgcp;
        spec.field_mean = [](double x, double y) {
            return std::log(90.0) + std::sin(4.0 * x * x + 4.0 * y * y) - 1.0;
        };
        spec.covariance = CovarianceSpec::exponential(1.5, 0.12);
        spec.intensity = [](double x, double y) {
            return 90.0 * std::exp(std::sin(4.0 * x * x + 4.0 * y * y) - 0.25);
        };
        spec.mark_rule = MarkRule::sin_association;
    } else if (name == "vario-poisson") {
        spec.ground = ScenarioSpec::Ground::poisson;
        spec.intensity = [](double x, double y) {
            const double s = x + y + 0.5;
            return 40.0 * s * s * s * s;
        };
        spec.mark_rule = MarkRule::noisy_amplitude;
    } else if (name == "vario-lgcp") {
        spec.ground = ScenarioSpec::Ground::lgcp;
        spec.field_mean = [](double x, double y) { return std::log(200.0 * (x + y + 0.1)); };
        spec.covariance = CovarianceSpec::gaussian_squared(1.0, 100.0);
        spec.intensity = [](double x, double y) {
            return 200.0 * (x + y + 0.1) * std::exp(0.5);
        };
        spec.mark_rule = MarkRule::noisy_amplitude;
    } else {
        fail(ErrorCode::invalid_argument, "unknown preset `" + name + "`");
    }
    return spec;
}

std::vector<std::string> scenario_preset_names() {
    return {"assoc-poisson", "assoc-lgcp", "vario-poisson", "vario-lgcp"};
}

ScenarioSimulator::ScenarioSimulator(ScenarioSpec spec) : spec_(std::move(spec)) {
    if (spec_.ground == ScenarioSpec::Ground::lgcp) {
        field_ = std::make_shared<GaussianFieldSampler>(
            QuadratureGrid(spec_.window, spec_.field_nx, spec_.field_ny), spec_.field_mean,
            spec_.covariance);
    }
}

MarkedPointPattern ScenarioSimulator::replicate_ground(std::uint64_t seed,
                                                       std::uint64_t index) const {
    const std::uint64_t sub = derive_key(seed, RngStream::replicate, index);
    if (spec_.ground == ScenarioSpec::Ground::poisson) {
        return simulate_inhomogeneous_poisson(spec_.intensity, spec_.window, sub);
    }
    return simulate_lgcp(*field_, sub);
}

MarkedPointPattern ScenarioSimulator::replicate(std::uint64_t seed, std::uint64_t index) const {
    const std::uint64_t sub = derive_key(seed, RngStream::replicate, index);
    MarkedPointPattern ground = spec_.ground == ScenarioSpec::Ground::poisson
                                    ? simulate_inhomogeneous_poisson(spec_.intensity, spec_.window, sub)
                                    : simulate_lgcp(*field_, sub);
    return assign_marks(ground, spec_.mark_rule, sub);
}

} // namespace markcorr
