#include <doctest.h>

#include <cmath>
#include <random>

#include "core/error.hpp"
#include "core/markcorr.hpp"
#include "core/simulate.hpp"
#include "oracle.hpp"

using namespace markcorr;

namespace {

MarkedPointPattern to_pattern(const oracle::Fixture& fx) {
    std::vector<Point> pts(fx.points.size());
    for (std::size_t i = 0; i < fx.points.size(); ++i) pts[i] = {fx.points[i].x, fx.points[i].y};
    return MarkedPointPattern(Window(fx.window.xmin, fx.window.xmax, fx.window.ymin,
                                     fx.window.ymax),
                              pts, fx.marks);
}

IntensityField to_field(const oracle::Fixture& fx, const MarkedPointPattern& pattern) {
    IntensityField field(QuadratureGrid(pattern.window(), 1, 1));
    field.kind = IntensityKind::external;
    field.at_points = fx.lambda;
    field.grid_values = {1.0};
    return field;
}

void check_close(double got, double want, double rel = 1e-12) {
    if (std::isnan(want)) {
        CHECK(std::isnan(got));
        return;
    }
    CHECK(got == doctest::Approx(want).epsilon(rel));
}

} // namespace

TEST_CASE("estimators match the brute-force double loop") {
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<std::size_t> size_dist(3, 20);
    for (int trial = 0; trial < 25; ++trial) {
        const bool constant = trial % 3 == 0;
        const auto fx = oracle::random_fixture(gen, size_dist(gen), constant);
        const auto pattern = to_pattern(fx);
        const auto field = to_field(fx, pattern);

        const double h = 0.1 + 0.1 * (trial % 4);
        const double r_hi = 0.6 * std::min(fx.window.width(), fx.window.height());
        const RGrid rgrid = RGrid::regular(r_hi, 13, h);

        for (const auto edge : {EdgeCorrection::translation, EdgeCorrection::ripley}) {
            const auto oedge = edge == EdgeCorrection::translation ? oracle::Edge::translation
                                                                   : oracle::Edge::ripley;
            for (const auto& tf : {TestFunction::mm(), TestFunction::vario()}) {
                const auto otf = tf.id == "mm" ? oracle::Tf::mm : oracle::Tf::vario;
                const double norm = tf.id == "mm"
                                        ? oracle::mark_mean(fx.marks) * oracle::mark_mean(fx.marks)
                                        : oracle::mark_variance(fx.marks);
                const auto expected =
                    oracle::brute_force_curves(fx, otf, oedge, rgrid.r, h, norm);

                const auto num = pairsum_numerator(pattern, tf, field, rgrid, edge);
                const auto den = pairsum_denominator(pattern, field, rgrid, edge);
                const auto c = c_inhom(pattern, tf, field, rgrid, edge);
                const auto kappa = kappa_inhom(pattern, tf, field, rgrid, edge);
                const auto kratio = k_ratio_inhom(pattern, tf, field, rgrid, edge);

                for (std::size_t k = 0; k < rgrid.r.size(); ++k) {
                    check_close(num.values[k], expected.numerator[k]);
                    check_close(den.values[k], expected.denominator[k]);
                    check_close(c.values[k], expected.c[k]);
                    check_close(kappa.values[k], expected.kappa[k]);
                    check_close(kratio.values[k], expected.k_ratio[k]);
                }
            }
        }
    }
}

TEST_CASE("homogeneous estimators are the constant-field reduction, bitwise") {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 5; ++trial) {
        const auto fx = oracle::random_fixture(gen, 12, true);
        const auto pattern = to_pattern(fx);
        const auto field = to_field(fx, pattern); // constant lambda values
        const RGrid rgrid = RGrid::regular(0.4, 10, 0.12);
        for (const auto& tf : {TestFunction::mm(), TestFunction::vario()}) {
            const auto hom = kappa_homogeneous(pattern, tf, rgrid, EdgeCorrection::translation);
            const auto inhom = kappa_inhom(pattern, tf, field, rgrid, EdgeCorrection::translation);
            for (std::size_t k = 0; k < rgrid.r.size(); ++k) {
                if (hom.missing[k]) {
                    CHECK(inhom.missing[k] == 1);
                } else {
                    CHECK(hom.values[k] == inhom.values[k]); // exact
                }
            }
        }
    }
}

TEST_CASE("two points at a grid distance: single-pair closed form") {
    const Window unit(0, 1, 0, 1);
    const MarkedPointPattern pattern(unit, {{0.35, 0.5}, {0.65, 0.5}}, {2.0, 5.0});
    IntensityField field(QuadratureGrid(unit, 1, 1));
    field.kind = IntensityKind::external;
    field.at_points = {4.0, 9.0};
    field.grid_values = {1.0};

    RGrid rgrid;
    rgrid.r = {0.1, 0.3, 0.5};
    rgrid.pair_bandwidth = 0.05;

    const auto den = pairsum_denominator(pattern, field, rgrid, EdgeCorrection::translation);
    // both orderings of the one pair: kernel peak 0.75/h, translation weight
    // |W|/((1-0.3)*1), intensities 4*9
    const double e = 1.0 / 0.7;
    const double expected = 2.0 * (0.75 / 0.05) * e / 36.0 / (2.0 * 3.14159265358979323846 * 0.3);
    CHECK(den.values[1] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(den.values[0] == 0.0); // no pair near r = 0.1
    CHECK(den.values[2] == 0.0);
}

TEST_CASE("constant intensity factors out of the raw sums") {
    std::mt19937_64 gen(5);
    const auto fx = oracle::random_fixture(gen, 15, true);
    const auto pattern = to_pattern(fx);
    const auto field = to_field(fx, pattern);
    const double lambda = fx.lambda[0];
    const RGrid rgrid = RGrid::regular(0.5, 8, 0.15);

    // numerator with weights == numerator with lambda=1 divided by lambda^2
    auto unit_fx = fx;
    for (auto& v : unit_fx.lambda) v = 1.0;
    const auto unit_field = to_field(unit_fx, pattern);

    const auto weighted =
        pairsum_numerator(pattern, TestFunction::mm(), field, rgrid, EdgeCorrection::translation);
    const auto unweighted = pairsum_numerator(pattern, TestFunction::mm(), unit_field, rgrid,
                                              EdgeCorrection::translation);
    for (std::size_t k = 1; k < rgrid.r.size(); ++k) {
        CHECK(weighted.values[k] ==
              doctest::Approx(unweighted.values[k] / (lambda * lambda)).epsilon(1e-12));
    }
}

TEST_CASE("degenerate mark configurations") {
    const Window unit(0, 1, 0, 1);
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point> pts(12);
    for (auto& p : pts) p = {u(gen), u(gen)};
    const RGrid rgrid = RGrid::regular(0.5, 10, 0.1);

    SUBCASE("constant marks: vario numerator is identically zero") {
        const MarkedPointPattern pattern(unit, pts, std::vector<double>(12, 3.0));
        const auto num = pairsum_numerator(pattern, TestFunction::vario(),
                                           constant_intensity(pattern, QuadratureGrid(unit, 1, 1)),
                                           rgrid, EdgeCorrection::translation);
        for (std::size_t k = 1; k < rgrid.r.size(); ++k) CHECK(num.values[k] == 0.0);
    }

    SUBCASE("constant marks: kappa_mm is one, vario normalizer fails") {
        const MarkedPointPattern pattern(unit, pts, std::vector<double>(12, 3.0));
        const auto kappa = kappa_homogeneous(pattern, TestFunction::mm(), rgrid,
                                             EdgeCorrection::translation);
        for (std::size_t k = 0; k < rgrid.r.size(); ++k) {
            if (!kappa.missing[k]) CHECK(kappa.values[k] == doctest::Approx(1.0).epsilon(1e-12));
        }
        CHECK_THROWS_AS(
            kappa_homogeneous(pattern, TestFunction::vario(), rgrid, EdgeCorrection::translation),
            Error);
    }

    SUBCASE("zero-mean marks break the mm normalizer") {
        std::vector<double> marks(12);
        for (int i = 0; i < 12; ++i) marks[i] = i % 2 == 0 ? 1.0 : -1.0;
        const MarkedPointPattern pattern(unit, pts, marks);
        CHECK_THROWS_AS(
            kappa_homogeneous(pattern, TestFunction::mm(), rgrid, EdgeCorrection::translation),
            Error);
    }
}

TEST_CASE("unnormalised ratio with tf == 1 is one wherever defined") {
    std::mt19937_64 gen(9);
    const auto fx = oracle::random_fixture(gen, 14, false);
    const auto pattern = to_pattern(fx);
    const auto field = to_field(fx, pattern);
    const RGrid rgrid = RGrid::regular(0.5, 10, 0.1);
    const auto ones = TestFunction::with_constant("ones", [](double, double) { return 1.0; }, 1.0);
    const auto c = c_inhom(pattern, ones, field, rgrid, EdgeCorrection::translation);
    const auto k = k_ratio_inhom(pattern, ones, field, rgrid, EdgeCorrection::ripley);
    for (std::size_t i = 0; i < rgrid.r.size(); ++i) {
        if (!c.missing[i]) CHECK(c.values[i] == doctest::Approx(1.0).epsilon(1e-12));
        if (!k.missing[i]) CHECK(k.values[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("cumulative ratio saturates once every pair is included") {
    std::mt19937_64 gen(13);
    const auto fx = oracle::random_fixture(gen, 10, false);
    const auto pattern = to_pattern(fx);
    const auto field = to_field(fx, pattern);
    const double diameter = std::hypot(fx.window.width(), fx.window.height());
    RGrid rgrid = RGrid::regular(diameter * 1.5, 6, 0.1);

    const auto k =
        k_ratio_inhom(pattern, TestFunction::mm(), field, rgrid, EdgeCorrection::translation);
    // beyond the window diameter the ratio is the all-pairs constant
    CHECK_FALSE(k.missing.back());
    CHECK(k.values[rgrid.r.size() - 1] == doctest::Approx(k.values[rgrid.r.size() - 2]));

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < fx.points.size(); ++i) {
        for (std::size_t j = 0; j < fx.points.size(); ++j) {
            if (i == j) continue;
            const double w =
                oracle::translation_weight(fx.window, fx.points[i], fx.points[j]) /
                (fx.lambda[i] * fx.lambda[j]);
            num += fx.marks[i] * fx.marks[j] * w;
            den += w;
        }
    }
    CHECK(k.values.back() == doctest::Approx(num / den).epsilon(1e-12));
}

TEST_CASE("mark-scale invariance of kappa") {
    std::mt19937_64 gen(17);
    const auto fx = oracle::random_fixture(gen, 16, false);
    const auto pattern = to_pattern(fx);
    const auto field = to_field(fx, pattern);
    const RGrid rgrid = RGrid::regular(0.5, 12, 0.12);

    for (double scale : {3.0, -2.0, 0.125}) {
        std::vector<double> scaled(fx.marks.size());
        for (std::size_t i = 0; i < fx.marks.size(); ++i) scaled[i] = scale * fx.marks[i];
        const MarkedPointPattern scaled_pattern(pattern.window(), pattern.points(), scaled);
        for (const auto& tf : {TestFunction::mm(), TestFunction::vario()}) {
            const auto base = kappa_inhom(pattern, tf, field, rgrid, EdgeCorrection::translation);
            const auto same =
                kappa_inhom(scaled_pattern, tf, field, rgrid, EdgeCorrection::translation);
            for (std::size_t k = 0; k < rgrid.r.size(); ++k) {
                if (base.missing[k]) continue;
                CHECK(same.values[k] == doctest::Approx(base.values[k]).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("mark-shift invariance of the normalised variogram") {
    std::mt19937_64 gen(23);
    const auto fx = oracle::random_fixture(gen, 16, false);
    const auto pattern = to_pattern(fx);
    const auto field = to_field(fx, pattern);
    const RGrid rgrid = RGrid::regular(0.5, 12, 0.12);
    const auto base =
        kappa_inhom(pattern, TestFunction::vario(), field, rgrid, EdgeCorrection::translation);
    for (double shift : {5.0, -11.5}) {
        std::vector<double> shifted(fx.marks.size());
        for (std::size_t i = 0; i < fx.marks.size(); ++i) shifted[i] = fx.marks[i] + shift;
        const MarkedPointPattern shifted_pattern(pattern.window(), pattern.points(), shifted);
        const auto same = kappa_inhom(shifted_pattern, TestFunction::vario(), field, rgrid,
                                      EdgeCorrection::translation);
        for (std::size_t k = 0; k < rgrid.r.size(); ++k) {
            if (base.missing[k]) continue;
            CHECK(same.values[k] == doctest::Approx(base.values[k]).epsilon(1e-10));
        }
    }
}

TEST_CASE("reindexing the pattern leaves curves unchanged") {
    std::mt19937_64 gen(29);
    const auto fx = oracle::random_fixture(gen, 18, false);
    const auto pattern = to_pattern(fx);
    const auto field = to_field(fx, pattern);
    const RGrid rgrid = RGrid::regular(0.5, 12, 0.12);

    std::vector<std::size_t> order(fx.points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = (i * 5 + 2) % order.size();
    std::vector<Point> pts(order.size());
    std::vector<double> marks(order.size()), lambda(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        pts[i] = pattern.point(order[i]);
        marks[i] = pattern.mark(order[i]);
        lambda[i] = fx.lambda[order[i]];
    }
    const MarkedPointPattern reindexed(pattern.window(), pts, marks);
    IntensityField refield(QuadratureGrid(pattern.window(), 1, 1));
    refield.kind = IntensityKind::external;
    refield.at_points = lambda;
    refield.grid_values = {1.0};

    const auto a = kappa_inhom(pattern, TestFunction::mm(), field, rgrid, EdgeCorrection::ripley);
    const auto b =
        kappa_inhom(reindexed, TestFunction::mm(), refield, rgrid, EdgeCorrection::ripley);
    for (std::size_t k = 0; k < rgrid.r.size(); ++k) {
        if (a.missing[k]) continue;
        CHECK(b.values[k] == doctest::Approx(a.values[k]).epsilon(1e-10));
    }
}

TEST_CASE("nonnegativity of the unnormalised curves") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 10; ++trial) {
        const auto fx = oracle::random_fixture(gen, 12, false); // marks positive by construction
        const auto pattern = to_pattern(fx);
        const auto field = to_field(fx, pattern);
        const RGrid rgrid = RGrid::regular(0.5, 10, 0.1);
        for (const auto& tf : {TestFunction::mm(), TestFunction::vario()}) {
            const auto num =
                pairsum_numerator(pattern, tf, field, rgrid, EdgeCorrection::translation);
            for (std::size_t k = 0; k < rgrid.r.size(); ++k) {
                if (!num.missing[k]) CHECK(num.values[k] >= 0.0);
            }
        }
    }
}

TEST_CASE("curves are invariant under a change of length unit") {
    // scaling coordinates, window, r grid and bandwidth by c (and intensity
    // by 1/c^2) must reproduce the same dimensionless curves
    std::mt19937_64 gen(71);
    const auto fx = oracle::random_fixture(gen, 17, false);
    const auto pattern = to_pattern(fx);
    const auto field = to_field(fx, pattern);
    const RGrid rgrid = RGrid::regular(0.4, 16, 0.09);

    const double unit_scale = 200.0; // metres instead of unit-square fractions
    std::vector<Point> scaled_pts(fx.points.size());
    for (std::size_t i = 0; i < fx.points.size(); ++i) {
        scaled_pts[i] = {unit_scale * fx.points[i].x, unit_scale * fx.points[i].y};
    }
    const Window scaled_window(unit_scale * fx.window.xmin, unit_scale * fx.window.xmax,
                               unit_scale * fx.window.ymin, unit_scale * fx.window.ymax);
    const MarkedPointPattern scaled(scaled_window, scaled_pts, fx.marks);
    IntensityField scaled_field(QuadratureGrid(scaled_window, 1, 1));
    scaled_field.kind = IntensityKind::external;
    scaled_field.at_points.resize(fx.lambda.size());
    for (std::size_t i = 0; i < fx.lambda.size(); ++i) {
        scaled_field.at_points[i] = fx.lambda[i] / (unit_scale * unit_scale);
    }
    scaled_field.grid_values = {1.0};
    const RGrid scaled_rgrid = RGrid::regular(unit_scale * 0.4, 16, unit_scale * 0.09);

    for (const auto edge : {EdgeCorrection::translation, EdgeCorrection::ripley}) {
        const auto a = kappa_inhom(pattern, TestFunction::mm(), field, rgrid, edge);
        const auto b = kappa_inhom(scaled, TestFunction::mm(), scaled_field, scaled_rgrid, edge);
        const auto ka = k_ratio_inhom(pattern, TestFunction::vario(), field, rgrid, edge);
        const auto kb =
            k_ratio_inhom(scaled, TestFunction::vario(), scaled_field, scaled_rgrid, edge);
        for (std::size_t k = 0; k < rgrid.r.size(); ++k) {
            CHECK(a.missing[k] == b.missing[k]);
            if (!a.missing[k]) CHECK(b.values[k] == doctest::Approx(a.values[k]).epsilon(1e-10));
            CHECK(ka.missing[k] == kb.missing[k]);
            if (!ka.missing[k]) {
                CHECK(kb.values[k] == doctest::Approx(ka.values[k]).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("ripley-weighted pcf is flat for a poisson process") {
    const Window unit(0, 1, 0, 1);
    const auto flat = [](double, double) { return 120.0; };
    double sum = 0.0;
    int counted = 0;
    for (int rep = 0; rep < 40; ++rep) {
        const auto pattern = simulate_inhomogeneous_poisson(flat, unit, 7100 + rep);
        if (pattern.size() < 10) continue;
        const auto truth = intensity_from_function(pattern, QuadratureGrid(unit, 2, 2), flat);
        const RGrid rgrid =
            RGrid::regular(0.25, 50, stoyan_pair_bandwidth(pattern.size(), unit.area()));
        const auto pcf = pcf_inhom(pattern, truth, rgrid, EdgeCorrection::ripley);
        double local = 0.0;
        int used = 0;
        for (std::size_t k = 0; k < rgrid.r.size(); ++k) {
            if (pcf.missing[k] || rgrid.r[k] < 0.05) continue;
            local += pcf.values[k];
            ++used;
        }
        sum += local / used;
        ++counted;
    }
    CHECK(sum / counted == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("relabelling keeps the normalised curve at one on average") {
    // fixed locations and mark multiset; the average over many random
    // relabellings estimates the normalised curve's null expectation
    std::mt19937_64 gen(97);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Window unit(0, 1, 0, 1);
    std::vector<Point> pts(80);
    std::vector<double> marks(80);
    for (int i = 0; i < 80; ++i) {
        pts[i] = {u(gen), u(gen)};
        marks[i] = u(gen);
    }
    const MarkedPointPattern pattern(unit, pts, marks);
    // a nonconstant positive weight surface
    IntensityField field(QuadratureGrid(unit, 1, 1));
    field.kind = IntensityKind::external;
    field.at_points.resize(80);
    for (int i = 0; i < 80; ++i) field.at_points[i] = 40.0 + 60.0 * pts[i].x;
    field.grid_values = {1.0};

    const RGrid rgrid = RGrid::regular(0.25, 50, 0.02);
    std::vector<double> mean(rgrid.r.size(), 0.0);
    constexpr int permutations = 500;
    for (int p = 0; p < permutations; ++p) {
        const auto relabelled = permute_marks(pattern, 4000 + p);
        const auto kappa = kappa_inhom(relabelled, TestFunction::mm(), field, rgrid,
                                       EdgeCorrection::translation);
        for (std::size_t k = 0; k < mean.size(); ++k) {
            mean[k] += kappa.missing[k] ? 0.0 : kappa.values[k] / permutations;
        }
    }
    double band = 0.0;
    int used = 0;
    for (std::size_t k = 0; k < rgrid.r.size(); ++k) {
        if (rgrid.r[k] < 0.05) continue;
        band += mean[k];
        ++used;
    }
    CHECK(band / used == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("clustered points push the reweighted pcf above one at small r") {
    const QuadratureGrid field_grid(Window::unit_square(), 16, 16);
    const auto mean_fn = [](double, double) { return std::log(100.0) - 0.5; };
    const GaussianFieldSampler sampler(field_grid, mean_fn,
                                       CovarianceSpec::exponential(1.0, 0.1));
    double small_r_mean = 0.0;
    int counted = 0;
    for (int rep = 0; rep < 15; ++rep) {
        const auto pattern = simulate_lgcp(sampler, 600 + rep);
        if (pattern.size() < 20) continue;
        const auto truth = intensity_from_function(
            pattern, QuadratureGrid(pattern.window(), 2, 2),
            [](double, double) { return 100.0; }); // the process mean intensity
        const RGrid rgrid = RGrid::regular(
            0.25, 50, stoyan_pair_bandwidth(pattern.size(), pattern.window().area()));
        const auto pcf = pcf_inhom(pattern, truth, rgrid, EdgeCorrection::translation);
        double local = 0.0;
        int used = 0;
        for (std::size_t k = 0; k < rgrid.r.size(); ++k) {
            if (pcf.missing[k] || rgrid.r[k] < 0.02 || rgrid.r[k] > 0.08) continue;
            local += pcf.values[k];
            ++used;
        }
        if (used == 0) continue;
        small_r_mean += local / used;
        ++counted;
    }
    REQUIRE(counted > 5);
    CHECK(small_r_mean / counted > 1.5); // strong clustering signal
}

TEST_CASE("error paths") {
    const Window unit(0, 1, 0, 1);
    const MarkedPointPattern one(unit, {{0.5, 0.5}}, {1.0});
    const RGrid rgrid = RGrid::regular(0.5, 10, 0.1);
    CHECK_THROWS_AS(kappa_homogeneous(one, TestFunction::mm(), rgrid, EdgeCorrection::translation),
                    Error);

    // far-apart points with a tiny kernel: every denominator is below floor
    const MarkedPointPattern sparse(unit, {{0.05, 0.05}, {0.95, 0.95}}, {1.0, 2.0});
    RGrid across;
    across.r = {0.1, 0.2};
    across.pair_bandwidth = 0.01;
    CHECK_THROWS_AS(c_homogeneous(sparse, TestFunction::mm(), across, EdgeCorrection::translation),
                    Error);

    CHECK_THROWS_AS(RGrid::regular(-1.0, 10, 0.1), Error);
    RGrid bad;
    bad.r = {0.2, 0.1};
    bad.pair_bandwidth = 0.1;
    const MarkedPointPattern two(unit, {{0.2, 0.2}, {0.4, 0.4}}, {1.0, 2.0});
    CHECK_THROWS_AS(
        c_homogeneous(two, TestFunction::mm(), bad, EdgeCorrection::translation), Error);
}
