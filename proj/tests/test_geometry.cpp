#include <doctest.h>

#include <cmath>
#include <random>

#include "core/error.hpp"
#include "core/geometry.hpp"
#include "oracle.hpp"

using namespace markcorr;

TEST_CASE("euclidean distance") {
    CHECK(distance({0, 0}, {3, 4}) == doctest::Approx(5.0));
    CHECK(distance({1.25, -2.5}, {1.25, -2.5}) == 0.0);
    CHECK(distance({0.25, 0.25}, {0.75, 0.25}) == doctest::Approx(0.5));
}

TEST_CASE("window validation and area") {
    const Window w(0, 2, -1, 1);
    CHECK(w.area() == doctest::Approx(4.0));
    CHECK(w.contains({2.0, 1.0}));
    CHECK_FALSE(w.contains({2.0001, 0.0}));
    CHECK_THROWS_AS(Window(1, 1, 0, 1), Error);
    CHECK_THROWS_AS(Window(0, 1, 3, 2), Error);
}

TEST_CASE("quadrature grid partitions the window") {
    const Window w(0.5, 2.5, -1.0, 0.5);
    const QuadratureGrid grid(w, 7, 5);
    double total = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) total += grid.cell_area();
    CHECK(total == doctest::Approx(w.area()).epsilon(1e-12));
    // centre of every cell maps back to its own index
    for (std::size_t c = 0; c < grid.size(); ++c) {
        CHECK(grid.cell_index(grid.center(c)) == c);
    }
}

TEST_CASE("translation correction closed form") {
    const Window unit(0, 1, 0, 1);
    CHECK(translation_correction(unit, {0.3, 0.7}, {0.3, 0.7}) == doctest::Approx(1.0));
    CHECK(translation_correction(unit, {0.7, 0.2}, {0.2, 0.2}) == doctest::Approx(2.0));
    CHECK(translation_correction(unit, {0.75, 0.75}, {0.25, 0.25}) == doctest::Approx(4.0));
    CHECK_THROWS_AS(translation_correction(Window(0, 1, 0, 2), {0.0, 0.0}, {1.0, 0.0}), Error);
}

TEST_CASE("translation correction against monte carlo overlap area") {
    // |W intersect W_shift| estimated by sampling; correction = |W| / overlap
    const Window w(0, 1.5, 0, 1.0);
    const Point p{1.2, 0.8}, q{0.4, 0.25};
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> ux(0.0, 1.5), uy(0.0, 1.0);
    const double sx = p.x - q.x, sy = p.y - q.y;
    std::size_t hits = 0;
    constexpr std::size_t n = 2'000'000;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = ux(gen), y = uy(gen);
        if (x - sx >= 0.0 && x - sx <= 1.5 && y - sy >= 0.0 && y - sy <= 1.0) ++hits;
    }
    const double overlap = w.area() * static_cast<double>(hits) / n;
    CHECK(translation_correction(w, p, q) == doctest::Approx(w.area() / overlap).epsilon(0.01));
}

TEST_CASE("translation correction symmetry") {
    const Window w(0, 2, 0, 3);
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ux(0.0, 2.0), uy(0.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const Point p{ux(gen), uy(gen)}, q{ux(gen), uy(gen)};
        const double a = translation_correction(w, p, q);
        const double b = translation_correction(w, q, p);
        CHECK(a == b);
        CHECK(a >= 1.0);
    }
}

TEST_CASE("ripley correction reference points") {
    const Window unit(0, 1, 0, 1);
    CHECK(ripley_correction(unit, {0.5, 0.5}, 0.1) == doctest::Approx(1.0));
    CHECK(ripley_correction(unit, {0.0, 0.5}, 0.2) == doctest::Approx(2.0));
    CHECK(ripley_correction(unit, {0.0, 0.0}, 0.2) == doctest::Approx(4.0));
}

TEST_CASE("ripley correction equals 1 for interior disks") {
    const Window w(0, 2, 0, 1);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Point p{0.3 + 1.4 * unit(gen), 0.3 + 0.4 * unit(gen)};
        const double reach = std::min({p.x, 2.0 - p.x, p.y, 1.0 - p.y});
        const double r = 0.95 * reach * unit(gen) + 1e-6;
        CHECK(ripley_correction(w, p, r) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("ripley fraction matches interval-union oracle") {
    const Window w(0, 1.3, 0, 0.9);
    const oracle::Rect rect{0, 1.3, 0, 0.9};
    std::mt19937_64 gen(19);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const Point p{1.3 * unit(gen), 0.9 * unit(gen)};
        const double r = 0.02 + 0.6 * unit(gen);
        const double expected = oracle::circle_inside_fraction(rect, {p.x, p.y}, r);
        CHECK(ripley_inside_fraction(w, p, r) == doctest::Approx(expected).epsilon(1e-10));
        CHECK(ripley_correction(w, p, r) >= 1.0);
    }
}
