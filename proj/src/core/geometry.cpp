#include "geometry.hpp"

#include <algorithm>
#include <string>

#include "error.hpp"

namespace markcorr {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kHalfPi = 1.5707963267948966192313216916398;
constexpr double kRipleyFractionFloor = 1e-6;
} // namespace

Window::Window(double xmin, double xmax, double ymin, double ymax)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax) {
    if (!(xmax > xmin) || !(ymax > ymin)) {
        fail(ErrorCode::invalid_argument,
             "window requires xmax > xmin and ymax > ymin, got [" + std::to_string(xmin) + ", " +
                 std::to_string(xmax) + "] x [" + std::to_string(ymin) + ", " +
                 std::to_string(ymax) + "]");
    }
}

QuadratureGrid::QuadratureGrid(Window window, int nx, int ny)
    : window_(window), nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1) {
        fail(ErrorCode::invalid_argument, "quadrature grid needs positive cell counts");
    }
}

std::size_t QuadratureGrid::cell_index(Point p) const {
    int ix = static_cast<int>((p.x - window_.xmin()) / dx());
    int iy = static_cast<int>((p.y - window_.ymin()) / dy());
    ix = std::clamp(ix, 0, nx_ - 1);
    iy = std::clamp(iy, 0, ny_ - 1);
    return static_cast<std::size_t>(iy) * nx_ + ix;
}

double translation_correction(const Window& w, Point p, Point q) {
    const double sx = std::abs(p.x - q.x);
    const double sy = std::abs(p.y - q.y);
    if (sx >= w.width() || sy >= w.height()) {
        fail(ErrorCode::domain,
             "translation correction undefined: shifted window does not overlap");
    }
    return w.area() / ((w.width() - sx) * (w.height() - sy));
}

double ripley_inside_fraction(const Window& w, Point p, double r) {
    if (!(r > 0.0)) fail(ErrorCode::invalid_argument, "ripley correction needs r > 0");
    if (!w.contains(p)) fail(ErrorCode::invalid_argument, "ripley correction needs p inside the window");

    const double d[4] = {p.x - w.xmin(), w.xmax() - p.x, p.y - w.ymin(), w.ymax() - p.y};

    // Arc excluded by one edge at distance t: angle 2*acos(t/r) when t < r.
    const auto edge_half_angle = [&](double t) {
        return t >= r ? 0.0 : std::acos(t / r);
    };
    double exterior = 0.0;
    for (double t : d) exterior += 2.0 * edge_half_angle(t);

    // Adjacent-edge exclusions overlap when the corner lies inside the circle.
    const int corner_pairs[4][2] = {{0, 2}, {0, 3}, {1, 2}, {1, 3}};
    for (const auto& c : corner_pairs) {
        const double overlap = edge_half_angle(d[c[0]]) + edge_half_angle(d[c[1]]) - kHalfPi;
        if (overlap > 0.0) exterior -= overlap;
    }

    return 1.0 - exterior / kTwoPi;
}

double ripley_correction(const Window& w, Point p, double r) {
    const double fraction = std::max(ripley_inside_fraction(w, p, r), kRipleyFractionFloor);
    return 1.0 / fraction;
}

} // namespace markcorr
