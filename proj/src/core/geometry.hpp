#pragma once

#include <cmath>
#include <cstddef>

namespace markcorr {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point a, Point b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Axis-aligned rectangular observation window.
class Window {
public:
    Window(double xmin, double xmax, double ymin, double ymax);

    double xmin() const { return xmin_; }
    double xmax() const { return xmax_; }
    double ymin() const { return ymin_; }
    double ymax() const { return ymax_; }
    double width() const { return xmax_ - xmin_; }
    double height() const { return ymax_ - ymin_; }
    double shorter_side() const { return std::min(width(), height()); }
    double area() const { return width() * height(); }

    bool contains(Point p) const {
        return p.x >= xmin_ && p.x <= xmax_ && p.y >= ymin_ && p.y <= ymax_;
    }

    static Window unit_square() { return Window(0.0, 1.0, 0.0, 1.0); }

private:
    double xmin_, xmax_, ymin_, ymax_;
};

// Uniform nx-by-ny cell partition of a window; cell (ix, iy) is indexed
// row-major with ix fastest. Cells tile the window, so summing cell_area()
// over all cells reproduces window.area().
class QuadratureGrid {
public:
    QuadratureGrid(Window window, int nx, int ny);

    const Window& window() const { return window_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
    double dx() const { return window_.width() / nx_; }
    double dy() const { return window_.height() / ny_; }
    double cell_area() const { return window_.area() / size(); }

    Point center(std::size_t index) const {
        const int iy = static_cast<int>(index) / nx_;
        const int ix = static_cast<int>(index) % nx_;
        return {window_.xmin() + (ix + 0.5) * dx(), window_.ymin() + (iy + 0.5) * dy()};
    }

    // Index of the cell containing p, clamped to the grid.
    std::size_t cell_index(Point p) const;

private:
    Window window_;
    int nx_, ny_;
};

// |W| / |W intersect (W shifted by p-q)|; symmetric in (p, q). Fails when the
// shifted copy no longer overlaps the window.
double translation_correction(const Window& w, Point p, Point q);

// Fraction of the circle of radius r centred at p that lies inside w, by
// inclusion-exclusion over edge and corner arcs. In (0, 1].
double ripley_inside_fraction(const Window& w, Point p, double r);

// Reciprocal of the inside fraction, with the fraction floored at 1e-6 so the
// weight stays bounded when r exceeds the window reach.
double ripley_correction(const Window& w, Point p, double r);

} // namespace markcorr
