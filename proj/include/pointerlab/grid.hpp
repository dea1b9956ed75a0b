#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pointerlab {

/**
 * Uniform one-dimensional spatial grid.
 *
 * Invariants: x_min < x_max and the node count is odd and >= 3. The odd
 * count closes the composite Simpson weight pattern over the whole window,
 * and a symmetric window then carries x = 0 as an exact node.
 */
class Grid {
public:
    Grid(double x_min, double x_max, int n)
        : x_min_(x_min), x_max_(x_max), n_(n) {
        if (!(x_min < x_max))
            throw std::invalid_argument("Grid: x_min must be below x_max");
        if (n < 3)
            throw std::invalid_argument("Grid: need at least 3 nodes, got " +
                                        std::to_string(n));
        if (n % 2 == 0)
            throw std::invalid_argument("Grid: node count must be odd, got " +
                                        std::to_string(n));
        h_ = (x_max - x_min) / static_cast<double>(n - 1);
    }

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    double length() const { return x_max_ - x_min_; }
    int size() const { return n_; }
    double spacing() const { return h_; }
    double x(int i) const { return x_min_ + h_ * static_cast<double>(i); }

    bool operator==(const Grid&) const = default;

private:
    double x_min_;
    double x_max_;
    int n_;
    double h_;
};

/** Checked construction under the name call sites tend to read better with. */
inline Grid make_grid(double x_min, double x_max, int n) {
    return Grid(x_min, x_max, n);
}

/**
 * Composite Simpson rule over the full window: h/3 * (1, 4, 2, ..., 2, 4, 1).
 * Fourth order for smooth integrands; the Grid's odd node count guarantees
 * the pattern closes. Works for real and complex samples alike.
 */
template <class T>
T simpson(const Grid& g, std::span<const T> f) {
    if (static_cast<int>(f.size()) != g.size())
        throw std::invalid_argument("simpson: sample count does not match grid");
    T acc = f[0] + f[f.size() - 1];
    for (int i = 1; i + 1 < g.size(); ++i)
        acc += f[static_cast<std::size_t>(i)] * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * (g.spacing() / 3.0);
}

template <class T>
T simpson(const Grid& g, const std::vector<T>& f) {
    return simpson(g, std::span<const T>(f));
}

/** Composite trapezoid rule; second order, kept as an independent cross-check. */
template <class T>
T trapezoid(const Grid& g, std::span<const T> f) {
    if (static_cast<int>(f.size()) != g.size())
        throw std::invalid_argument("trapezoid: sample count does not match grid");
    T acc = (f[0] + f[f.size() - 1]) * 0.5;
    for (int i = 1; i + 1 < g.size(); ++i)
        acc += f[static_cast<std::size_t>(i)];
    return acc * g.spacing();
}

template <class T>
T trapezoid(const Grid& g, const std::vector<T>& f) {
    return trapezoid(g, std::span<const T>(f));
}

}  // namespace pointerlab
