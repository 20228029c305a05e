#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace chemowave {

/// Uniform 1-D mesh on [x_min, x_max] with n points.
class Grid {
public:
    Grid() = default;
    Grid(double x_min, double x_max, std::size_t n);

    /// Mesh on [x_min, x_max] with spacing as close to `h` as the point count allows.
    static Grid with_spacing(double x_min, double x_max, double h);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t size() const { return n_; }
    double h() const { return h_; }
    double x(std::size_t i) const { return x_min_ + h_ * static_cast<double>(i); }
    double length() const { return x_max_ - x_min_; }

    std::vector<double> points() const;

    /// Fractional index of coordinate x (may lie outside [0, n-1]).
    double index_of(double x) const { return (x - x_min_) / h_; }

    bool operator==(const Grid& o) const {
        return n_ == o.n_ && x_min_ == o.x_min_ && x_max_ == o.x_max_;
    }

private:
    double x_min_ = 0.0;
    double x_max_ = 1.0;
    std::size_t n_ = 0;
    double h_ = 1.0;
};

/// Samples of a real function on a grid plus the constant values it is
/// assumed to take beyond each end of the domain.
struct Field {
    Grid grid;
    std::vector<double> values;
    double left_tail = 0.0;
    double right_tail = 0.0;

    Field() = default;
    Field(Grid g, std::vector<double> v, double left, double right);
    /// Tails default to the end values.
    Field(Grid g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    /// Linear interpolation; tails are used outside the grid.
    double at(double x) const;
    double sup_norm() const;

    template <typename Fn>
    static Field sample(const Grid& g, Fn&& fn, double left_tail, double right_tail) {
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = fn(g.x(i));
        return Field(g, std::move(v), left_tail, right_tail);
    }
};

/// Throws std::invalid_argument unless the fields share a grid.
void require_same_grid(const Field& a, const Field& b, const char* context);

}  // namespace chemowave
