#include "chemowave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chemowave {

Grid::Grid(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
    if (n < 3) throw std::invalid_argument("Grid needs at least 3 points");
    if (!(x_max > x_min)) throw std::invalid_argument("Grid needs x_max > x_min");
    h_ = (x_max - x_min) / static_cast<double>(n - 1);
}

Grid Grid::with_spacing(double x_min, double x_max, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("Grid spacing must be positive");
    const auto cells = static_cast<std::size_t>(std::llround((x_max - x_min) / h));
    return Grid(x_min, x_max, std::max<std::size_t>(cells, 2) + 1);
}

std::vector<double> Grid::points() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = x(i);
    return out;
}

Field::Field(Grid g, std::vector<double> v, double left, double right)
    : grid(g), values(std::move(v)), left_tail(left), right_tail(right) {
    if (values.size() != grid.size()) throw std::invalid_argument("Field size does not match grid");
}

Field::Field(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw std::invalid_argument("Field size does not match grid");
    left_tail = values.front();
    right_tail = values.back();
}

double Field::at(double x) const {
    if (x < grid.x_min()) return left_tail;
    if (x > grid.x_max()) return right_tail;
    const double s = grid.index_of(x);
    auto i = static_cast<std::size_t>(std::floor(s));
    if (i >= grid.size() - 1) return values.back();
    const double t = s - static_cast<double>(i);
    return (1.0 - t) * values[i] + t * values[i + 1];
}

double Field::sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

void require_same_grid(const Field& a, const Field& b, const char* context) {
    if (!(a.grid == b.grid)) {
        throw std::invalid_argument(std::string(context) + ": fields live on different grids");
    }
}

}  // namespace chemowave
