#pragma once

#include "chemowave/kernel.hpp"
#include "chemowave/params.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace testsupport {

inline chemowave::Params p0() {
    chemowave::Params p;
    p.a = 0.5;
    p.b = 1.2;
    p.d = 1.0;
    p.r = 1.0;
    p.lambda = 2.0;
    p.mu1 = p.mu2 = 0.1;
    p.chi1 = p.chi2 = 0.2;
    return p;
}

inline chemowave::Params chi0() {
    chemowave::Params p = p0();
    p.chi1 = p.chi2 = 0.0;
    return p;
}

inline chemowave::Params h3_suite() {
    chemowave::Params p;
    p.a = p.b = 0.4;
    p.d = p.r = 1.0;
    p.lambda = 1.0;
    p.mu1 = p.mu2 = 0.1;
    p.chi1 = p.chi2 = 0.1;
    return p;
}

/// Random parameters with H1 satisfied and a < 1 with moderate chemotaxis.
inline chemowave::Params random_params(std::mt19937_64& rng, bool with_chi = true) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    chemowave::Params p;
    p.a = 0.05 + 0.9 * u(rng);
    p.b = 0.1 + 2.0 * u(rng);
    p.d = 0.5 + 1.5 * u(rng);
    p.r = 0.2 + 2.0 * u(rng);
    p.lambda = 0.5 + 3.0 * u(rng);
    p.mu1 = 0.01 + 0.5 * u(rng);
    p.mu2 = 0.01 + 0.5 * u(rng);
    p.chi1 = with_chi ? 0.9 * u(rng) : 0.0;
    p.chi2 = with_chi ? 0.9 * u(rng) : 0.0;
    return p;
}

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
    if (n % 2) ++n;
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + h * i);
    return s * h / 3.0;
}

/// Dense O(n^2) evaluation of both exponential moments of the piecewise
/// linear interpolant, 10-point Gauss-Legendre per cell.
inline chemowave::ExponentialMoments dense_moments(const std::vector<double>& s, double x0, double h, double k, double lt,
                                 double rt) {
    static const double gx[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                 0.8650633666889845, 0.9739065285171717};
    static const double gw[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                 0.1494513491505806, 0.0666713443086881};
    const std::size_t n = s.size();
    chemowave::ExponentialMoments m;
    m.left.assign(n, 0.0);
    m.right.assign(n, 0.0);
    const double x_end = x0 + h * static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        const double xj = x0 + h * static_cast<double>(j);
        m.left[j] = lt * std::exp(-k * (xj - x0)) / k;
        m.right[j] = rt * std::exp(-k * (x_end - xj)) / k;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double a = x0 + h * static_cast<double>(i);
            double cell = 0.0;
            for (int q = 0; q < 10; ++q) {
                const double t = q < 5 ? -gx[q] : gx[q - 5];
                const double w = gw[q % 5];
                const double y = a + 0.5 * h * (1.0 + t);
                const double theta = (y - a) / h;
                const double val = (1.0 - theta) * s[i] + theta * s[i + 1];
                cell += w * 0.5 * h * val * std::exp(-k * std::abs(xj - y));
            }
            (i < j ? m.left[j] : m.right[j]) += cell;
        }
    }
    return m;
}

}  // namespace testsupport
