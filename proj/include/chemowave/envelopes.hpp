#pragma once

#include <vector>

namespace chemowave {

/// Explicit upper and lower envelopes bounding the wave profiles with right
/// decay rate kappa:
///
///   upper1(x) = min{M1, M1 D2 e^{-kappa x}}
///   lower1(x) = M1 D2 (1 - D1 e^{-eps1 x})_+ e^{-kappa x}
///   upper2(x) = min{M2, 1 + M2 D2t e^{-kappa x}}
///   lower2(x) = (1 - D2t e^{-kappa x})_+
///
/// Constructed by build_envelopes() (supersub.hpp).
struct Envelopes {
    double kappa = 0.0;
    double c_kappa = 0.0;
    double eps1 = 0.0;
    double D1 = 1.0;
    double D2 = 1.0;
    double D2_tilde = 1.0;
    double R = 1.0;
    double M1 = 1.0;
    double M2 = 1.0;
    double f = 0.0;
    /// Safety factor applied to the smallest admissible D1.
    double D1_safety = 1.05;

    double upper1(double x) const;
    double lower1(double x) const;
    double upper2(double x) const;
    double lower2(double x) const;

    double upper(int component, double x) const { return component == 1 ? upper1(x) : upper2(x); }
    double lower(int component, double x) const { return component == 1 ? lower1(x) : lower2(x); }
    double bound(int component) const { return component == 1 ? M1 : M2; }

    /// Points where an envelope switches branch (min or positive part).
    /// Returns an empty vector when the envelope has no kink.
    std::vector<double> upper_kinks(int component) const;
    std::vector<double> lower_kinks(int component) const;

    /// Maximizer and maximum of lower1.
    double lower1_argmax() const;
    double lower1_max() const;

    /// Smallest half-width y0 (>= 1) with upper_i(-y) = M_i for all y >= y0.
    double y0() const;
};

}  // namespace chemowave
