#pragma once

#include "chemowave/envelopes.hpp"
#include "chemowave/grid.hpp"
#include "chemowave/params.hpp"

#include <span>
#include <string>
#include <vector>

namespace chemowave {

/// The chemical concentration and its derivative for a given species pair.
struct ChemicalField {
    Field v;
    Field v_x;
};

/// Left and right exponential moments of a source s sampled on a grid,
///
///   left[j]  = integral_{-inf}^{x_j} e^{-k (x_j - y)} s(y) dy
///   right[j] = integral_{x_j}^{inf}  e^{-k (y - x_j)} s(y) dy
///
/// with s piecewise linear between samples and constant beyond the ends.
/// Each cell contribution is integrated exactly; both sweeps are O(n).
struct ExponentialMoments {
    std::vector<double> left;
    std::vector<double> right;
};

ExponentialMoments exponential_moments(std::span<const double> source, double h, double k,
                                       double left_tail, double right_tail);

/// v(x) = 1/(2 sqrt(lambda)) integral e^{-sqrt(lambda)|x - y|} (mu1 u1 + mu2 u2)(y) dy.
ChemicalField solve_chemical(const Field& u1, const Field& u2, const Params& p);
Field solve_v(const Field& u1, const Field& u2, const Params& p);
/// v_x(x) = 1/2 integral sign(y - x) e^{-sqrt(lambda)|y - x|} (mu1 u1 + mu2 u2)(y) dy.
Field solve_v_x(const Field& u1, const Field& u2, const Params& p);

/// max over interior points of |D2 v - lambda v + mu1 u1 + mu2 u2|.
double residual_elliptic(const Field& v, const Field& u1, const Field& u2, const Params& p);

struct BoundCheck {
    std::string name;
    double worst_slack = 0.0;  // min over the grid of (bound - value) in the direction of the inequality
    double x_at_worst = 0.0;
    bool holds = true;
};

struct LemmaBoundsReport {
    BoundCheck upper;       // v <= ...
    BoundCheck lower;       // v >= ...
    BoundCheck derivative;  // |v_x| <= ...
    double tolerance = 0.0;
    bool all_hold() const { return upper.holds && lower.holds && derivative.holds; }
};

/// Checks the pointwise upper/lower bounds on v and the bound on |v_x| that
/// hold for every pair in the envelope set E(kappa).
/// Throws std::invalid_argument if (u1, u2) is not a member of E(kappa).
LemmaBoundsReport check_lemma_bounds(const Field& u1, const Field& u2, const Envelopes& env,
                                     const Params& p);

/// The right-hand sides of those bounds at x.
double v_upper_bound(const Envelopes& env, const Params& p, double x);
double v_lower_bound(const Envelopes& env, const Params& p, double x);
double v_x_bound(const Envelopes& env, const Params& p, double x);

}  // namespace chemowave
