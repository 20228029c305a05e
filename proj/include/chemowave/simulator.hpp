#pragma once

#include "chemowave/grid.hpp"
#include "chemowave/kernel.hpp"
#include "chemowave/params.hpp"
#include "chemowave/wavesolver.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemowave {

/// Negative undershoot beyond the clamp threshold, or blow-up.
class SchemeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters of the single-species chemotaxis model
///   u_t = d u_xx - chi (u w_x)_x + u (a - b u),  0 = w_xx - lambda w + mu u.
struct SingleSpeciesParams {
    double a = 1.0;
    double b = 1.0;
    double d = 1.0;
    double chi = 0.0;
    double mu = 0.1;
    double lambda = 1.0;
};

/// Kinetics in moving-frame non-divergence form: for species i,
///   u_t = D_i u_xx + (c - chi_i v_x) u_x + u (alpha_i - lambda chi_i v - beta_i1 u1 - beta_i2 u2),
/// with 0 = v_xx - lambda v + mu1 u1 + mu2 u2.
struct Kinetics {
    double D[2] = {1.0, 1.0};
    double chi[2] = {0.0, 0.0};
    double alpha[2] = {1.0, 1.0};
    double beta[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
    double lambda = 1.0;
    double mu[2] = {0.0, 0.0};
    double blowup_bound = 1e300;

    static Kinetics two_species(const Params& p);
    /// Species 2 is switched off (u2 stays 0).
    static Kinetics single_species(const SingleSpeciesParams& s);
    Params as_params() const;  // for the chemical solve only
};

/// Dirichlet values are the end values of u1, u2 and stay fixed; the tails
/// of the fields are used beyond the domain for the chemical field.
struct SimState {
    Field u1;
    Field u2;
    double t = 0.0;
    double frame_speed = 0.0;
};

/// Largest dt the explicit reaction tolerates (0.2 / Lipschitz bound).
double max_stable_dt(const SimState& s, const Kinetics& k);

/// One IMEX step: diffusion and drift implicit (central differences, one
/// tridiagonal solve per species), reaction explicit.
/// Throws std::invalid_argument if dt or h violate the stability conditions,
/// SchemeError on negativity below -1e-14 or blow-up.
SimState step(const SimState& s, const Kinetics& k, double dt);

struct Observer {
    double every = 1.0;  // simulated time between calls
    std::function<void(const SimState&)> fn;
};

struct RunSummary {
    std::size_t steps = 0;
    double t_final = 0.0;
    double max_u1 = 0.0;
    double max_u2 = 0.0;
    double min_value = 0.0;
};

/// Steps to time T with fixed dt, calling observers at t = 0 and every `every`.
RunSummary run(SimState& s, const Kinetics& k, double T, double dt,
               const std::vector<Observer>& observers = {});

/// Leftmost downcrossing of u1 through theta by linear interpolation.
double front_position(const SimState& s, double theta = 0.5);
double front_position(const Field& u1, double theta = 0.5);

struct SpeedEstimate {
    double theta = 0.5;
    std::vector<double> times;
    std::vector<double> positions;
    double speed = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double std_error = 0.0;  // standard error of the slope
    std::size_t window = 0;
};

/// Least-squares slope over the trailing half of the samples (>= 20 samples).
SpeedEstimate estimate_speed(const std::vector<double>& times, const std::vector<double>& positions,
                             double theta = 0.5);

// ---------------------------------------------------------------- experiments

struct SimOptions {
    double h = 0.05;
    double dt = 0.02;
    double sample_every = 1.0;
};

/// Front-like data u1 = 1 (x < x0), 0 (x >= x0), u2 = 1 - u1 on [x_min, x_max].
SimState front_like_state(const Grid& g, double x0);

struct SpreadOptions : SimOptions {
    double x_min = -250.0;
    double x_max = 250.0;
    double front0 = -200.0;
    double T = 200.0;
};

struct SpreadReport {
    SpeedEstimate estimate;
    double c0_star = 0.0;
    double final_front = 0.0;
};

/// Lab-frame spreading speed. Throws std::runtime_error if the front enters
/// the outer 10% of the domain.
SpreadReport spreading_experiment(const Params& p, const SpreadOptions& opts = {});

enum class StabilityTarget { E1, ESTAR };

struct StabilityOptions : SimOptions {
    double half_width = 50.0;
    std::uint64_t seed = 42;
};

struct StabilityReport {
    Point2 target;
    std::vector<double> times;
    std::vector<double> distance;  // sup-distance to the target
    double final_distance = 0.0;
    bool eventually_decreasing = false;
    bool passed = false;
};

/// Target plus a smoothed random perturbation of the given amplitude, tapered
/// to zero at the pinned ends. Refuses unless H2 (E1) or H3 (ESTAR) holds.
StabilityReport stability_experiment(const Params& p, StabilityTarget target, double amplitude,
                                     double T, const StabilityOptions& opts = {});

struct BumpSubsolution {
    double q = 0.0;
    double eps = 0.0;
    double sigma = 0.0;
    double beta = 0.0;
    double l = 0.0;
    double x1 = 0.0;

    /// sigma e^{-(q/2) s} cos((beta/2) s) with s = x - x1 - l - q t on the support, 0 elsewhere.
    double value(double t, double x) const;
    double midpoint(double t) const { return value(t, x1 + 0.5 * l + q * t); }
    double midpoint_closed_form() const;
    double support_left(double t) const { return x1 + q * t; }
    double support_right(double t) const { return x1 + l + q * t; }
};

struct BumpOptions : SimOptions {
    double x_min = -100.0;
    double x_max = 250.0;
    /// gap between the right end of the initial support and the initial front at 0
    double gap = 5.0;
};

struct BumpReport {
    BumpSubsolution bump;
    double c = 0.0;
    std::vector<double> times;
    std::vector<double> min_slack;  // min over the support of u1 - bump
    std::vector<double> midpoints;
    double worst_slack = 0.0;
    double midpoint_spread = 0.0;  // max |midpoint(t) - closed form|
    bool comparison_holds = false;
};

/// Requires max{c, 0} + eps < q < 2 sqrt(1 - a - eps).
BumpReport bump_subsolution_check(const Params& p, double c, double q, double eps, double T,
                                  const BumpOptions& opts = {});

struct SingleSpeciesOptions : SimOptions {
    double half_width = 250.0;
    double eps = 0.2;
    /// Start from a uniformly positive perturbation of a/b instead of a bump.
    bool positive_start = false;
    std::uint64_t seed = 42;
};

struct SingleSpeciesReport {
    double cone_speed = 0.0;
    double cone_infimum = 0.0;
    /// NaN unless the run started with inf u0 > 0 and 2 chi mu < b.
    double distance_to_equilibrium = 0.0;
};

SingleSpeciesReport single_species_mode(const SingleSpeciesParams& s, double T,
                                        const SingleSpeciesOptions& opts = {});

struct DriftReport {
    std::vector<double> times;
    std::vector<double> drift;  // sup |u(t) - U|
    double max_drift = 0.0;
};

/// Injects a wave profile in its own frame and records how far it moves.
DriftReport wave_drift(const WaveProfile& w, const Params& p, double T, double dt = 0.02,
                       double sample_every = 1.0);

}  // namespace chemowave
