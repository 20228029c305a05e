#include "chemowave/simulator.hpp"

#include "chemowave/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace chemowave {

// ---------------------------------------------------------------- kinetics

Kinetics Kinetics::two_species(const Params& p) {
    p.validate();
    Kinetics k;
    k.D[0] = 1.0;
    k.D[1] = p.d;
    k.chi[0] = p.chi1;
    k.chi[1] = p.chi2;
    k.alpha[0] = 1.0;
    k.alpha[1] = p.r;
    k.beta[0][0] = 1.0 - p.chi1 * p.mu1;
    k.beta[0][1] = p.a - p.chi1 * p.mu2;
    k.beta[1][0] = p.b * p.r - p.chi2 * p.mu1;
    k.beta[1][1] = p.r - p.chi2 * p.mu2;
    k.lambda = p.lambda;
    k.mu[0] = p.mu1;
    k.mu[1] = p.mu2;
    double M1 = 1e3, M2 = 1e3;
    if (p.chi1 * p.mu1 < 1.0) M1 = amplitude_bound1(p);
    if (p.chi2 * p.mu2 < p.r) M2 = amplitude_bound2(p);
    k.blowup_bound = 10.0 * (M1 + M2);
    return k;
}

Kinetics Kinetics::single_species(const SingleSpeciesParams& s) {
    Kinetics k;
    k.D[0] = s.d;
    k.D[1] = 1.0;
    k.chi[0] = s.chi;
    k.chi[1] = 0.0;
    k.alpha[0] = s.a;
    k.alpha[1] = 0.0;
    k.beta[0][0] = s.b - s.chi * s.mu;
    k.beta[0][1] = 0.0;
    k.beta[1][0] = 0.0;
    k.beta[1][1] = 0.0;
    k.lambda = s.lambda;
    k.mu[0] = s.mu;
    k.mu[1] = 0.0;
    const double M = s.b > s.chi * s.mu ? s.a / (s.b - s.chi * s.mu) : 1e3;
    k.blowup_bound = 10.0 * std::max(M, s.a / s.b);
    return k;
}

Params Kinetics::as_params() const {
    Params p;
    p.lambda = lambda;
    p.mu1 = mu[0];
    p.mu2 = mu[1];
    return p;
}

// ---------------------------------------------------------------- stepping

namespace {

double growth(const Kinetics& k, int i, double v, double u1, double u2) {
    return k.alpha[i] - k.lambda * k.chi[i] * v - k.beta[i][0] * u1 - k.beta[i][1] * u2;
}

double lipschitz(const SimState& s, const Kinetics& k, const Field& v) {
    double L = 0.0;
    for (std::size_t j = 0; j < s.u1.size(); ++j) {
        const double u[2] = {s.u1[j], s.u2[j]};
        for (int i = 0; i < 2; ++i) {
            const double g = growth(k, i, v[j], u[0], u[1]);
            const double Li = std::abs(g) + std::abs(u[i]) * (std::abs(k.beta[i][0]) + std::abs(k.beta[i][1]));
            L = std::max(L, Li);
        }
    }
    return L;
}

}  // namespace

double max_stable_dt(const SimState& s, const Kinetics& k) {
    const Field v = solve_v(s.u1, s.u2, k.as_params());
    const double L = lipschitz(s, k, v);
    return L > 0.0 ? 0.2 / L : std::numeric_limits<double>::infinity();
}

SimState step(const SimState& s, const Kinetics& k, double dt) {
    require_same_grid(s.u1, s.u2, "step");
    const Grid& g = s.u1.grid;
    const std::size_t n = g.size();
    const double h = g.h();
    const ChemicalField chem = solve_chemical(s.u1, s.u2, k.as_params());

    const double L = lipschitz(s, k, chem.v);
    if (L > 0.0 && dt > 0.2 / L * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "step: dt = " << dt << " exceeds the reaction bound 0.2/L = " << 0.2 / L;
        throw std::invalid_argument(os.str());
    }

    SimState out = s;
    out.t = s.t + dt;
    const std::size_t m = n - 2;
    std::vector<double> lo(m), di(m), up(m), rhs(m);
    for (int i = 0; i < 2; ++i) {
        if (i == 1 && k.alpha[1] == 0.0 && s.u2.sup_norm() == 0.0) continue;
        const Field& u = i == 0 ? s.u1 : s.u2;
        const double D = k.D[i];
        for (std::size_t kk = 0; kk < m; ++kk) {
            const std::size_t j = kk + 1;
            const double b = s.frame_speed - k.chi[i] * chem.v_x[j];
            if (std::abs(b) * h >= 2.0 * D) {
                std::ostringstream os;
                os << "step: cell Peclet number " << std::abs(b) * h / (2.0 * D)
                   << " >= 1, refine the grid";
                throw std::invalid_argument(os.str());
            }
            lo[kk] = -dt * (D / (h * h) - b / (2.0 * h));
            up[kk] = -dt * (D / (h * h) + b / (2.0 * h));
            di[kk] = 1.0 + 2.0 * dt * D / (h * h);
            rhs[kk] = u[j] + dt * u[j] * growth(k, i, chem.v[j], s.u1[j], s.u2[j]);
        }
        rhs[0] -= lo[0] * u[0];
        rhs[m - 1] -= up[m - 1] * u[n - 1];
        solve_tridiagonal(lo, di, up, rhs);

        Field& w = i == 0 ? out.u1 : out.u2;
        for (std::size_t kk = 0; kk < m; ++kk) {
            double val = rhs[kk];
            if (val < 0.0) {
                if (val > -1e-14) {
                    val = 0.0;
                } else {
                    std::ostringstream os;
                    os << "step: u" << (i + 1) << " = " << val << " at x = " << g.x(kk + 1);
                    throw SchemeError(os.str());
                }
            }
            if (!(val <= k.blowup_bound)) {
                std::ostringstream os;
                os << "step: blow-up, u" << (i + 1) << " = " << val << " at x = " << g.x(kk + 1);
                throw SchemeError(os.str());
            }
            w[kk + 1] = val;
        }
    }
    return out;
}

RunSummary run(SimState& s, const Kinetics& k, double T, double dt,
               const std::vector<Observer>& observers) {
    if (!(dt > 0.0)) throw std::invalid_argument("run: dt must be positive");
    const auto total = static_cast<std::size_t>(std::llround(T / dt));
    std::vector<std::size_t> strides;
    for (const Observer& o : observers) {
        strides.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(o.every / dt))));
        o.fn(s);
    }
    const double t0 = s.t;
    RunSummary sum;
    sum.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= total; ++n) {
        s = step(s, k, dt);
        s.t = t0 + static_cast<double>(n) * dt;
        for (std::size_t j = 0; j < s.u1.size(); ++j) {
            sum.max_u1 = std::max(sum.max_u1, s.u1[j]);
            sum.max_u2 = std::max(sum.max_u2, s.u2[j]);
            sum.min_value = std::min({sum.min_value, s.u1[j], s.u2[j]});
        }
        for (std::size_t o = 0; o < observers.size(); ++o) {
            if (n % strides[o] == 0) observers[o].fn(s);
        }
    }
    sum.steps = total;
    sum.t_final = s.t;
    return sum;
}

// ---------------------------------------------------------------- fronts

double front_position(const Field& u1, double theta) {
    const Grid& g = u1.grid;
    for (std::size_t i = 0; i + 1 < u1.size(); ++i) {
        if (u1[i] >= theta && u1[i + 1] < theta) {
            const double t = (u1[i] - theta) / (u1[i] - u1[i + 1]);
            return g.x(i) + t * g.h();
        }
    }
    throw std::runtime_error("front_position: u1 never crosses the level downward");
}

double front_position(const SimState& s, double theta) { return front_position(s.u1, theta); }

SpeedEstimate estimate_speed(const std::vector<double>& times, const std::vector<double>& positions,
                             double theta) {
    if (times.size() != positions.size()) throw std::invalid_argument("estimate_speed: size mismatch");
    if (times.size() < 20) throw std::invalid_argument("estimate_speed: needs at least 20 samples");
    SpeedEstimate e;
    e.theta = theta;
    e.times = times;
    e.positions = positions;
    const std::size_t start = times.size() / 2;
    const std::size_t n = times.size() - start;
    e.window = n;
    double st = 0, sx = 0;
    for (std::size_t i = start; i < times.size(); ++i) {
        st += times[i];
        sx += positions[i];
    }
    const double mt = st / static_cast<double>(n), mx = sx / static_cast<double>(n);
    double stt = 0, stx = 0, sxx = 0;
    for (std::size_t i = start; i < times.size(); ++i) {
        stt += (times[i] - mt) * (times[i] - mt);
        stx += (times[i] - mt) * (positions[i] - mx);
        sxx += (positions[i] - mx) * (positions[i] - mx);
    }
    e.speed = stx / stt;
    e.intercept = mx - e.speed * mt;
    double ssr = 0.0;
    for (std::size_t i = start; i < times.size(); ++i) {
        const double r = positions[i] - (e.intercept + e.speed * times[i]);
        ssr += r * r;
    }
    e.r2 = sxx > 0.0 ? 1.0 - ssr / sxx : 1.0;
    e.std_error = n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2) / stt) : 0.0;
    return e;
}

// ---------------------------------------------------------------- experiments

SimState front_like_state(const Grid& g, double x0) {
    SimState s;
    s.u1 = Field::sample(g, [&](double x) { return x < x0 ? 1.0 : 0.0; }, 1.0, 0.0);
    s.u2 = Field::sample(g, [&](double x) { return x < x0 ? 0.0 : 1.0; }, 0.0, 1.0);
    return s;
}

SpreadReport spreading_experiment(const Params& p, const SpreadOptions& opts) {
    const Grid g = Grid::with_spacing(opts.x_min, opts.x_max, opts.h);
    SimState s = front_like_state(g, opts.front0);
    const Kinetics k = Kinetics::two_species(p);
    const double limit = opts.x_max - 0.1 * g.length();
    std::vector<double> times, pos;
    Observer tracker{opts.sample_every, [&](const SimState& st) {
                         const double x = front_position(st);
                         if (x > limit) {
                             std::ostringstream os;
                             os << "spreading_experiment: front at " << x << " entered the outer 10% at t = " << st.t;
                             throw std::runtime_error(os.str());
                         }
                         times.push_back(st.t);
                         pos.push_back(x);
                     }};
    run(s, k, opts.T, opts.dt, {tracker});
    SpreadReport rep;
    rep.estimate = estimate_speed(times, pos);
    rep.c0_star = minimal_linear_speed(p);
    rep.final_front = pos.back();
    return rep;
}

namespace {

std::vector<double> smooth_noise(std::size_t n, std::mt19937_64& rng, int passes) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> a(n);
    for (double& x : a) x = unit(rng);
    std::vector<double> b(n);
    for (int p = 0; p < passes; ++p) {
        for (std::size_t i = 0; i < n; ++i) {
            const double l2 = a[i >= 2 ? i - 2 : 0], l1 = a[i >= 1 ? i - 1 : 0];
            const double r1 = a[std::min(i + 1, n - 1)], r2 = a[std::min(i + 2, n - 1)];
            b[i] = (l2 + 4.0 * l1 + 6.0 * a[i] + 4.0 * r1 + r2) / 16.0;
        }
        a.swap(b);
    }
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    if (m > 0.0) {
        for (double& x : a) x /= m;
    }
    return a;
}

double sup_distance(const SimState& s, Point2 e) {
    double d = 0.0;
    for (std::size_t i = 0; i < s.u1.size(); ++i) {
        d = std::max({d, std::abs(s.u1[i] - e.u1), std::abs(s.u2[i] - e.u2)});
    }
    return d;
}

}  // namespace

StabilityReport stability_experiment(const Params& p, StabilityTarget target, double amplitude,
                                     double T, const StabilityOptions& opts) {
    const HypothesisReport hyp = check_hypotheses(p);
    Point2 e{1.0, 0.0};
    if (target == StabilityTarget::E1) {
        if (!hyp.H2) throw HypothesisError("stability_experiment: E1 requires H2");
    } else {
        if (!hyp.H3) throw HypothesisError("stability_experiment: ESTAR requires H3");
        const std::optional<Point2> es = coexistence_state(p);
        if (!es) throw HypothesisError("stability_experiment: e* is undefined (ab = 1)");
        e = *es;
    }
    if (!(amplitude >= 0.0)) throw std::invalid_argument("stability_experiment: amplitude must be >= 0");
    if (amplitude >= e.u1 || (target == StabilityTarget::ESTAR && amplitude >= e.u2)) {
        throw std::invalid_argument("stability_experiment: perturbation would not keep the data positive");
    }

    const Grid g = Grid::with_spacing(-opts.half_width, opts.half_width, opts.h);
    std::mt19937_64 rng(opts.seed);
    const std::vector<double> n1 = smooth_noise(g.size(), rng, 20);
    const std::vector<double> n2 = smooth_noise(g.size(), rng, 20);
    SimState s;
    std::vector<double> a(g.size()), b(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = std::pow(std::sin(std::numbers::pi * (g.x(i) - g.x_min()) / g.length()), 2);
        a[i] = e.u1 + amplitude * w * n1[i];
        b[i] = target == StabilityTarget::E1 ? amplitude * w * std::abs(n2[i]) : e.u2 + amplitude * w * n2[i];
    }
    a.front() = a.back() = e.u1;
    b.front() = b.back() = e.u2;
    s.u1 = Field(g, std::move(a), e.u1, e.u1);
    s.u2 = Field(g, std::move(b), e.u2, e.u2);

    StabilityReport rep;
    rep.target = e;
    Observer obs{opts.sample_every, [&](const SimState& st) {
                     rep.times.push_back(st.t);
                     rep.distance.push_back(sup_distance(st, e));
                 }};
    run(s, Kinetics::two_species(p), T, opts.dt, {obs});
    rep.final_distance = rep.distance.back();
    rep.eventually_decreasing = true;
    for (std::size_t i = rep.distance.size() / 2 + 1; i < rep.distance.size(); ++i) {
        if (rep.distance[i] > rep.distance[i - 1] + 1e-12) rep.eventually_decreasing = false;
    }
    rep.passed = rep.final_distance < 1e-3 && rep.eventually_decreasing;
    return rep;
}

// ---------------------------------------------------------------- cosine bump

double BumpSubsolution::value(double t, double x) const {
    if (x < support_left(t) || x > support_right(t)) return 0.0;
    const double s = x - x1 - l - q * t;
    return sigma * std::exp(-0.5 * q * s) * std::cos(0.5 * beta * s);
}

double BumpSubsolution::midpoint_closed_form() const {
    return sigma * std::exp(q * l / 4.0) * std::cos(std::numbers::pi / 4.0);
}

BumpReport bump_subsolution_check(const Params& p, double c, double q, double eps, double T,
                                  const BumpOptions& opts) {
    p.validate();
    if (!(eps > 0.0) || !(1.0 - p.a - eps > 0.0)) {
        throw DomainError("bump_subsolution_check: requires eps > 0 and 1 - a - eps > 0");
    }
    const double qmax = 2.0 * std::sqrt(1.0 - p.a - eps);
    if (!(std::max(c, 0.0) + eps < q && q < qmax)) {
        std::ostringstream os;
        os << "bump_subsolution_check: q = " << q << " outside (max{c,0}+eps, 2 sqrt(1-a-eps)) = ("
           << std::max(c, 0.0) + eps << ", " << qmax << ")";
        throw DomainError(os.str());
    }
    BumpReport rep;
    rep.c = c;
    BumpSubsolution& bump = rep.bump;
    bump.q = q;
    bump.eps = eps;
    bump.beta = std::sqrt(4.0 * (1.0 - p.a - eps) - q * q);
    bump.l = std::numbers::pi / bump.beta;
    bump.x1 = -bump.l - opts.gap;

    const Grid g = Grid::with_spacing(opts.x_min, opts.x_max, opts.h);
    SimState s = front_like_state(g, 0.0);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        if (x >= bump.x1 && x <= bump.x1 + bump.l) m = std::min(m, s.u1[i]);
    }
    bump.sigma = std::exp(-0.5 * bump.l * q) * m;

    const double mid = bump.midpoint_closed_form();
    rep.worst_slack = std::numeric_limits<double>::infinity();
    Observer obs{opts.sample_every, [&](const SimState& st) {
                     double slack = std::numeric_limits<double>::infinity();
                     for (std::size_t i = 0; i < g.size(); ++i) {
                         const double x = g.x(i);
                         if (x < bump.support_left(st.t) || x > bump.support_right(st.t)) continue;
                         slack = std::min(slack, st.u1[i] - bump.value(st.t, x));
                     }
                     const double md = bump.midpoint(st.t);
                     rep.times.push_back(st.t);
                     rep.min_slack.push_back(slack);
                     rep.midpoints.push_back(md);
                     rep.worst_slack = std::min(rep.worst_slack, slack);
                     rep.midpoint_spread = std::max(rep.midpoint_spread, std::abs(md - mid));
                 }};
    run(s, Kinetics::two_species(p), T, opts.dt, {obs});
    rep.comparison_holds = rep.worst_slack >= 0.0;
    return rep;
}

// ---------------------------------------------------------------- single species

SingleSpeciesReport single_species_mode(const SingleSpeciesParams& sp, double T,
                                        const SingleSpeciesOptions& opts) {
    if (!(sp.a > 0 && sp.b > 0 && sp.d > 0 && sp.mu > 0 && sp.lambda > 0 && sp.chi >= 0)) {
        throw std::invalid_argument("single_species_mode: parameters must be positive (chi >= 0)");
    }
    if (!(sp.chi * sp.mu < sp.b)) throw HypothesisError("single_species_mode: requires chi mu < b");
    const Grid g = Grid::with_spacing(-opts.half_width, opts.half_width, opts.h);
    const double eq = sp.a / sp.b;
    SimState s;
    if (opts.positive_start) {
        std::mt19937_64 rng(opts.seed);
        const std::vector<double> n = smooth_noise(g.size(), rng, 20);
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double w = std::pow(std::sin(std::numbers::pi * (g.x(i) - g.x_min()) / g.length()), 2);
            v[i] = eq * (1.0 + 0.5 * w * n[i]);
        }
        s.u1 = Field(g, std::move(v), eq, eq);
    } else {
        s.u1 = Field::sample(g, [&](double x) { return std::abs(x) < 5.0 ? eq : 0.0; }, 0.0, 0.0);
    }
    s.u2 = Field(g, std::vector<double>(g.size(), 0.0), 0.0, 0.0);
    run(s, Kinetics::single_species(sp), T, opts.dt);

    SingleSpeciesReport rep;
    rep.cone_speed = 2.0 * std::sqrt(sp.a * sp.d) - opts.eps;
    rep.cone_infimum = std::numeric_limits<double>::infinity();
    rep.distance_to_equilibrium = std::numeric_limits<double>::quiet_NaN();
    double dist = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(g.x(i)) <= rep.cone_speed * T) rep.cone_infimum = std::min(rep.cone_infimum, s.u1[i]);
        dist = std::max(dist, std::abs(s.u1[i] - eq));
    }
    if (opts.positive_start && 2.0 * sp.chi * sp.mu < sp.b) rep.distance_to_equilibrium = dist;
    return rep;
}

// ---------------------------------------------------------------- wave drift

DriftReport wave_drift(const WaveProfile& w, const Params& p, double T, double dt, double sample_every) {
    SimState s;
    s.u1 = w.U1;
    s.u2 = w.U2;
    s.frame_speed = w.c;
    DriftReport rep;
    Observer obs{sample_every, [&](const SimState& st) {
                     double d = 0.0;
                     for (std::size_t i = 0; i < st.u1.size(); ++i) {
                         d = std::max({d, std::abs(st.u1[i] - w.U1[i]), std::abs(st.u2[i] - w.U2[i])});
                     }
                     rep.times.push_back(st.t);
                     rep.drift.push_back(d);
                     rep.max_drift = std::max(rep.max_drift, d);
                 }};
    run(s, Kinetics::two_species(p), T, dt, {obs});
    return rep;
}

}  // namespace chemowave
