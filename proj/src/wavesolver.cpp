#include "chemowave/wavesolver.hpp"

#include "chemowave/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace chemowave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Discrete {
    double D = 1.0;
    double h = 1.0;
    std::vector<double> b;  // drift c - chi v_x
    ReactionCoefficients rc;
    double left = 0.0;
    double right = 0.0;
};

Discrete discretize(const BvpProblem& prob, const Params& p) {
    Discrete d;
    d.D = prob.component == 1 ? 1.0 : p.d;
    d.h = prob.u.u1.grid.h();
    const double chi = prob.component == 1 ? p.chi1 : p.chi2;
    const std::size_t n = prob.u.u1.size();
    d.b.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.b[i] = prob.c - chi * prob.chem.v_x[i];
    d.rc = reaction_coefficients(prob.component, prob.u, prob.chem.v, prob.env, p);
    d.left = prob.left_value;
    d.right = prob.right_value;
    return d;
}

/// Interior residual; G[0] = G[n-1] = 0. Returns max |G|.
double residual(const Discrete& d, const std::vector<double>& U, std::vector<double>& G) {
    const std::size_t n = U.size();
    G.assign(n, 0.0);
    const double ih2 = 1.0 / (d.h * d.h);
    const double i2h = 0.5 / d.h;
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        G[i] = d.D * (U[i + 1] - 2.0 * U[i] + U[i - 1]) * ih2 + d.b[i] * (U[i + 1] - U[i - 1]) * i2h +
               reaction_value(d.rc, i, U[i]);
        worst = std::max(worst, std::abs(G[i]));
    }
    return worst;
}

BvpResult monotone_iteration(const Discrete& d, std::vector<double> U, const BvpOptions& opts,
                             double Mi) {
    const std::size_t n = U.size();
    const std::size_t m = n - 2;
    U.front() = d.left;
    U.back() = d.right;
    double K = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        K = std::max(K, std::abs(d.rc.g[i] - d.rc.R));
        K = std::max(K, std::abs(d.rc.g[i] - 2.0 * d.rc.k * Mi - d.rc.R));
    }
    const double ih2 = 1.0 / (d.h * d.h);
    const double i2h = 0.5 / d.h;
    std::vector<double> lo(m), di(m), up(m), rhs(m), G;
    BvpResult res;
    res.used_fallback = true;
    for (int it = 0; it < opts.max_monotone; ++it) {
        const double r = residual(d, U, G);
        res.history.push_back(r);
        if (r < opts.tol) {
            res.residual = r;
            res.U.values = std::move(U);
            return res;
        }
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = k + 1;
            lo[k] = d.D * ih2 - d.b[i] * i2h;
            up[k] = d.D * ih2 + d.b[i] * i2h;
            di[k] = -2.0 * d.D * ih2 - K;
            rhs[k] = -(reaction_value(d.rc, i, U[i]) + K * U[i]);
        }
        rhs[0] -= lo[0] * d.left;
        rhs[m - 1] -= up[m - 1] * d.right;
        solve_tridiagonal(lo, di, up, rhs);
        for (std::size_t k = 0; k < m; ++k) U[k + 1] = rhs[k];
    }
    throw ConvergenceError("solve_bvp: monotone iteration did not converge", res.history);
}

BvpResult newton(const Discrete& d, std::vector<double> U, const BvpOptions& opts, bool& stalled) {
    const std::size_t n = U.size();
    const std::size_t m = n - 2;
    U.front() = d.left;
    U.back() = d.right;
    const double ih2 = 1.0 / (d.h * d.h);
    const double i2h = 0.5 / d.h;
    std::vector<double> lo(m), di(m), up(m), rhs(m), G, trial(n), Gt;
    BvpResult res;
    stalled = false;
    double r = residual(d, U, G);
    for (int it = 0; it <= opts.max_newton; ++it) {
        res.history.push_back(r);
        if (r < opts.tol) {
            res.residual = r;
            res.newton_iterations = it;
            res.U.values = std::move(U);
            return res;
        }
        if (it == opts.max_newton) break;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = k + 1;
            lo[k] = d.D * ih2 - d.b[i] * i2h;
            up[k] = d.D * ih2 + d.b[i] * i2h;
            di[k] = -2.0 * d.D * ih2 + reaction_derivative(d.rc, i, U[i]);
            rhs[k] = -G[i];
        }
        solve_tridiagonal(lo, di, up, rhs);
        double step = 1.0;
        bool accepted = false;
        while (step > 1e-6) {
            trial = U;
            for (std::size_t k = 0; k < m; ++k) trial[k + 1] += step * rhs[k];
            const double rt = residual(d, trial, Gt);
            if (rt < (1.0 - 1e-4 * step) * r) {
                U.swap(trial);
                G.swap(Gt);
                r = rt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }
    stalled = true;
    return res;
}

Field pair_component(const FieldPair& u, int c) { return c == 1 ? u.u1 : u.u2; }

double sup_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

const char* to_string(LeftLimit l) {
    switch (l) {
        case LeftLimit::E1: return "E1";
        case LeftLimit::ESTAR: return "ESTAR";
        default: return "UNRESOLVED";
    }
}

BvpProblem make_bvp(int component, const FieldPair& u, const Envelopes& env, const Params& p) {
    require_same_grid(u.u1, u.u2, "make_bvp");
    BvpProblem prob;
    prob.component = component;
    prob.u = u;
    prob.chem = solve_chemical(u.u1, u.u2, p);
    prob.env = env;
    prob.c = env.c_kappa;
    prob.left_value = env.upper(component, u.u1.grid.x_min());
    prob.right_value = env.upper(component, u.u1.grid.x_max());
    return prob;
}

double bvp_residual(const BvpProblem& prob, const Params& p, const Field& U) {
    std::vector<double> G;
    return residual(discretize(prob, p), U.values, G);
}

BvpResult solve_bvp_monotone(const BvpProblem& prob, const Params& p, const Field& start,
                             const BvpOptions& opts) {
    const Discrete d = discretize(prob, p);
    BvpResult res = monotone_iteration(d, start.values, opts, prob.env.bound(prob.component));
    const Grid& g = prob.u.u1.grid;
    res.U = Field(g, std::move(res.U.values));
    return res;
}

BvpResult solve_bvp(const BvpProblem& prob, const Params& p, const BvpOptions& opts,
                    const Field* initial) {
    const Grid& g = prob.u.u1.grid;
    const Discrete d = discretize(prob, p);
    std::vector<double> U0 = initial ? initial->values : upper_field(prob.env, prob.component, g).values;
    if (U0.size() != g.size()) throw std::invalid_argument("solve_bvp: initial guess has wrong size");
    bool stalled = false;
    BvpResult res = newton(d, std::move(U0), opts, stalled);
    if (stalled) {
        BvpResult mono = monotone_iteration(d, upper_field(prob.env, prob.component, g).values, opts,
                                            prob.env.bound(prob.component));
        mono.newton_iterations = static_cast<int>(res.history.size());
        res = std::move(mono);
    }
    res.U = Field(g, std::move(res.U.values));
    return res;
}

// ---------------------------------------------------------------- steady residual

double steady_residual(const Field& U1, const Field& U2, const Params& p, double c) {
    require_same_grid(U1, U2, "steady_residual");
    const ChemicalField chem = solve_chemical(U1, U2, p);
    const double h = U1.grid.h();
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < U1.size(); ++i) {
        const double v = chem.v[i], vx = chem.v_x[i];
        const double a1 = U1[i], a2 = U2[i];
        const double r1 = (U1[i + 1] - 2.0 * a1 + U1[i - 1]) / (h * h) +
                          (c - p.chi1 * vx) * (U1[i + 1] - U1[i - 1]) / (2.0 * h) +
                          a1 * (1.0 - p.lambda * p.chi1 * v - (1.0 - p.chi1 * p.mu1) * a1 -
                                (p.a - p.chi1 * p.mu2) * a2);
        const double r2 = p.d * (U2[i + 1] - 2.0 * a2 + U2[i - 1]) / (h * h) +
                          (c - p.chi2 * vx) * (U2[i + 1] - U2[i - 1]) / (2.0 * h) +
                          a2 * (p.r - p.lambda * p.chi2 * v - (p.b * p.r - p.chi2 * p.mu1) * a1 -
                                (p.r - p.chi2 * p.mu2) * a2);
        worst = std::max({worst, std::abs(r1), std::abs(r2)});
    }
    return worst;
}

// ---------------------------------------------------------------- fixed point

WaveProfile fixed_point_iterate(const Params& p, const Envelopes& env, double y,
                                const WaveOptions& opts, const FieldPair* initial) {
    if (y < env.y0()) {
        std::ostringstream os;
        os << "fixed_point_iterate: half-width " << y << " is below y0 = " << env.y0();
        throw DomainError(os.str());
    }
    const Grid g = Grid::with_spacing(-y, y, opts.h);
    FieldPair u = upper_pair(env, g);
    if (initial) {
        require_same_grid(initial->u1, u.u1, "fixed_point_iterate");
        u = project_to_E(*initial, env);
    }
    u = with_wave_tails(u);

    FixedPointStats stats;
    stats.theta = opts.theta;
    FieldPair phi = u;
    double prev_update = kInf;
    bool converged = false;
    for (int it = 1; it <= opts.max_iter; ++it) {
        const ChemicalField chem = solve_chemical(u.u1, u.u2, p);
        FieldPair next;
        for (int comp = 1; comp <= 2; ++comp) {
            BvpProblem prob;
            prob.component = comp;
            prob.u = u;
            prob.chem = chem;
            prob.env = env;
            prob.c = env.c_kappa;
            prob.left_value = env.upper(comp, g.x_min());
            prob.right_value = env.upper(comp, g.x_max());
            const Field seed = pair_component(phi, comp);
            BvpResult r = solve_bvp(prob, p, opts.bvp, &seed);
            stats.newton_iterations += r.newton_iterations;
            if (r.used_fallback) ++stats.fallbacks;
            (comp == 1 ? next.u1 : next.u2) = std::move(r.U);
        }
        const MembershipReport m = membership(next, env);
        stats.max_envelope_violation =
            std::max({stats.max_envelope_violation, m.c1.worst, m.c2.worst});
        phi = with_wave_tails(project_to_E(next, env));

        const double update = std::max(sup_diff(phi.u1, u.u1), sup_diff(phi.u2, u.u2));
        stats.history.push_back(update);
        stats.iterations = it;
        stats.final_update = update;
        if (update < opts.tol) {
            u = phi;
            converged = true;
            break;
        }
        if (update > 1.5 * prev_update) {
            stats.theta = std::max(stats.theta * 0.5, 1.0 / 1024.0);
        } else if (update < prev_update) {
            stats.theta = std::min(opts.theta, stats.theta * 1.25);
        }
        prev_update = update;
        for (std::size_t i = 0; i < g.size(); ++i) {
            u.u1[i] += stats.theta * (phi.u1[i] - u.u1[i]);
            u.u2[i] += stats.theta * (phi.u2[i] - u.u2[i]);
        }
        u = with_wave_tails(u);
    }
    if (!converged) {
        std::ostringstream os;
        os << "fixed_point_iterate: no convergence in " << opts.max_iter
           << " iterations (last update " << stats.final_update << ")";
        throw ConvergenceError(os.str(), stats.history, u);
    }

    WaveProfile w;
    w.U1 = u.u1;
    w.U2 = u.u2;
    w.V = solve_chemical(u.u1, u.u2, p).v;
    w.c = env.c_kappa;
    w.kappa = env.kappa;
    w.env = env;
    w.residual = steady_residual(w.U1, w.U2, p, w.c);
    w.stages.push_back(std::move(stats));
    return w;
}

namespace {

/// Extends a profile to a wider grid: interior by interpolation, the left
/// extension by the value a tenth of the way into the old domain (past the
/// boundary layer), the right extension by the upper envelope.
FieldPair extend_profile(const WaveProfile& w, const Grid& g) {
    const Grid& old = w.grid();
    const double x_ref = old.x_min() + 0.1 * old.length();
    const double l1 = w.U1.at(x_ref), l2 = w.U2.at(x_ref);
    FieldPair out{Field(g, std::vector<double>(g.size())), Field(g, std::vector<double>(g.size()))};
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        if (x < old.x_min()) {
            out.u1[i] = l1;
            out.u2[i] = l2;
        } else if (x > old.x_max()) {
            out.u1[i] = w.env.upper1(x);
            out.u2[i] = w.env.upper2(x);
        } else {
            out.u1[i] = w.U1.at(x);
            out.u2[i] = w.U2.at(x);
        }
    }
    return with_wave_tails(out);
}

FieldPair resample(const FieldPair& u, const Grid& g) {
    FieldPair out{Field::sample(g, [&](double x) { return u.u1.at(x); }, u.u1.left_tail, u.u1.right_tail),
                  Field::sample(g, [&](double x) { return u.u2.at(x); }, u.u2.left_tail, u.u2.right_tail)};
    return out;
}

}  // namespace

WaveProfile solve_wave_kappa(const Params& p, double kappa, const WaveOptions& opts,
                             const FieldPair* initial) {
    const Envelopes env = build_envelopes(p, kappa);
    if (opts.y_schedule.empty()) throw std::invalid_argument("solve_wave: empty y schedule");
    std::optional<WaveProfile> w;
    std::vector<FixedPointStats> stages;
    for (std::size_t s = 0; s < opts.y_schedule.size(); ++s) {
        const double y = std::max(opts.y_schedule[s], std::ceil(env.y0()));
        const Grid g = Grid::with_spacing(-y, y, opts.h);
        WaveOptions stage = opts;
        if (s + 1 < opts.y_schedule.size()) stage.tol = std::max(opts.tol, 1e-7);
        std::optional<FieldPair> start;
        if (w) {
            start = extend_profile(*w, g);
        } else if (initial) {
            start = resample(*initial, g);
        }
        w = fixed_point_iterate(p, env, y, stage, start ? &*start : nullptr);
        stages.push_back(w->stages.front());
    }
    w->stages = std::move(stages);
    try {
        w->tails = fit_tails(*w, p);
    } catch (const std::runtime_error&) {
        w->tails.reset();
    }
    w->left = classify_left_limit(*w, p);
    return *w;
}

WaveProfile solve_wave(const Params& p, double c, const WaveOptions& opts, const FieldPair* initial) {
    p.validate();
    const std::optional<double> cs = c_star(p);
    if (!cs) throw HypothesisError("solve_wave: H4 fails, c* is undefined");
    if (!(c > *cs)) {
        std::ostringstream os;
        os.precision(10);
        os << "solve_wave: speed " << c << " must exceed c* = " << *cs;
        if (c < minimal_linear_speed(p)) {
            os << "; no nontrivial wave exists below c0* = " << minimal_linear_speed(p);
        }
        throw DomainError(os.str());
    }
    return solve_wave_kappa(p, kappa_of_speed(p, c), opts, initial);
}

// ---------------------------------------------------------------- diagnostics

TailReport fit_tails(const WaveProfile& w, const Params& p) {
    const Grid& g = w.grid();
    const double kappa = w.kappa;
    std::vector<double> xs, ys, pre2;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        const double u = w.U1[i];
        if (x <= 0.0 || x > g.x_max() - 5.0) continue;
        if (u < 1e-8 || u > 1e-3) continue;
        xs.push_back(x);
        ys.push_back(std::log(u));
        pre2.push_back((w.U2[i] - 1.0) * std::exp(kappa * x));
    }
    if (xs.size() < 10) throw std::runtime_error("fit_tails: decay window holds fewer than 10 points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, sp = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        sp += pre2[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    TailReport t;
    t.rate = -slope;
    t.u1_prefactor = std::exp(intercept);
    t.u2_prefactor = sp / n;
    t.u2_prefactor_closed_form = u2_tail_prefactor(p, kappa);
    t.x_lo = xs.front();
    t.x_hi = xs.back();
    t.points = xs.size();
    return t;
}

Point2 left_average(const WaveProfile& w) {
    const Grid& g = w.grid();
    const double L = g.length();
    const double lo = g.x_min() + std::min(0.05 * L, 10.0);
    const double hi = lo + 0.1 * L;
    double s1 = 0.0, s2 = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        if (x < lo || x > hi) continue;
        s1 += w.U1[i];
        s2 += w.U2[i];
        ++count;
    }
    if (count == 0) return {w.U1[0], w.U2[0]};
    return {s1 / static_cast<double>(count), s2 / static_cast<double>(count)};
}

LeftLimit classify_left_limit(const WaveProfile& w, const Params& p, double tol) {
    const Point2 avg = left_average(w);
    auto close = [&](Point2 e) {
        return std::abs(avg.u1 - e.u1) < tol && std::abs(avg.u2 - e.u2) < tol;
    };
    if (close({1.0, 0.0})) return LeftLimit::E1;
    const std::optional<Point2> es = coexistence_state(p);
    if (es && es->u1 > 0.0 && es->u2 > 0.0 && close(*es)) return LeftLimit::ESTAR;
    return LeftLimit::UNRESOLVED;
}

double half_crossing(const Field& U1) {
    const Grid& g = U1.grid;
    for (std::size_t i = 0; i + 1 < U1.size(); ++i) {
        if (U1[i] >= 0.5 && U1[i + 1] < 0.5) {
            const double t = (U1[i] - 0.5) / (U1[i] - U1[i + 1]);
            return g.x(i) + t * g.h();
        }
    }
    throw std::runtime_error("half_crossing: U1 never crosses 1/2");
}

Field shifted(const Field& f, double shift) {
    return Field::sample(f.grid, [&](double x) { return f.at(x + shift); }, f.left_tail, f.right_tail);
}

// ---------------------------------------------------------------- continuation

bool ContinuationResult::diffs_decreasing() const {
    for (std::size_t k = 2; k < steps.size(); ++k) {
        if (!(steps[k].diff_to_previous < steps[k - 1].diff_to_previous)) return false;
    }
    return steps.size() >= 2;
}

std::vector<double> default_continuation_speeds(const Params& p) {
    const double c0 = minimal_linear_speed(p);
    return {1.2 * c0, 1.1 * c0, 1.05 * c0, 1.02 * c0, 1.01 * c0};
}

ContinuationResult min_speed_continuation(const Params& p, const std::vector<double>& speeds,
                                          const WaveOptions& opts, double window) {
    const HypothesisReport hyp = check_hypotheses(p);
    if (!hyp.H5 || !(hyp.H2 || hyp.H3)) {
        throw HypothesisError("min_speed_continuation: requires H5 together with H2 or H3");
    }
    ContinuationResult out;
    out.window = window;
    std::optional<FieldPair> prev;
    for (std::size_t k = 0; k < speeds.size(); ++k) {
        try {
            if (k > 0 && !(speeds[k] < speeds[k - 1])) {
                throw std::invalid_argument("min_speed_continuation: speeds must decrease");
            }
            WaveOptions o = opts;
            if (prev) o.y_schedule = {opts.y_schedule.back()};
            ContinuationStep step;
            step.c = speeds[k];
            step.profile = solve_wave(p, speeds[k], o, prev ? &*prev : nullptr);
            step.kappa = step.profile.kappa;
            step.shift = half_crossing(step.profile.U1);
            FieldPair norm{shifted(step.profile.U1, step.shift), shifted(step.profile.U2, step.shift)};
            step.diff_to_previous = std::numeric_limits<double>::quiet_NaN();
            if (prev) {
                double d = 0.0;
                const Grid& g = norm.u1.grid;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const double x = g.x(i);
                    if (std::abs(x) > window) continue;
                    d = std::max({d, std::abs(norm.u1[i] - prev->u1.at(x)),
                                  std::abs(norm.u2[i] - prev->u2.at(x))});
                }
                step.diff_to_previous = d;
            }
            prev = norm;
            out.steps.push_back(std::move(step));
        } catch (const std::exception& e) {
            out.failed_index = k;
            out.failure = e.what();
            break;
        }
    }
    return out;
}

}  // namespace chemowave
