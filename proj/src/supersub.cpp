#include "chemowave/supersub.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace chemowave {

// ---------------------------------------------------------------- Envelopes

double Envelopes::upper1(double x) const {
    return std::min(M1, M1 * D2 * std::exp(-kappa * x));
}

double Envelopes::lower1(double x) const {
    const double s = 1.0 - D1 * std::exp(-eps1 * x);
    if (s <= 0.0) return 0.0;
    return M1 * D2 * s * std::exp(-kappa * x);
}

double Envelopes::upper2(double x) const {
    return std::min(M2, 1.0 + M2 * D2_tilde * std::exp(-kappa * x));
}

double Envelopes::lower2(double x) const {
    return positive_part(1.0 - D2_tilde * std::exp(-kappa * x));
}

std::vector<double> Envelopes::upper_kinks(int component) const {
    if (component == 1) return {std::log(D2) / kappa};
    if (M2 <= 1.0) return {};
    return {-std::log((M2 - 1.0) / (M2 * D2_tilde)) / kappa};
}

std::vector<double> Envelopes::lower_kinks(int component) const {
    if (component == 1) return {std::log(D1) / eps1};
    return {std::log(D2_tilde) / kappa};
}

double Envelopes::lower1_argmax() const {
    return std::log(D1 * (eps1 + kappa) / kappa) / eps1;
}

double Envelopes::lower1_max() const {
    const double r = kappa / eps1;
    return M1 * D2 * eps1 * std::pow(kappa, r) / std::pow(kappa + eps1, r + 1.0) * std::pow(D1, -r);
}

double Envelopes::y0() const {
    double y = std::max(1.0, std::log(M1) / kappa);
    if (M2 > 1.0) y = std::max(y, std::log((M2 - 1.0) / (M2 * D2_tilde)) / kappa);
    return y;
}

// ---------------------------------------------------------------- construction

Envelopes build_envelopes(const Params& p, double kappa) {
    p.validate();
    const HypothesisReport hyp = check_hypotheses(p);
    if (!hyp.H4) throw HypothesisError("build_envelopes: H4 does not hold");
    const std::optional<double> ks = kappa_star(p);
    if (!ks) throw HypothesisError("build_envelopes: kappa* is undefined");
    if (!(kappa > 0.0 && kappa < *ks)) {
        std::ostringstream os;
        os << "build_envelopes: kappa = " << kappa << " outside (0, kappa*) with kappa* = " << *ks;
        throw DomainError(os.str());
    }

    Envelopes e;
    e.kappa = kappa;
    e.M1 = amplitude_bound1(p);
    e.M2 = amplitude_bound2(p);
    e.c_kappa = c_of_kappa(p, kappa);
    e.f = solve_f(p, kappa);
    e.eps1 = 0.5 * std::min(kappa, e.c_kappa - 2.0 * kappa);
    e.D2 = 1.0 / e.M1;
    e.D2_tilde = e.D2 / (p.a + p.chi1 * e.f);

    const double B = b_lambda_kappa(p.lambda, kappa);
    const double ratio = e.M2 * e.D2_tilde / e.D2;
    const double rhs = 1.0 + (p.a - p.chi1 * p.mu2) * ratio +
                       0.5 * p.chi1 * (std::sqrt(p.lambda) + 2.0 * kappa + e.eps1) *
                           (p.mu2 * ratio + p.mu1 * e.M1) * B;
    const double gap = e.eps1 * (e.c_kappa - e.eps1 - 2.0 * kappa);
    e.D1 = std::max(1.01, e.D1_safety * e.D2 * rhs / gap);

    const double s = p.mu1 * e.M1 + p.mu2 * e.M2;
    const double r1 = 1.0 - (p.a - p.chi1 * p.mu2) * e.M2 - p.chi1 * s;
    const double r2 = p.r - (p.b * p.r - p.chi2 * p.mu1) * e.M1 - p.chi2 * s;
    e.R = 1.0 + std::max(0.0, std::max(r1, r2));
    return e;
}

Field upper_field(const Envelopes& env, int component, const Grid& g) {
    const double right = component == 1 ? 0.0 : 1.0;
    return Field::sample(g, [&](double x) { return env.upper(component, x); }, env.bound(component),
                         right);
}

Field lower_field(const Envelopes& env, int component, const Grid& g) {
    const double right = component == 1 ? 0.0 : 1.0;
    return Field::sample(g, [&](double x) { return env.lower(component, x); }, 0.0, right);
}

FieldPair upper_pair(const Envelopes& env, const Grid& g) {
    return {upper_field(env, 1, g), upper_field(env, 2, g)};
}

FieldPair lower_pair(const Envelopes& env, const Grid& g) {
    return {lower_field(env, 1, g), lower_field(env, 2, g)};
}

FieldPair with_wave_tails(FieldPair u) {
    u.u1.left_tail = u.u1.values.front();
    u.u2.left_tail = u.u2.values.front();
    u.u1.right_tail = 0.0;
    u.u2.right_tail = 1.0;
    return u;
}

// ---------------------------------------------------------------- membership

MembershipReport membership(const FieldPair& u, const Envelopes& env, double tol) {
    require_same_grid(u.u1, u.u2, "membership");
    MembershipReport rep;
    rep.c1.worst = -std::numeric_limits<double>::infinity();
    rep.c2.worst = -std::numeric_limits<double>::infinity();
    const Grid& g = u.u1.grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        const double v1 = std::max(env.lower1(x) - u.u1[i], u.u1[i] - env.upper1(x));
        const double v2 = std::max(env.lower2(x) - u.u2[i], u.u2[i] - env.upper2(x));
        if (v1 > rep.c1.worst) rep.c1 = {v1, x};
        if (v2 > rep.c2.worst) rep.c2 = {v2, x};
    }
    rep.in_E = rep.c1.worst <= tol && rep.c2.worst <= tol;
    return rep;
}

FieldPair project_to_E(const FieldPair& u, const Envelopes& env) {
    FieldPair out = u;
    const Grid& g = u.u1.grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        out.u1[i] = std::clamp(u.u1[i], env.lower1(x), env.upper1(x));
        out.u2[i] = std::clamp(u.u2[i], env.lower2(x), env.upper2(x));
    }
    return out;
}

namespace {

std::vector<double> smooth5(const std::vector<double>& v) {
    std::vector<double> out = v;
    for (std::size_t i = 2; i + 2 < v.size(); ++i) {
        out[i] = (v[i - 2] + 4.0 * v[i - 1] + 6.0 * v[i] + 4.0 * v[i + 1] + v[i + 2]) / 16.0;
    }
    return out;
}

}  // namespace

FieldPair sample_in_E(const Envelopes& env, const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> a(g.size()), b(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        a[i] = env.lower1(x) + unit(rng) * (env.upper1(x) - env.lower1(x));
        b[i] = env.lower2(x) + unit(rng) * (env.upper2(x) - env.lower2(x));
    }
    FieldPair u{Field(g, smooth5(a)), Field(g, smooth5(b))};
    return with_wave_tails(project_to_E(u, env));
}

// ---------------------------------------------------------------- operator

ReactionCoefficients reaction_coefficients(int component, const FieldPair& u, const Field& v,
                                           const Envelopes& env, const Params& p) {
    ReactionCoefficients rc;
    const std::size_t n = v.size();
    rc.g.resize(n);
    rc.R = env.R;
    if (component == 1) {
        rc.k = 1.0 / env.M1;
        rc.u = u.u1.values;
        for (std::size_t i = 0; i < n; ++i) {
            rc.g[i] = 1.0 - (p.a - p.chi1 * p.mu2) * u.u2[i] - p.lambda * p.chi1 * v[i];
        }
    } else {
        rc.k = p.r / env.M2;
        rc.u = u.u2.values;
        for (std::size_t i = 0; i < n; ++i) {
            rc.g[i] = p.r - (p.b * p.r - p.chi2 * p.mu1) * u.u1[i] - p.lambda * p.chi2 * v[i];
        }
    }
    return rc;
}

namespace {

Field apply_operator(int component, const Field& U, const ReactionCoefficients& rc, const Field& vx,
                     const Params& p, double c) {
    const std::size_t n = U.size();
    const double h = U.grid.h();
    const double diff = component == 1 ? 1.0 : p.d;
    const double chi = component == 1 ? p.chi1 : p.chi2;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double um = i == 0 ? U.left_tail : U[i - 1];
        const double up = i + 1 == n ? U.right_tail : U[i + 1];
        const double uxx = (up - 2.0 * U[i] + um) / (h * h);
        const double ux = (up - um) / (2.0 * h);
        out[i] = diff * uxx + (c - chi * vx[i]) * ux + reaction_value(rc, i, U[i]);
    }
    return Field(U.grid, std::move(out), 0.0, 0.0);
}

}  // namespace

FieldPair eval_operator(const FieldPair& U, const FieldPair& u, const Envelopes& env,
                        const Params& p, double c) {
    require_same_grid(U.u1, u.u1, "eval_operator");
    require_same_grid(U.u2, u.u2, "eval_operator");
    require_same_grid(u.u1, u.u2, "eval_operator");
    if (std::isnan(c)) c = env.c_kappa;
    const MembershipReport m = membership(u, env, 1e-12);
    if (!m.in_E) throw std::invalid_argument("eval_operator: environment u is not in E(kappa)");
    const ChemicalField chem = solve_chemical(u.u1, u.u2, p);
    return {apply_operator(1, U.u1, reaction_coefficients(1, u, chem.v, env, p), chem.v_x, p, c),
            apply_operator(2, U.u2, reaction_coefficients(2, u, chem.v, env, p), chem.v_x, p, c)};
}

// ---------------------------------------------------------------- sign conditions

bool Lemma3Report::all_hold() const {
    return std::all_of(checks.begin(), checks.end(), [](const SignCheck& s) { return s.holds; });
}

std::vector<SignCheck> Lemma3Report::summary() const {
    std::map<std::pair<std::string, int>, SignCheck> worst;
    for (const SignCheck& s : checks) {
        auto key = std::make_pair(s.name, s.component);
        auto it = worst.find(key);
        if (it == worst.end() || s.worst_slack < it->second.worst_slack) worst[key] = s;
    }
    std::vector<SignCheck> out;
    for (auto& [k, v] : worst) {
        SignCheck s = v;
        s.holds = std::all_of(checks.begin(), checks.end(), [&](const SignCheck& c) {
            return c.name != k.first || c.component != k.second || c.holds;
        });
        out.push_back(s);
    }
    return out;
}

Grid lemma_grid(const Envelopes& env, double h) {
    double right = 0.0;
    for (int c = 1; c <= 2; ++c) {
        for (double k : env.lower_kinks(c)) right = std::max(right, k);
        for (double k : env.upper_kinks(c)) right = std::max(right, k);
    }
    return Grid::with_spacing(-(env.y0() + 20.0), right + 60.0, h);
}

Lemma3Report verify_lemma3(const Envelopes& env, const Params& p, std::size_t samples,
                           const Grid& g, std::uint64_t seed) {
    Lemma3Report rep;
    const double h = g.h();
    rep.tolerance = 10.0 * h * h;
    rep.samples = samples;

    const FieldPair up = upper_pair(env, g);
    const FieldPair lo = lower_pair(env, g);
    const FieldPair top{Field(g, std::vector<double>(g.size(), env.M1)),
                        Field(g, std::vector<double>(g.size(), env.M2))};
    const FieldPair zero{Field(g, std::vector<double>(g.size(), 0.0)),
                         Field(g, std::vector<double>(g.size(), 0.0))};

    auto near_kink = [&](double x, const std::vector<double>& kinks) {
        for (double k : kinks) {
            if (std::abs(x - k) <= h * (1.0 + 1e-9)) return true;
        }
        return false;
    };

    // sign = -1 checks F <= 0, sign = +1 checks F >= 0
    auto record = [&](const char* name, std::size_t sample, int comp, const Field& F, double sign,
                      auto&& active) {
        SignCheck sc{name, sample, comp, std::numeric_limits<double>::infinity(), 0.0, true};
        for (std::size_t i = 1; i + 1 < g.size(); ++i) {
            const double x = g.x(i);
            if (!active(x)) continue;
            const double slack = sign * F[i];
            if (slack < sc.worst_slack) {
                sc.worst_slack = slack;
                sc.x_at_worst = x;
            }
        }
        sc.holds = !(sc.worst_slack < -rep.tolerance);
        rep.checks.push_back(sc);
    };

    auto check_env = [&](std::size_t id, const FieldPair& u) {
        const FieldPair fM = eval_operator(top, u, env, p, env.c_kappa);
        const FieldPair f0 = eval_operator(zero, u, env, p, env.c_kappa);
        const FieldPair fU = eval_operator(up, u, env, p, env.c_kappa);
        const FieldPair fL = eval_operator(lo, u, env, p, env.c_kappa);
        for (int c = 1; c <= 2; ++c) {
            const Field& FM = c == 1 ? fM.u1 : fM.u2;
            const Field& F0 = c == 1 ? f0.u1 : f0.u2;
            const Field& FU = c == 1 ? fU.u1 : fU.u2;
            const Field& FL = c == 1 ? fL.u1 : fL.u2;
            const auto uk = env.upper_kinks(c);
            const auto lk = env.lower_kinks(c);
            auto all = [](double) { return true; };
            record("F(M) <= 0", id, c, FM, -1.0, all);
            record("F(0) >= 0", id, c, F0, 1.0, all);
            record("F(upper) <= 0", id, c, FU, -1.0, [&](double x) {
                return env.upper(c, x) < env.bound(c) && !near_kink(x, uk);
            });
            record("F(lower) >= 0", id, c, FL, 1.0, [&](double x) {
                return env.lower(c, x) > 0.0 && !near_kink(x, lk);
            });
        }
    };

    check_env(0, up);
    check_env(1, lo);
    check_env(2, FieldPair{up.u1, lo.u2});
    check_env(3, FieldPair{lo.u1, up.u2});
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s) check_env(4 + s, sample_in_E(env, g, rng));
    return rep;
}

}  // namespace chemowave
