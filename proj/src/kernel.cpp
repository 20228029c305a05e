#include "chemowave/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chemowave {

// ---------------------------------------------------------------- sweeps

ExponentialMoments exponential_moments(std::span<const double> s, double h, double k,
                                       double left_tail, double right_tail) {
    const std::size_t n = s.size();
    ExponentialMoments m;
    m.left.assign(n, 0.0);
    m.right.assign(n, 0.0);
    if (n == 0) return m;

    // Exact cell weights for a linear interpolant against e^{-k t}, t in [0, h]:
    //   near = integral (1 - t/h) e^{-kt} dt,  far = integral (t/h) e^{-kt} dt
    const double kh = k * h;
    const double E = std::exp(-kh);
    const double one_minus_E = -std::expm1(-kh);
    const double w_far = (one_minus_E - kh * E) / (k * kh);
    const double w_near = one_minus_E / k - w_far;

    m.left[0] = left_tail / k;
    for (std::size_t j = 1; j < n; ++j) {
        m.left[j] = E * m.left[j - 1] + w_near * s[j] + w_far * s[j - 1];
    }
    m.right[n - 1] = right_tail / k;
    for (std::size_t j = n - 1; j-- > 0;) {
        m.right[j] = E * m.right[j + 1] + w_near * s[j] + w_far * s[j + 1];
    }
    return m;
}

ChemicalField solve_chemical(const Field& u1, const Field& u2, const Params& p) {
    require_same_grid(u1, u2, "solve_v");
    const std::size_t n = u1.size();
    std::vector<double> src(n);
    for (std::size_t i = 0; i < n; ++i) src[i] = p.mu1 * u1[i] + p.mu2 * u2[i];
    const double src_left = p.mu1 * u1.left_tail + p.mu2 * u2.left_tail;
    const double src_right = p.mu1 * u1.right_tail + p.mu2 * u2.right_tail;

    const double k = std::sqrt(p.lambda);
    const ExponentialMoments m = exponential_moments(src, u1.grid.h(), k, src_left, src_right);

    std::vector<double> v(n), vx(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = (m.left[i] + m.right[i]) / (2.0 * k);
        vx[i] = 0.5 * (m.right[i] - m.left[i]);
    }
    return ChemicalField{Field(u1.grid, std::move(v), src_left / p.lambda, src_right / p.lambda),
                         Field(u1.grid, std::move(vx), 0.0, 0.0)};
}

Field solve_v(const Field& u1, const Field& u2, const Params& p) {
    return solve_chemical(u1, u2, p).v;
}

Field solve_v_x(const Field& u1, const Field& u2, const Params& p) {
    return solve_chemical(u1, u2, p).v_x;
}

double residual_elliptic(const Field& v, const Field& u1, const Field& u2, const Params& p) {
    require_same_grid(v, u1, "residual_elliptic");
    require_same_grid(v, u2, "residual_elliptic");
    const double h2 = v.grid.h() * v.grid.h();
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const double d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
        const double res = d2 - p.lambda * v[i] + p.mu1 * u1[i] + p.mu2 * u2[i];
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

// ---------------------------------------------------------------- bounds

double v_upper_bound(const Envelopes& env, const Params& p, double x) {
    const double sl = std::sqrt(p.lambda);
    const double B = b_lambda_kappa(p.lambda, env.kappa);
    const double e = std::exp(-env.kappa * x);
    const double t1 = std::min(env.M1 / p.lambda, env.M1 * env.D2 * B * e / (2.0 * sl));
    const double t2 = std::min(env.M2 / p.lambda, 1.0 / p.lambda + env.M2 * env.D2_tilde * B * e / (2.0 * sl));
    return p.mu1 * t1 + p.mu2 * t2;
}

double v_lower_bound(const Envelopes& env, const Params& p, double x) {
    const double sl = std::sqrt(p.lambda);
    const double B = b_lambda_kappa(p.lambda, env.kappa);
    const double e = std::exp(-env.kappa * x);
    double t1 = 0.0;
    // For kappa + eps1 >= sqrt(lambda) the shifted moment diverges and the bound degenerates to 0.
    if (env.kappa + env.eps1 < sl) {
        const double Be = b_lambda_kappa(p.lambda, env.kappa + env.eps1);
        t1 = env.M1 * env.D2 * e / (2.0 * sl) * positive_part(B - env.D1 * Be * std::exp(-env.eps1 * x));
    }
    const double t2 = positive_part(1.0 / p.lambda - env.D2_tilde * B * e / (2.0 * sl));
    return p.mu1 * t1 + p.mu2 * t2;
}

double v_x_bound(const Envelopes& env, const Params& p, double x) {
    const double sl = std::sqrt(p.lambda);
    const double B = b_lambda_kappa(p.lambda, env.kappa);
    const double e = std::exp(-env.kappa * x);
    return p.mu1 * std::min(env.M1 * env.D2 * B * e / 2.0, env.M1 / sl) +
           p.mu2 * std::min(env.D2_tilde * env.M2 * B * e / 2.0, env.M2 / sl);
}

namespace {

/// Points where the min{...} branches in the bounds cross.
std::vector<double> bound_crossovers(const Envelopes& env, const Params& p) {
    const double sl = std::sqrt(p.lambda);
    const double B = b_lambda_kappa(p.lambda, env.kappa);
    std::vector<double> xs;
    auto add = [&](double ratio) {  // e^{-kappa x} = ratio
        if (ratio > 0.0 && std::isfinite(ratio)) xs.push_back(-std::log(ratio) / env.kappa);
    };
    add((env.M1 / p.lambda) / (env.M1 * env.D2 * B / (2.0 * sl)));
    add(((env.M2 - 1.0) / p.lambda) / (env.M2 * env.D2_tilde * B / (2.0 * sl)));
    add((env.M1 / sl) / (env.M1 * env.D2 * B / 2.0));
    add((env.M2 / sl) / (env.D2_tilde * env.M2 * B / 2.0));
    add((1.0 / p.lambda) / (env.D2_tilde * B / (2.0 * sl)));
    return xs;
}

}  // namespace

LemmaBoundsReport check_lemma_bounds(const Field& u1, const Field& u2, const Envelopes& env,
                                     const Params& p) {
    require_same_grid(u1, u2, "check_lemma_bounds");
    const Grid& g = u1.grid;
    constexpr double kMembershipTol = 1e-12;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        if (u1[i] < env.lower1(x) - kMembershipTol || u1[i] > env.upper1(x) + kMembershipTol ||
            u2[i] < env.lower2(x) - kMembershipTol || u2[i] > env.upper2(x) + kMembershipTol) {
            std::ostringstream os;
            os << "check_lemma_bounds: input is not in E(kappa) at x = " << x;
            throw std::invalid_argument(os.str());
        }
    }

    const ChemicalField chem = solve_chemical(u1, u2, p);
    LemmaBoundsReport rep;
    const double h = g.h();
    rep.tolerance = 10.0 * h * h + 1e-9;
    const std::vector<double> crossings = bound_crossovers(env, p);
    auto tol_at = [&](double x) {
        for (double xc : crossings) {
            if (std::abs(x - xc) <= 2.0 * h) return std::max(rep.tolerance, 10.0 * h);
        }
        return rep.tolerance;
    };

    rep.upper = {"v <= upper bound", std::numeric_limits<double>::infinity(), 0.0, true};
    rep.lower = {"v >= lower bound", std::numeric_limits<double>::infinity(), 0.0, true};
    rep.derivative = {"|v_x| <= bound", std::numeric_limits<double>::infinity(), 0.0, true};
    auto update = [&](BoundCheck& bc, double slack, double x) {
        if (slack < bc.worst_slack) {
            bc.worst_slack = slack;
            bc.x_at_worst = x;
        }
        if (slack < -tol_at(x)) bc.holds = false;
    };
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        update(rep.upper, v_upper_bound(env, p, x) - chem.v[i], x);
        update(rep.lower, chem.v[i] - v_lower_bound(env, p, x), x);
        update(rep.derivative, v_x_bound(env, p, x) - std::abs(chem.v_x[i]), x);
    }
    return rep;
}

}  // namespace chemowave
