#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chemowave/kernel.hpp"
#include "chemowave/supersub.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace chemowave;

namespace {

Params unit_mu(double lambda) {
    Params p;
    p.lambda = lambda;
    p.mu1 = 1.0;
    p.mu2 = 1.0;
    return p;
}

}  // namespace

TEST_CASE("constant inputs are reproduced exactly") {
    const Params p = testsupport::p0();
    const Grid g(-30.0, 30.0, 601);
    const Field u1(g, std::vector<double>(g.size(), 0.7));
    const Field u2(g, std::vector<double>(g.size(), 0.4));
    const ChemicalField c = solve_chemical(u1, u2, p);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(std::abs(c.v[i] - (0.1 * 0.7 + 0.1 * 0.4) / 2.0) < 1e-10);
        CHECK(std::abs(c.v_x[i]) < 1e-10);
    }
    CHECK(residual_elliptic(c.v, u1, u2, p) < 1e-10);

    const Field zero(g, std::vector<double>(g.size(), 0.0));
    const Field one(g, std::vector<double>(g.size(), 1.0));
    const Field v = solve_v(zero, one, p);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(v[i] - p.mu2 / p.lambda) < 1e-10);
}

TEST_CASE("sweeps equal dense quadrature") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = 400;
    const double h = 0.05, x0 = -10.0, k = std::sqrt(2.0);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = x0 + h * i;
        s[i] = std::exp(-x * x) + 0.3 * u(rng);
    }
    const ExponentialMoments fast = exponential_moments(s, h, k, 0.4, 0.2);
    const ExponentialMoments slow = testsupport::dense_moments(s, x0, h, k, 0.4, 0.2);
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        worst = std::max(worst, std::abs(fast.left[j] - slow.left[j]));
        worst = std::max(worst, std::abs(fast.right[j] - slow.right[j]));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("narrow bump against direct quadrature of the continuous kernel") {
    const Params p = unit_mu(1.0);
    auto bump = [](double x) { return std::exp(-x * x / 0.02); };
    double prev = 0.0;
    for (double h : {0.02, 0.01}) {
        const Grid g = Grid::with_spacing(-20.0, 20.0, h);
        const Field u1 = Field::sample(g, bump, 0.0, 0.0);
        const Field u2 = Field::sample(g, [](double) { return 0.0; }, 0.0, 0.0);
        const Field v = solve_v(u1, u2, p);
        double err = 0.0;
        for (double x : {-1.0, -0.05, 0.0, 0.3, 2.0}) {
            const double ref = testsupport::simpson(
                [&](double y) { return 0.5 * std::exp(-std::abs(x - y)) * bump(y); }, -3.0, 3.0, 60000);
            err = std::max(err, std::abs(v.at(x) - ref));
        }
        if (prev > 0.0) CHECK(std::log2(prev / err) > 1.8);
        prev = err;
    }
    CHECK(prev < 1e-4);
}

TEST_CASE("manufactured solution: v = cos(pi x)") {
    const double lambda = 2.0, pi = std::acos(-1.0);
    const Params p = unit_mu(lambda);
    std::vector<double> res, err;
    for (double h : {0.1, 0.05, 0.025}) {
        const Grid g = Grid::with_spacing(-40.0, 40.0, h);
        const Field u1 = Field::sample(g, [&](double x) { return (lambda + pi * pi) * std::cos(pi * x); }, 0.0, 0.0);
        const Field u2 = Field::sample(g, [](double) { return 0.0; }, 0.0, 0.0);
        const ChemicalField c = solve_chemical(u1, u2, p);
        res.push_back(residual_elliptic(c.v, u1, u2, p));
        double e = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (std::abs(g.x(i)) < 10.0) e = std::max(e, std::abs(c.v[i] - std::cos(pi * g.x(i))));
        }
        err.push_back(e);
    }
    for (std::size_t k = 1; k < res.size(); ++k) {
        CHECK(std::log2(res[k - 1] / res[k]) >= 1.9);
        CHECK(std::log2(err[k - 1] / err[k]) >= 1.9);
    }
    CHECK(err.back() < 1e-2);
}

TEST_CASE("v_x matches centered differences of v") {
    const Params p = testsupport::p0();
    std::vector<double> errs;
    for (double h : {0.1, 0.05}) {
        const Grid g = Grid::with_spacing(-30.0, 30.0, h);
        const Field u1 = Field::sample(g, [](double x) { return 1.0 / (1.0 + std::exp(x)); }, 1.0, 0.0);
        const Field u2 = Field::sample(g, [](double x) { return 1.0 / (1.0 + std::exp(-x)); }, 0.0, 1.0);
        const ChemicalField c = solve_chemical(u1, u2, p);
        double e = 0.0;
        for (std::size_t i = 1; i + 1 < g.size(); ++i) {
            e = std::max(e, std::abs((c.v[i + 1] - c.v[i - 1]) / (2.0 * h) - c.v_x[i]));
        }
        errs.push_back(e);
    }
    CHECK(errs[1] < 1e-4);
    CHECK(std::log2(errs[0] / errs[1]) > 1.8);
}

TEST_CASE("kernel bounds hold on envelope extremes and random members") {
    for (const Params& p : {testsupport::p0(), testsupport::chi0(), testsupport::h3_suite()}) {
        const Envelopes env = build_envelopes(p, 0.3);
        const Grid g = lemma_grid(env, 0.05);
        const FieldPair up = upper_pair(env, g), lo = lower_pair(env, g);
        CHECK(check_lemma_bounds(up.u1, up.u2, env, p).all_hold());
        CHECK(check_lemma_bounds(lo.u1, lo.u2, env, p).all_hold());
        std::mt19937_64 rng(42);
        for (int s = 0; s < 200; ++s) {
            const FieldPair u = sample_in_E(env, g, rng);
            const LemmaBoundsReport r = check_lemma_bounds(u.u1, u.u2, env, p);
            CHECK(r.all_hold());
        }
    }
}

TEST_CASE("check_lemma_bounds rejects inputs outside E") {
    const Params p = testsupport::p0();
    const Envelopes env = build_envelopes(p, 0.3);
    const Grid g = lemma_grid(env, 0.1);
    FieldPair up = upper_pair(env, g);
    up.u1[g.size() / 2] += 0.5;
    CHECK_THROWS_AS(check_lemma_bounds(up.u1, up.u2, env, p), std::invalid_argument);
}

TEST_CASE("derivative bound formula at a sample point") {
    const Params p = testsupport::p0();
    const Envelopes env = build_envelopes(p, 0.3);
    const double B = b_lambda_kappa(p.lambda, 0.3);
    const double x = 5.0;
    const double expect =
        p.mu1 * std::min(env.M1 * env.D2 * B * std::exp(-0.3 * x) / 2.0, env.M1 / std::sqrt(p.lambda)) +
        p.mu2 * std::min(env.D2_tilde * env.M2 * B * std::exp(-0.3 * x) / 2.0, env.M2 / std::sqrt(p.lambda));
    CHECK(v_x_bound(env, p, x) == doctest::Approx(expect).epsilon(1e-13));
}
