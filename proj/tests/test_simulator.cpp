#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chemowave/simulator.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace chemowave;

namespace {

SimState constant_state(const Grid& g, double a, double b) {
    SimState s;
    s.u1 = Field(g, std::vector<double>(g.size(), a), a, a);
    s.u2 = Field(g, std::vector<double>(g.size(), b), b, b);
    return s;
}

double sup_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("equilibria are invariant") {
    const Params p = testsupport::p0();
    const Kinetics k = Kinetics::two_species(p);
    const Grid g = Grid::with_spacing(-20.0, 20.0, 0.05);
    for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{1.0, 0.0}}) {
        SimState s = constant_state(g, a, b);
        for (int n = 0; n < 50; ++n) {
            const SimState next = step(s, k, 0.02);
            CHECK(sup_diff(next.u1, s.u1) < 1e-12);
            CHECK(sup_diff(next.u2, s.u2) < 1e-12);
            s = next;
        }
    }
}

TEST_CASE("stability conditions are enforced") {
    const Params p = testsupport::p0();
    const Grid g = Grid::with_spacing(-20.0, 20.0, 0.05);
    SimState s = constant_state(g, 1.0, 0.0);
    CHECK_THROWS_AS(step(s, Kinetics::two_species(p), 1.0), std::invalid_argument);
    const Grid coarse = Grid::with_spacing(-20.0, 20.0, 2.0);
    SimState c = constant_state(coarse, 1.0, 0.0);
    c.frame_speed = 5.0;
    CHECK_THROWS_AS(step(c, Kinetics::two_species(p), 0.01), std::invalid_argument);
    CHECK(max_stable_dt(s, Kinetics::two_species(p)) > 0.02);
}

TEST_CASE("blow-up bound raises SchemeError") {
    const Params p = testsupport::p0();
    Kinetics k = Kinetics::two_species(p);
    k.blowup_bound = 0.5;
    const Grid g = Grid::with_spacing(-20.0, 20.0, 0.05);
    SimState s = constant_state(g, 1.0, 0.0);
    CHECK_THROWS_AS(step(s, k, 0.02), SchemeError);
}

TEST_CASE("Fisher-KPP refinement: error O(dt + h^2)") {
    const Params p = testsupport::chi0();
    const Kinetics k = Kinetics::two_species(p);
    auto solve = [&](double h, double dt) {
        const Grid g = Grid::with_spacing(-20.0, 20.0, h);
        SimState s;
        s.u1 = Field::sample(g, [](double x) { return 0.5 * (1.0 - std::tanh(x)); }, 1.0, 0.0);
        s.u2 = Field(g, std::vector<double>(g.size(), 0.0), 0.0, 0.0);
        run(s, k, 2.0, dt);
        return s.u1;
    };
    const Field ref = solve(0.0125, 0.00125);
    std::vector<double> errs;
    for (double f : {1.0, 2.0}) {
        const Field u = solve(0.1 / f, 0.01 / f);
        double e = 0.0;
        for (double x = -19.0; x <= 19.0; x += 0.1) e = std::max(e, std::abs(u.at(x) - ref.at(x)));
        errs.push_back(e);
    }
    CHECK(errs[1] < errs[0]);
    CHECK(errs[0] / errs[1] > 1.6);  // first order in dt dominates
    CHECK(errs[1] < 5e-3);
}

TEST_CASE("front position") {
    const Grid g = Grid::with_spacing(-10.0, 10.0, 0.05);
    const Field step_fn = Field::sample(g, [](double x) { return x < 0.0 ? 1.0 : 0.0; }, 1.0, 0.0);
    CHECK(std::abs(front_position(step_fn)) <= g.h());
    const Field moved = Field::sample(g, [](double x) { return x < 2.0 ? 1.0 : 0.0; }, 1.0, 0.0);
    CHECK(front_position(moved) - front_position(step_fn) == doctest::Approx(2.0).epsilon(1e-12));
    std::vector<double> errs;
    for (double h : {0.1, 0.05}) {
        const Grid gh = Grid::with_spacing(-10.0, 10.0, h);
        const double x0 = 0.3731;
        const Field f = Field::sample(gh, [&](double x) { return 1.0 / (1.0 + std::exp(0.7 * (x - x0))); }, 1.0, 0.0);
        errs.push_back(std::abs(front_position(f) - x0));
    }
    CHECK(errs[1] < 1e-4);
    CHECK(errs[0] / errs[1] > 3.0);
}

TEST_CASE("speed regression") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> noise(0.0, 1e-3);
    std::vector<double> t, x, z;
    for (int k = 0; k < 100; ++k) {
        t.push_back(k);
        x.push_back(1.4 * k + noise(rng));
        z.push_back(3.0 + noise(rng));
    }
    CHECK(estimate_speed(t, x).speed == doctest::Approx(1.4).epsilon(1e-2));
    CHECK(std::abs(estimate_speed(t, z).speed) < 1e-2);
    CHECK(estimate_speed(t, x).r2 > 0.999);
    t.resize(10);
    x.resize(10);
    CHECK_THROWS(estimate_speed(t, x));
}

TEST_CASE("positivity along a P0 front run") {
    const Params p = testsupport::p0();
    const Grid g = Grid::with_spacing(-60.0, 60.0, 0.05);
    SimState s = front_like_state(g, 0.0);
    double lowest = 0.0;
    Observer obs{0.1, [&](const SimState& st) {
                     for (std::size_t i = 0; i < st.u1.size(); ++i) lowest = std::min({lowest, st.u1[i], st.u2[i]});
                 }};
    run(s, Kinetics::two_species(p), 20.0, 0.02, {obs});
    CHECK(lowest >= 0.0);
}

TEST_CASE("spreading on a short run") {
    SpreadOptions o;
    o.x_min = -120.0;
    o.x_max = 120.0;
    o.front0 = -100.0;
    o.T = 80.0;
    const SpreadReport r = spreading_experiment(testsupport::chi0(), o);
    CHECK(r.c0_star == doctest::Approx(std::sqrt(2.0)));
    CHECK(r.estimate.speed > 0.95 * r.c0_star);
    CHECK(r.estimate.speed < 1.03 * r.c0_star);
}

TEST_CASE("stability of e1 and e*") {
    const StabilityReport a = stability_experiment(testsupport::p0(), StabilityTarget::E1, 0.2, 300.0);
    CHECK(a.passed);
    CHECK(a.final_distance < 1e-3);
    const StabilityReport b = stability_experiment(testsupport::h3_suite(), StabilityTarget::ESTAR, 0.1, 300.0);
    CHECK(b.target.u1 == doctest::Approx(0.7142857).epsilon(1e-6));
    CHECK(b.passed);
    const StabilityReport z = stability_experiment(testsupport::p0(), StabilityTarget::E1, 0.0, 20.0);
    for (double d : z.distance) CHECK(d < 1e-12);
    CHECK_THROWS_AS(stability_experiment(testsupport::p0(), StabilityTarget::ESTAR, 0.1, 10.0), HypothesisError);
}

TEST_CASE("cosine bump sub-solution") {
    Params p = testsupport::chi0();
    const BumpReport r = bump_subsolution_check(p, 1.2, 1.3, 0.01, 100.0);
    const BumpSubsolution& b = r.bump;
    CHECK(b.beta == doctest::Approx(std::sqrt(4.0 * (1.0 - 0.5 - 0.01) - 1.69)).epsilon(1e-12));
    CHECK(b.l == doctest::Approx(std::acos(-1.0) / b.beta).epsilon(1e-12));
    for (double t : {0.0, 13.0, 77.0}) {
        CHECK(std::abs(b.value(t, b.support_left(t))) < 1e-13);
        CHECK(b.value(t, b.support_right(t)) == doctest::Approx(b.sigma));
        CHECK(b.value(t, b.support_left(t) - 0.1) == 0.0);
        CHECK(b.midpoint(t) == doctest::Approx(b.midpoint_closed_form()).epsilon(1e-13));
    }
    CHECK(b.midpoint_closed_form() ==
          doctest::Approx(b.sigma * std::exp(b.q * b.l / 4.0) * std::cos(std::acos(-1.0) / 4.0)));
    CHECK(r.comparison_holds);
    CHECK(r.midpoint_spread < 1e-12);
    CHECK_THROWS(bump_subsolution_check(p, 1.2, 1.0, 0.01, 10.0));  // q <= c + eps
}

TEST_CASE("single species modes") {
    SingleSpeciesParams sp;
    sp.chi = 0.0;
    const SingleSpeciesReport kpp = single_species_mode(sp, 100.0);
    CHECK(kpp.cone_infimum > 0.1);
    CHECK(std::isnan(kpp.distance_to_equilibrium));

    sp.chi = 1.0;
    sp.mu = 0.2;  // 2 chi mu < b
    SingleSpeciesOptions o;
    o.positive_start = true;
    const SingleSpeciesReport pos = single_species_mode(sp, 200.0, o);
    CHECK(pos.distance_to_equilibrium < 1e-3);

    const Grid g = Grid::with_spacing(-20.0, 20.0, 0.05);
    SimState s = constant_state(g, 1.0, 0.0);
    const SimState next = step(s, Kinetics::single_species(SingleSpeciesParams{}), 0.02);
    CHECK(sup_diff(next.u1, s.u1) < 1e-12);
}
