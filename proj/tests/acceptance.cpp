/// Acceptance checks, one PASS/FAIL line per criterion.

#include "chemowave/commands.hpp"
#include "chemowave/io.hpp"
#include "chemowave/kernel.hpp"
#include "chemowave/simulator.hpp"
#include "chemowave/supersub.hpp"
#include "chemowave/wavesolver.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace chemowave;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

/// Collects sub-check failures and a short summary.
struct Checker {
    bool ok = true;
    std::ostringstream notes;
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes << " [failed: " << what << "]";
        }
    }
    template <typename T>
    void note(const std::string& k, T v) {
        notes << " " << k << "=" << v;
    }
    Outcome done() { return {ok, notes.str()}; }
};

int run_criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string(" exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_s;
    const bool pass = o.ok && in_time;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " (" << std::fixed
              << std::setprecision(1) << secs << " s of " << budget_s << " s)" << std::defaultfloat
              << std::setprecision(6) << o.detail << (in_time ? "" : " [over time budget]") << std::endl;
    return pass ? 0 : 1;
}

// 1 ---------------------------------------------------------------------------
Outcome hypothesis_engine() {
    Checker c;
    std::mt19937_64 rng(2024);
    int h5 = 0, mismatches = 0, implication_failures = 0;
    for (int k = 0; k < 1000; ++k) {
        const Params p = testsupport::random_params(rng);
        const HypothesisReport h = check_hypotheses(p);
        if (h.H5) {
            ++h5;
            if (!h.H4) ++implication_failures;
        }
        Params q = testsupport::random_params(rng, false);
        q.lambda = std::max(q.lambda, 1.0 - q.a + 0.1);
        const bool direct = q.r * std::max(0.0, q.a * q.b - 1.0) <=
                            (1.0 - q.a) * (1.0 - std::max(0.0, q.d - 1.0));
        if (check_hypotheses(q).H5 != direct) ++mismatches;
    }
    c.expect(implication_failures == 0, "H5 => H4");
    c.expect(mismatches == 0, "chi = 0 reduction");
    c.expect(h5 > 0, "some H5 draws");
    c.note("H5_draws", h5);
    c.note("reduction_mismatches", mismatches);
    return c.done();
}

// 2 ---------------------------------------------------------------------------
Outcome closed_forms() {
    Checker c;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_b = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double lambda = 0.2 + 4.0 * u(rng);
        const double kappa = 0.95 * std::sqrt(lambda) * u(rng);
        const double sl = std::sqrt(lambda);
        const double q = testsupport::simpson([&](double z) { return std::exp((sl - kappa) * z); },
                                              -40.0 / (sl - kappa), 0.0, 4000) +
                         testsupport::simpson([&](double z) { return std::exp(-(sl + kappa) * z); }, 0.0,
                                              40.0 / (sl + kappa), 4000);
        worst_b = std::max(worst_b, std::abs(q - b_lambda_kappa(lambda, kappa)));
    }
    c.expect(worst_b < 1e-8, "B vs quadrature");

    double worst_f = 0.0, worst_k1 = 0.0;
    int used = 0;
    while (used < 100) {
        const Params p = testsupport::random_params(rng);
        if (!check_hypotheses(p).H1) continue;
        ++used;
        const double k1 = kappa1_star(p);
        const double kappa = (0.01 + 0.98 * u(rng)) * k1;
        const double M1 = amplitude_bound1(p), M2 = amplitude_bound2(p);
        const double B = b_lambda_kappa(p.lambda, kappa);
        const double f = solve_f(p, kappa);
        const double rhs = kappa * B / 2.0 * (p.mu2 * M2 + p.mu1 * M1 * (p.a + p.chi1 * f)) +
                           p.mu2 * kappa * kappa * B / (2.0 * std::sqrt(p.lambda));
        worst_f = std::max(worst_f, std::abs(f - rhs));
        if (p.chi1 > 0.0) {
            const double target = 2.0 / (p.chi1 * p.mu1 * M1);
            double lo = 0.0, hi = std::sqrt(p.lambda) * (1.0 - 1e-15);
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (mid * b_lambda_kappa(p.lambda, mid) < target ? lo : hi) = mid;
            }
            worst_k1 = std::max(worst_k1, std::abs(std::min(lo, kappa_max(p)) - k1));
        }
    }
    c.expect(worst_f < 1e-12, "solve_f residual");
    c.expect(worst_k1 < 1e-10, "kappa1* vs bisection");
    c.note("B_err", worst_b);
    c.note("f_residual", worst_f);
    c.note("kappa1_err", worst_k1);
    return c.done();
}

// 3 ---------------------------------------------------------------------------
Outcome kernel() {
    Checker c;
    const Params p = testsupport::p0();
    const Grid g(-30.0, 30.0, 601);
    const Field u1(g, std::vector<double>(g.size(), 0.7)), u2(g, std::vector<double>(g.size(), 0.4));
    const ChemicalField cf = solve_chemical(u1, u2, p);
    double worst_const = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        worst_const = std::max({worst_const, std::abs(cf.v[i] - 0.055), std::abs(cf.v_x[i])});
    }
    c.expect(worst_const < 1e-10, "constant exactness");

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> s(500);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::exp(-std::pow(-12.0 + 0.05 * i, 2)) + 0.2 * u(rng);
    const ExponentialMoments fast = exponential_moments(s, 0.05, std::sqrt(2.0), 0.3, 0.1);
    const ExponentialMoments slow = testsupport::dense_moments(s, -12.0, 0.05, std::sqrt(2.0), 0.3, 0.1);
    double worst_dense = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        worst_dense = std::max({worst_dense, std::abs(fast.left[j] - slow.left[j]),
                                std::abs(fast.right[j] - slow.right[j])});
    }
    c.expect(worst_dense < 1e-12, "sweeps vs dense");

    Params q;
    q.lambda = 2.0;
    q.mu1 = 1.0;
    const double pi = std::acos(-1.0);
    std::vector<double> res;
    for (double h : {0.1, 0.05, 0.025}) {
        const Grid gh = Grid::with_spacing(-40.0, 40.0, h);
        const Field a = Field::sample(gh, [&](double x) { return (2.0 + pi * pi) * std::cos(pi * x); }, 0.0, 0.0);
        const Field z = Field::sample(gh, [](double) { return 0.0; }, 0.0, 0.0);
        res.push_back(residual_elliptic(solve_v(a, z, q), a, z, q));
    }
    const double order = std::min(std::log2(res[0] / res[1]), std::log2(res[1] / res[2]));
    c.expect(order >= 1.9, "observed order >= 1.9");
    c.note("const_err", worst_const);
    c.note("dense_err", worst_dense);
    c.note("order", order);
    return c.done();
}

// 4 ---------------------------------------------------------------------------
Outcome lemma_suite() {
    Checker c;
    const std::pair<const char*, Params> suites[] = {
        {"P0", testsupport::p0()}, {"H3", testsupport::h3_suite()}, {"chi0", testsupport::chi0()}};
    for (const auto& [name, p] : suites) {
        const Envelopes env = build_envelopes(p, 0.3);
        const Grid g = lemma_grid(env, 0.05);
        bool kernel_ok = true;
        const FieldPair up = upper_pair(env, g), lo = lower_pair(env, g);
        for (const FieldPair& u : {up, lo, FieldPair{up.u1, lo.u2}, FieldPair{lo.u1, up.u2}}) {
            kernel_ok = kernel_ok && check_lemma_bounds(u.u1, u.u2, env, p).all_hold();
        }
        std::mt19937_64 rng(42);
        for (int s = 0; s < 200; ++s) {
            const FieldPair u = sample_in_E(env, g, rng);
            kernel_ok = kernel_ok && check_lemma_bounds(u.u1, u.u2, env, p).all_hold();
        }
        const Lemma3Report l3 = verify_lemma3(env, p, 200, g, 42);
        c.expect(kernel_ok, std::string(name) + " kernel bounds");
        c.expect(l3.all_hold(), std::string(name) + " sign conditions");
        double worst = INFINITY;
        for (const SignCheck& s : l3.summary()) worst = std::min(worst, s.worst_slack);
        c.note(std::string(name) + "_worst_sign_slack", worst);
    }
    return c.done();
}

// 5 ---------------------------------------------------------------------------
Outcome wave_existence() {
    Checker c;
    struct Case {
        const char* name;
        Params p;
        double kappa;
        LeftLimit left;
    };
    const Case cases[] = {{"chi0", testsupport::chi0(), 0.3, LeftLimit::E1},
                          {"chi0", testsupport::chi0(), 0.4, LeftLimit::E1},
                          {"chi0", testsupport::chi0(), 0.5, LeftLimit::E1},
                          {"P0", testsupport::p0(), 0.3, LeftLimit::E1},
                          {"H3", testsupport::h3_suite(), 0.3, LeftLimit::ESTAR}};
    for (const Case& k : cases) {
        const WaveProfile w = solve_wave_kappa(k.p, k.kappa);
        const std::string tag = std::string(k.name) + "/" + std::to_string(k.kappa).substr(0, 3);
        c.expect(w.residual < 1e-8, tag + " residual");
        c.expect(membership({w.U1, w.U2}, w.env, 1e-12).in_E, tag + " in E");
        c.expect(w.tails.has_value(), tag + " tail window");
        if (w.tails) {
            c.expect(std::abs(w.tails->rate / k.kappa - 1.0) < 0.02, tag + " decay rate");
            const double rel = std::abs(w.tails->u2_prefactor / w.tails->u2_prefactor_closed_form - 1.0);
            c.expect(rel < 0.05, tag + " U2 prefactor");
            c.note(tag + "_rate", w.tails->rate);
            c.note(tag + "_pref_rel", rel);
        }
        c.expect(w.left == k.left, tag + " left limit " + to_string(w.left));
    }
    return c.done();
}

// 6 ---------------------------------------------------------------------------
Outcome speed_lower_bound() {
    Checker c;
    for (double chi : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        Params p = testsupport::p0();
        p.chi1 = p.chi2 = chi;
        const SpreadReport r = spreading_experiment(p);  // T = 200 on [-250, 250]
        c.expect(r.estimate.speed >= 0.97 * r.c0_star, "chi=" + std::to_string(chi));
        if (chi == 0.0) c.expect(std::abs(r.estimate.speed / r.c0_star - 1.0) < 0.03, "classical speed");
        c.note("speed(chi=" + std::to_string(chi).substr(0, 3) + ")", r.estimate.speed);
    }
    c.note("c0*", minimal_linear_speed(testsupport::p0()));
    return c.done();
}

// 7 ---------------------------------------------------------------------------
Outcome continuation() {
    Checker c;
    const Params p = testsupport::p0();
    const HypothesisReport h = check_hypotheses(p);
    c.expect(h.H5 && h.H2 && p.r > 2.0 * p.chi2 * p.mu2, "configuration premises");
    const ContinuationResult r = min_speed_continuation(p, default_continuation_speeds(p));
    c.expect(!r.failed_index.has_value(), "all speeds solve");
    c.expect(r.diffs_decreasing(), "diffs decreasing");
    if (!r.steps.empty()) {
        c.expect(r.steps.back().diff_to_previous < 5e-2, "last diff < 5e-2");
        c.note("smallest_c", r.steps.back().c);
        c.note("last_diff", r.steps.back().diff_to_previous);
    }
    return c.done();
}

// 8 ---------------------------------------------------------------------------
Outcome stability() {
    Checker c;
    const StabilityReport a = stability_experiment(testsupport::p0(), StabilityTarget::E1, 0.2, 300.0);
    const StabilityReport b = stability_experiment(testsupport::h3_suite(), StabilityTarget::ESTAR, 0.1, 300.0);
    c.expect(a.final_distance < 1e-3, "e1");
    c.expect(b.final_distance < 1e-3, "e*");
    c.note("e1_final", a.final_distance);
    c.note("estar_final", b.final_distance);
    return c.done();
}

// 9 ---------------------------------------------------------------------------
Outcome bump() {
    Checker c;
    const BumpReport r = bump_subsolution_check(testsupport::p0(), 1.2, 1.3, 0.01, 100.0);
    c.expect(r.comparison_holds, "sub-solution below u1");
    c.expect(r.midpoint_spread < 1e-12, "midpoint constant");
    c.note("worst_slack", r.worst_slack);
    c.note("midpoint_spread", r.midpoint_spread);
    return c.done();
}

// 10 --------------------------------------------------------------------------
Outcome cross_module() {
    Checker c;
    const fs::path dir = fs::temp_directory_path() / "chemowave_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "p0.cfg";
    Config conf;
    conf.params = testsupport::p0();
    std::ofstream(cfg) << format_config(conf);
    std::ostringstream out, err;
    WaveArgs w;
    w.config = cfg;
    w.output_dir = dir / "wave";
    w.speed = 1.6;
    w.plots = false;
    c.expect(cmd_wave(w, out, err) == kExitOk, "cmd_wave");
    SimulateArgs s;
    s.config = cfg;
    s.output_dir = dir / "drift";
    s.experiment = "wave-drift";
    s.profile = dir / "wave";
    s.T = 50.0;
    s.plots = false;
    const int rc = cmd_simulate(s, out, err);
    c.expect(rc == kExitOk, "drift < 5e-3");
    std::ifstream in(dir / "drift" / "manifest.json");
    const nlohmann::json m = nlohmann::json::parse(in);
    c.note("max_drift", m["outcome"]["max_drift"].get<double>());
    return c.done();
}

}  // namespace

int main() {
    int failures = 0;
    failures += run_criterion(1, "hypothesis engine", 1.0, hypothesis_engine);
    failures += run_criterion(2, "closed forms", 5.0, closed_forms);
    failures += run_criterion(3, "kernel", 10.0, kernel);
    failures += run_criterion(4, "lemma suite", 120.0, lemma_suite);
    failures += run_criterion(5, "wave existence", 300.0, wave_existence);
    failures += run_criterion(6, "speed lower bound", 600.0, speed_lower_bound);
    failures += run_criterion(7, "minimal-speed continuation", 600.0, continuation);
    failures += run_criterion(8, "stability", 300.0, stability);
    failures += run_criterion(9, "cosine-bump comparison", 120.0, bump);
    failures += run_criterion(10, "cross-module consistency", 120.0, cross_module);
    std::cout << (failures == 0 ? "ALL PASS" : "SOME FAIL") << " (" << 10 - failures << "/10)" << std::endl;
    return failures == 0 ? 0 : 1;
}
