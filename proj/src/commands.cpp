#include "chemowave/commands.hpp"

#include "chemowave/io.hpp"
#include "chemowave/kernel.hpp"
#include "chemowave/params.hpp"
#include "chemowave/simulator.hpp"
#include "chemowave/supersub.hpp"
#include "chemowave/wavesolver.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace chemowave {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Loads the config, runs `body`, maps exceptions to exit codes and always
/// writes manifest.json.
template <typename Body>
int guarded(const CommonArgs& args, const std::string& command, std::ostream& err, Body&& body) {
    const auto start = std::chrono::steady_clock::now();
    json manifest{{"tool", "chemowave"}, {"version", kToolVersion}, {"command", command}};
    int code = kExitOk;
    try {
        fs::create_directories(args.output_dir);
    } catch (const std::exception& e) {
        err << "error: cannot create output directory: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        const Config cfg = load_config(args.config);
        manifest["config"] = to_json(cfg);
        manifest["derived"] = to_json(derive_bounds(cfg.params));
        manifest["hypotheses"] = to_json(check_hypotheses(cfg.params));
        json outcome = json::object();
        code = body(cfg, outcome);
        manifest["outcome"] = outcome;
        manifest["status"] = code == kExitOk ? "ok" : "assertion-failed";
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        manifest["status"] = "config-error";
        manifest["error"] = e.what();
        code = kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        manifest["status"] = "usage-error";
        manifest["error"] = e.what();
        code = kExitUsage;
    } catch (const HypothesisError& e) {
        err << "refused: " << e.what() << "\n";
        manifest["status"] = "refused";
        manifest["error"] = e.what();
        code = kExitUsage;
    } catch (const DomainError& e) {
        err << "refused: " << e.what() << "\n";
        manifest["status"] = "refused";
        manifest["error"] = e.what();
        code = kExitUsage;
    } catch (const ConvergenceError& e) {
        err << "no convergence: " << e.what() << "\n";
        manifest["status"] = "non-convergence";
        manifest["error"] = e.what();
        code = kExitNonConvergence;
    } catch (const SchemeError& e) {
        err << "scheme failure: " << e.what() << "\n";
        manifest["status"] = "non-convergence";
        manifest["error"] = e.what();
        code = kExitNonConvergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        manifest["status"] = "error";
        manifest["error"] = e.what();
        code = kExitAssertion;
    }
    manifest["exit_code"] = code;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest["timing"] = {{"seconds", secs}};
    write_json(args.output_dir / "manifest.json", manifest);
    return code;
}

std::string pass(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(8) << x;
    return os.str();
}

std::vector<double> schedule_for(double domain) {
    if (!(domain > 0.0)) throw UsageError("--domain must be positive");
    return {domain / 4.0, domain / 2.0, domain};
}

}  // namespace

// ---------------------------------------------------------------- check

int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(args, "check", err, [&](const Config& cfg, json& outcome) {
        const HypothesisReport h = check_hypotheses(cfg.params);
        const DerivedConstants d = derive_bounds(cfg.params);
        for (const InequalityRecord& r : h.records) {
            out << std::left << std::setw(8) << r.name << std::setw(46) << r.text << " lhs=" << std::setw(12)
                << num(r.lhs) << " rhs=" << std::setw(12) << num(r.rhs) << " slack=" << std::setw(12)
                << num(r.slack) << " " << pass(r.holds) << "\n";
        }
        if (h.classical_reduction) {
            const InequalityRecord& r = *h.classical_reduction;
            out << "H5 with chi1 = chi2 = 0 reduces to " << r.text << ": lhs=" << num(r.lhs)
                << " rhs=" << num(r.rhs) << " " << pass(r.holds) << "\n";
        }
        const char* names[] = {"H1", "H2", "H3", "H4", "H5"};
        for (const char* n : names) out << n << ": " << pass(h.holds(n)) << "\n";
        auto show = [&](const char* name, const std::optional<double>& v) {
            out << name << " = " << (v ? num(*v) : std::string("undefined")) << "\n";
        };
        show("M1", d.M1);
        show("M2", d.M2);
        show("c0*", d.c0_star);
        show("kappa_max", d.kappa_max);
        show("kappa1*", d.kappa1_star);
        show("kappa*", d.kappa_star);
        show("c*", d.c_star);
        for (const std::string& note : d.notes) out << "note: " << note << "\n";

        bool ok = true;
        json req = json::array();
        for (const std::string& name : args.require) {
            if (name != "H1" && name != "H2" && name != "H3" && name != "H4" && name != "H5") {
                throw UsageError("--require: unknown hypothesis '" + name + "' (expected H1..H5)");
            }
            req.push_back(name);
            ok = ok && h.holds(name);
        }
        outcome["required"] = req;
        outcome["required_hold"] = ok;
        return ok ? kExitOk : kExitAssertion;
    });
}

// ---------------------------------------------------------------- wave

int cmd_wave(const WaveArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(args, "wave", err, [&](const Config& cfg, json& outcome) {
        const Params& p = cfg.params;
        const HypothesisReport hyp = check_hypotheses(p);
        if (!hyp.H4) throw HypothesisError("traveling waves need H4, which fails for this config");
        WaveOptions opts;
        opts.y_schedule = schedule_for(args.domain);
        opts.h = args.h;
        opts.tol = args.tol;
        opts.max_iter = args.max_iter;

        if (args.continuation) {
            if (args.speed || args.kappa) throw UsageError("--min-speed-continuation excludes --speed/--kappa");
            const std::vector<double> speeds = default_continuation_speeds(p);
            const ContinuationResult res = min_speed_continuation(p, speeds, opts);
            json steps = json::array();
            std::vector<Series> curves;
            for (std::size_t k = 0; k < res.steps.size(); ++k) {
                const ContinuationStep& s = res.steps[k];
                json j = wave_summary(s.profile);
                j["shift"] = s.shift;
                j["diff_to_previous"] = std::isnan(s.diff_to_previous) ? json(nullptr) : json(s.diff_to_previous);
                steps.push_back(j);
                write_profile_csv(args.output_dir / ("profile_" + std::to_string(k) + ".csv"), s.profile);
                Series ser{"c = " + num(s.c), {}, {}};
                const Grid& g = s.profile.grid();
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const double x = g.x(i) - s.shift;
                    if (std::abs(x) > 40.0) continue;
                    ser.x.push_back(x);
                    ser.y.push_back(s.profile.U1[i]);
                }
                curves.push_back(std::move(ser));
                out << "c = " << num(s.c) << "  kappa = " << num(s.kappa) << "  residual = " << num(s.profile.residual)
                    << "  diff = " << (std::isnan(s.diff_to_previous) ? std::string("-") : num(s.diff_to_previous))
                    << "\n";
            }
            outcome["continuation"] = {{"speeds", speeds},
                                       {"steps", steps},
                                       {"window", res.window},
                                       {"diffs_decreasing", res.diffs_decreasing()},
                                       {"failed_index", res.failed_index ? json(*res.failed_index) : json(nullptr)},
                                       {"failure", res.failure}};
            if (args.plots) {
                write_svg(args.output_dir / "continuation.svg", "Normalized U1 as c decreases to c0*", "x", "U1",
                          curves);
            }
            if (res.failed_index) {
                throw ConvergenceError("continuation failed at speed index " + std::to_string(*res.failed_index) +
                                           ": " + res.failure,
                                       {});
            }
            const bool ok = res.diffs_decreasing() && res.steps.back().diff_to_previous < 5e-2;
            out << "continuation: " << pass(ok) << "\n";
            return ok ? kExitOk : kExitAssertion;
        }

        if (args.speed.has_value() == args.kappa.has_value()) {
            throw UsageError("give exactly one of --speed, --kappa, --min-speed-continuation");
        }
        WaveProfile w = args.speed ? solve_wave(p, *args.speed, opts) : solve_wave_kappa(p, *args.kappa, opts);
        write_profile_csv(args.output_dir / "profile.csv", w);
        json summary = wave_summary(w);
        write_json(args.output_dir / "tails.json",
                   {{"tails", summary["tails"]}, {"left_limit", summary["left_limit"]}});
        if (args.plots) {
            const std::vector<double> xs = w.grid().points();
            write_svg(args.output_dir / "profile.svg", "Traveling wave, c = " + num(w.c), "x", "value",
                      {{"U1", xs, w.U1.values}, {"U2", xs, w.U2.values}, {"V", xs, w.V.values}});
        }
        outcome["wave"] = summary;
        out << "c = " << num(w.c) << "  kappa = " << num(w.kappa) << "\n"
            << "residual = " << num(w.residual) << "\n"
            << "left limit: " << to_string(w.left) << "\n";
        if (w.tails) {
            out << "fitted U1 decay rate = " << num(w.tails->rate) << " (kappa = " << num(w.kappa) << ")\n"
                << "fitted U2 prefactor = " << num(w.tails->u2_prefactor)
                << " (closed form " << num(w.tails->u2_prefactor_closed_form) << ")\n";
        } else {
            out << "tail window empty; enlarge --domain\n";
        }
        return kExitOk;
    });
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(args, "simulate", err, [&](const Config& cfg, json& outcome) {
        const Params& p = cfg.params;
        const std::string& ex = args.experiment;
        outcome["experiment"] = ex;
        if (std::find(kExperiments.begin(), kExperiments.end(), ex) == kExperiments.end()) {
            std::string names;
            for (const auto& n : kExperiments) names += (names.empty() ? "" : ", ") + n;
            throw UsageError("unknown experiment '" + ex + "'; valid: " + names);
        }

        if (ex == "spread") {
            SpreadOptions o;
            o.h = args.h;
            o.dt = args.dt;
            if (args.T) o.T = *args.T;
            const SpreadReport r = spreading_experiment(p, o);
            const bool ok = r.estimate.speed >= 0.97 * r.c0_star;
            outcome["speed"] = r.estimate.speed;
            outcome["r2"] = r.estimate.r2;
            outcome["std_error"] = r.estimate.std_error;
            outcome["c0_star"] = r.c0_star;
            outcome["final_front"] = r.final_front;
            outcome["pass"] = ok;
            write_csv(args.output_dir / "front.csv", {"t", "x"}, {r.estimate.times, r.estimate.positions});
            if (args.plots) {
                write_svg(args.output_dir / "front.svg", "Front position (u1 = 1/2)", "t", "x",
                          {{"front", r.estimate.times, r.estimate.positions}});
            }
            out << "speed = " << num(r.estimate.speed) << " (c0* = " << num(r.c0_star) << ", R^2 = " << num(r.estimate.r2)
                << ") " << pass(ok) << "\n";
            return ok ? kExitOk : kExitAssertion;
        }

        if (ex == "stability-e1" || ex == "stability-estar") {
            const bool e1 = ex == "stability-e1";
            StabilityOptions o;
            o.h = args.h;
            o.dt = args.dt;
            o.seed = cfg.seed;
            const double amp = args.amplitude.value_or(e1 ? 0.2 : 0.1);
            const StabilityReport r = stability_experiment(p, e1 ? StabilityTarget::E1 : StabilityTarget::ESTAR, amp,
                                                           args.T.value_or(300.0), o);
            outcome["target"] = {r.target.u1, r.target.u2};
            outcome["amplitude"] = amp;
            outcome["final_distance"] = r.final_distance;
            outcome["eventually_decreasing"] = r.eventually_decreasing;
            outcome["pass"] = r.passed;
            write_csv(args.output_dir / "distance.csv", {"t", "distance"}, {r.times, r.distance});
            if (args.plots) {
                write_svg(args.output_dir / "distance.svg", "Sup-distance to the equilibrium", "t", "distance",
                          {{"distance", r.times, r.distance}}, true);
            }
            out << "final sup-distance = " << num(r.final_distance) << " " << pass(r.passed) << "\n";
            return r.passed ? kExitOk : kExitAssertion;
        }

        if (ex == "bump-check") {
            BumpOptions o;
            o.h = args.h;
            o.dt = args.dt;
            const BumpReport r = bump_subsolution_check(p, args.c, args.q, args.eps, args.T.value_or(100.0), o);
            const bool ok = r.comparison_holds && r.midpoint_spread < 1e-12;
            outcome["bump"] = {{"q", r.bump.q},         {"eps", r.bump.eps}, {"sigma", r.bump.sigma},
                               {"beta", r.bump.beta},   {"l", r.bump.l},     {"x1", r.bump.x1},
                               {"midpoint", r.bump.midpoint_closed_form()}};
            outcome["c"] = r.c;
            outcome["worst_slack"] = r.worst_slack;
            outcome["midpoint_spread"] = r.midpoint_spread;
            outcome["pass"] = ok;
            write_csv(args.output_dir / "bump.csv", {"t", "min_slack", "midpoint"}, {r.times, r.min_slack, r.midpoints});
            if (args.plots) {
                write_svg(args.output_dir / "bump.svg", "min over the support of u1 - bump", "t", "slack",
                          {{"slack", r.times, r.min_slack}});
            }
            out << "worst slack = " << num(r.worst_slack) << ", midpoint spread = " << num(r.midpoint_spread) << " "
                << pass(ok) << "\n";
            return ok ? kExitOk : kExitAssertion;
        }

        if (ex == "single-species") {
            if (!cfg.single) throw UsageError("single-species needs single_a, single_b, single_d in the config");
            SingleSpeciesOptions o;
            o.h = args.h;
            o.dt = args.dt;
            o.seed = cfg.seed;
            o.positive_start = args.positive_start;
            const double T = args.T.value_or(args.positive_start ? 200.0 : 100.0);
            const SingleSpeciesReport r = single_species_mode(*cfg.single, T, o);
            const bool dist_ok = std::isnan(r.distance_to_equilibrium) || r.distance_to_equilibrium < 1e-3;
            const bool ok = r.cone_infimum > 0.0 && dist_ok;
            outcome["cone_speed"] = r.cone_speed;
            outcome["cone_infimum"] = r.cone_infimum;
            outcome["distance_to_equilibrium"] =
                std::isnan(r.distance_to_equilibrium) ? json(nullptr) : json(r.distance_to_equilibrium);
            outcome["pass"] = ok;
            out << "cone infimum = " << num(r.cone_infimum) << " " << pass(ok) << "\n";
            return ok ? kExitOk : kExitAssertion;
        }

        // wave-drift
        WaveProfile w;
        if (args.profile) {
            w = read_profile(*args.profile);
        } else if (args.kappa) {
            WaveOptions wo;
            wo.y_schedule = {50.0, 100.0};
            w = solve_wave_kappa(p, *args.kappa, wo);
        } else {
            throw UsageError("wave-drift needs --profile <dir from `wave`> or --kappa");
        }
        const DriftReport r = wave_drift(w, p, args.T.value_or(50.0), args.dt);
        const bool ok = r.max_drift < 5e-3;
        outcome["c"] = w.c;
        outcome["max_drift"] = r.max_drift;
        outcome["pass"] = ok;
        write_csv(args.output_dir / "drift.csv", {"t", "drift"}, {r.times, r.drift});
        if (args.plots) {
            write_svg(args.output_dir / "drift.svg", "Sup-norm drift of the injected wave", "t", "drift",
                      {{"drift", r.times, r.drift}});
        }
        out << "max drift = " << num(r.max_drift) << " " << pass(ok) << "\n";
        return ok ? kExitOk : kExitAssertion;
    });
}

// ---------------------------------------------------------------- verify

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(args, "verify", err, [&](const Config& cfg, json& outcome) {
        const Params& p = cfg.params;
        if (!check_hypotheses(p).H4) throw HypothesisError("verify needs H4, which fails for this config");
        const double ks = *kappa_star(p);
        const double kappa = args.kappa.value_or(std::min(0.3, 0.5 * ks));
        const Envelopes env = build_envelopes(p, kappa);
        const Grid g = lemma_grid(env, args.h);
        outcome["envelopes"] = to_json(env);
        outcome["grid"] = {{"x_min", g.x_min()}, {"x_max", g.x_max()}, {"h", g.h()}};

        std::ofstream kcsv(args.output_dir / "kernel_bounds.csv");
        kcsv << "sample,bound,worst_slack,x,holds\n";
        bool kernel_ok = true;
        double worst[3] = {INFINITY, INFINITY, INFINITY};
        auto kernel_check = [&](std::size_t id, const FieldPair& u) {
            const LemmaBoundsReport r = check_lemma_bounds(u.u1, u.u2, env, p);
            const BoundCheck* b[3] = {&r.upper, &r.lower, &r.derivative};
            for (int k = 0; k < 3; ++k) {
                kcsv << id << "," << b[k]->name << "," << format_double(b[k]->worst_slack) << ","
                     << format_double(b[k]->x_at_worst) << "," << (b[k]->holds ? 1 : 0) << "\n";
                worst[k] = std::min(worst[k], b[k]->worst_slack);
            }
            kernel_ok = kernel_ok && r.all_hold();
        };
        const FieldPair up = upper_pair(env, g), lo = lower_pair(env, g);
        kernel_check(0, up);
        kernel_check(1, lo);
        kernel_check(2, FieldPair{up.u1, lo.u2});
        kernel_check(3, FieldPair{lo.u1, up.u2});
        std::mt19937_64 rng(cfg.seed);
        for (std::size_t s = 0; s < args.samples; ++s) kernel_check(4 + s, sample_in_E(env, g, rng));

        const Lemma3Report l3 = verify_lemma3(env, p, args.samples, g, cfg.seed);
        std::ofstream lcsv(args.output_dir / "lemma3.csv");
        lcsv << "sample,component,check,worst_slack,x,holds\n";
        for (const SignCheck& s : l3.checks) {
            lcsv << s.sample << "," << s.component << "," << s.name << "," << format_double(s.worst_slack) << ","
                 << format_double(s.x_at_worst) << "," << (s.holds ? 1 : 0) << "\n";
        }
        json summary = json::array();
        for (const SignCheck& s : l3.summary()) {
            summary.push_back(to_json(s));
            out << "operator " << s.name << " (component " << s.component << "): worst slack "
                << num(s.worst_slack) << " at x = " << num(s.x_at_worst) << " " << pass(s.holds) << "\n";
        }
        const char* names[3] = {"v upper bound", "v lower bound", "|v_x| bound"};
        for (int k = 0; k < 3; ++k) out << names[k] << ": worst slack " << num(worst[k]) << "\n";
        out << "kernel bounds: " << pass(kernel_ok) << "\n";
        const bool ok = kernel_ok && l3.all_hold();
        outcome["samples"] = args.samples;
        outcome["kernel_bounds_hold"] = kernel_ok;
        outcome["kernel_worst_slack"] = {worst[0], worst[1], worst[2]};
        outcome["lemma3"] = summary;
        outcome["lemma3_tolerance"] = l3.tolerance;
        outcome["pass"] = ok;
        out << "verify: " << pass(ok) << "\n";
        return ok ? kExitOk : kExitAssertion;
    });
}

}  // namespace chemowave
