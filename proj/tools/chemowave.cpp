#include "chemowave/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace chemowave;

namespace {

void add_common(CLI::App* sub, CommonArgs& c) {
    sub->add_option("config", c.config, "key=value config file")->required();
    sub->add_option("--output-dir", c.output_dir, "directory for manifest, CSV and SVG output");
    sub->add_flag("!--no-plots", c.plots, "skip SVG output");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Traveling waves and spreading for a two-species chemotaxis competition system"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    int jobs = 1;
    app.add_option("--jobs", jobs, "worker bound for sweeps (runs are sequential)")->check(CLI::PositiveNumber);

    CheckArgs check;
    auto* c = app.add_subcommand("check", "evaluate hypotheses and derived constants");
    add_common(c, check);
    c->add_option("--require", check.require, "hypotheses that must hold, e.g. H1,H2")->delimiter(',');

    WaveArgs wave;
    auto* w = app.add_subcommand("wave", "solve for a traveling wave profile");
    add_common(w, wave);
    w->add_option("--speed", wave.speed, "wave speed c");
    w->add_option("--kappa", wave.kappa, "decay rate kappa");
    w->add_flag("--min-speed-continuation", wave.continuation, "continue c down towards c0*");
    w->add_option("--domain", wave.domain, "final half-width of the truncated domain");
    w->add_option("--dx", wave.h, "mesh spacing");
    w->add_option("--tol", wave.tol, "fixed-point tolerance");
    w->add_option("--max-iter", wave.max_iter, "fixed-point iteration cap per stage");

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "run a time-dependent experiment");
    add_common(s, sim);
    s->add_option("experiment", sim.experiment, "spread | stability-e1 | stability-estar | bump-check | "
                                                "single-species | wave-drift")
        ->required();
    s->add_option("--T", sim.T, "final time");
    s->add_option("--amplitude", sim.amplitude, "perturbation amplitude (stability)");
    s->add_option("--dt", sim.dt, "time step");
    s->add_option("--dx", sim.h, "mesh spacing");
    s->add_option("--c", sim.c, "frame speed (bump-check)");
    s->add_option("--q", sim.q, "bump speed (bump-check)");
    s->add_option("--eps", sim.eps, "bump epsilon (bump-check)");
    s->add_option("--profile", sim.profile, "output directory of a `wave` run (wave-drift)");
    s->add_option("--kappa", sim.kappa, "solve the wave for this kappa (wave-drift)");
    s->add_flag("--positive-start", sim.positive_start, "start near a/b (single-species)");

    VerifyArgs ver;
    auto* v = app.add_subcommand("verify", "numerical checks of the kernel bounds and the operator sign conditions");
    add_common(v, ver);
    v->add_option("--samples", ver.samples, "random members of the envelope set");
    v->add_option("--kappa", ver.kappa, "decay rate (default min(0.3, kappa*/2))");
    v->add_option("--dx", ver.h, "mesh spacing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (*c) return cmd_check(check, std::cout, std::cerr);
    if (*w) return cmd_wave(wave, std::cout, std::cerr);
    if (*s) return cmd_simulate(sim, std::cout, std::cerr);
    return cmd_verify(ver, std::cout, std::cerr);
}
