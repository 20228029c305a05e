#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace chemowave {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitAssertion = 1,
    kExitUsage = 2,
    kExitNonConvergence = 3,
};

inline constexpr const char* kToolVersion = "0.1.0";

struct CommonArgs {
    std::filesystem::path config;
    std::filesystem::path output_dir = ".";
    bool plots = true;
};

struct CheckArgs : CommonArgs {
    std::vector<std::string> require;  // e.g. {"H1", "H2"}
};

struct WaveArgs : CommonArgs {
    std::optional<double> speed;
    std::optional<double> kappa;
    bool continuation = false;
    double domain = 200.0;  // final half-width
    double h = 0.05;
    double tol = 1e-10;
    int max_iter = 20000;
};

inline const std::vector<std::string> kExperiments = {"spread",     "stability-e1",   "stability-estar",
                                                       "bump-check", "single-species", "wave-drift"};

struct SimulateArgs : CommonArgs {
    std::string experiment;
    std::optional<double> T;
    std::optional<double> amplitude;
    double dt = 0.02;
    double h = 0.05;
    /// bump-check
    double c = 1.2;
    double q = 1.3;
    double eps = 0.01;
    /// wave-drift: directory written by `wave`; otherwise a wave is solved for `kappa`
    std::optional<std::filesystem::path> profile;
    std::optional<double> kappa;
    bool positive_start = false;
};

struct VerifyArgs : CommonArgs {
    std::size_t samples = 200;
    std::optional<double> kappa;
    double h = 0.05;
};

int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err);
int cmd_wave(const WaveArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);

}  // namespace chemowave
