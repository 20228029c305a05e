#pragma once

#include "chemowave/envelopes.hpp"
#include "chemowave/params.hpp"
#include "chemowave/simulator.hpp"
#include "chemowave/supersub.hpp"
#include "chemowave/wavesolver.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemowave {

/// Malformed configuration; the message names the source and line.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Config {
    Params params;
    std::uint64_t seed = 42;
    std::optional<SingleSpeciesParams> single;
};

/// key=value lines, `#` starts a comment. Keys: a, b, d, r, lambda, mu1, mu2,
/// chi1, chi2, seed, and optionally single_a, single_b, single_d (with chi1,
/// mu1, lambda reused for the single-species model).
Config parse_config(const std::string& text, const std::string& source = "<config>");
Config load_config(const std::filesystem::path& path);
/// Shortest decimal form that reads back to the same doubles.
std::string format_config(const Config& c);

std::string format_double(double x);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);
/// Line chart with one polyline per series.
void write_svg(const std::filesystem::path& path, const std::string& title, const std::string& xlabel,
               const std::string& ylabel, const std::vector<Series>& series, bool log_y = false);

void write_profile_csv(const std::filesystem::path& path, const WaveProfile& w);
/// Reads x,U1,U2,V; c and kappa come from the manifest next to it.
WaveProfile read_profile(const std::filesystem::path& dir);

nlohmann::json to_json(const Params& p);
nlohmann::json to_json(const Config& c);
nlohmann::json to_json(const DerivedConstants& d);
nlohmann::json to_json(const InequalityRecord& r);
nlohmann::json to_json(const HypothesisReport& h);
nlohmann::json to_json(const Envelopes& e);
nlohmann::json to_json(const TailReport& t);
nlohmann::json to_json(const FixedPointStats& s);
nlohmann::json to_json(const LemmaBoundsReport& r);
nlohmann::json to_json(const SignCheck& s);
nlohmann::json wave_summary(const WaveProfile& w);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace chemowave
