#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chemowave/commands.hpp"
#include "chemowave/io.hpp"
#include "support.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace chemowave;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kP0 = R"(# reference set
a = 0.5
b = 1.2
d = 1
r = 1
lambda = 2
mu1 = 0.1
mu2 = 0.1
chi1 = 0.2   # trailing comment
chi2 = 0.2
seed = 42
)";

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "chemowave_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
    return path;
}

std::string with(const std::string& base, const std::string& key, const std::string& value) {
    std::istringstream in(base);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + " =", 0) == 0) line = key + " = " + value;
        out << line << "\n";
    }
    return out.str();
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

}  // namespace

TEST_CASE("config parsing") {
    const Config c = parse_config(kP0, "p0.cfg");
    CHECK(c.params == testsupport::p0());
    CHECK(c.seed == 42);
    CHECK_FALSE(c.single.has_value());

    auto error_of = [](const std::string& text) {
        try {
            parse_config(text, "x.cfg");
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(error_of("a = 0.5\nbogus = 1\n").find("x.cfg:2") != std::string::npos);
    CHECK(error_of("a = 0.5\nb 1.2\n").find("x.cfg:2") != std::string::npos);
    CHECK(error_of("a = zero\n").find("x.cfg:1") != std::string::npos);
    CHECK(error_of("a = 0.5\na = 0.6\n").find("duplicate") != std::string::npos);
    CHECK(error_of("a = -1\n").find("x.cfg") != std::string::npos);
    CHECK(error_of("seed = -3\n").find("seed") != std::string::npos);

    const Config s = parse_config("single_a = 2\nsingle_b = 1\nchi1 = 0.3\n");
    REQUIRE(s.single.has_value());
    CHECK(s.single->a == 2.0);
    CHECK(s.single->chi == 0.3);
}

TEST_CASE("config formatting round-trips exactly") {
    Config c;
    c.params.a = 0.1 + 0.2;
    c.params.lambda = 1.0 / 3.0;
    c.seed = 7;
    const Config back = parse_config(format_config(c));
    CHECK(back.params == c.params);
    CHECK(back.seed == 7);
}

TEST_CASE("csv, svg and profile round trip") {
    const fs::path dir = scratch("io");
    write_csv(dir / "t.csv", {"x", "y"}, {{1.0, 2.0}, {0.5, 0.25}});
    std::ifstream in(dir / "t.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "x,y");
    CHECK(row == "1,0.5");
    write_svg(dir / "t.svg", "title", "x", "y", {{"s", {0.0, 1.0}, {1.0, 0.1}}}, true);
    std::ifstream svg(dir / "t.svg");
    std::string text((std::istreambuf_iterator<char>(svg)), {});
    CHECK(text.find("<svg") != std::string::npos);
    CHECK(text.find("polyline") != std::string::npos);

    WaveArgs w;
    w.config = write_file(dir / "chi0.cfg", with(with(kP0, "chi1", "0"), "chi2", "0"));
    w.output_dir = dir / "wave";
    w.kappa = 0.4;
    w.domain = 100.0;
    std::ostringstream out, err;
    REQUIRE(cmd_wave(w, out, err) == kExitOk);
    const WaveProfile back = read_profile(dir / "wave");
    CHECK(back.kappa == doctest::Approx(0.4));
    CHECK(back.c == doctest::Approx(1.65));
    CHECK(back.U1.size() > 1000);
    CHECK(back.U1.right_tail == 0.0);
    CHECK(back.U2.right_tail == 1.0);
}

TEST_CASE("check subcommand") {
    const fs::path dir = scratch("check");
    CheckArgs a;
    a.config = write_file(dir / "p0.cfg", kP0);
    a.output_dir = dir / "out";
    a.require = {"H1", "H2"};
    std::ostringstream out, err;
    CHECK(cmd_check(a, out, err) == kExitOk);
    CHECK(out.str().find("slack=") != std::string::npos);
    const json m = read_json(dir / "out" / "manifest.json");
    CHECK(m["command"] == "check");
    CHECK(m["hypotheses"]["H2"] == true);
    CHECK(m.contains("timing"));
    CHECK(m["derived"]["M1"].get<double>() == doctest::Approx(50.0 / 49.0));

    CheckArgs b = a;
    b.config = write_file(dir / "a15.cfg", with(kP0, "a", "1.5"));
    b.require = {"H2"};
    std::ostringstream o2, e2;
    CHECK(cmd_check(b, o2, e2) == kExitAssertion);

    CheckArgs c = a;
    c.config = write_file(dir / "chi0.cfg", with(with(kP0, "chi1", "0"), "chi2", "0"));
    c.require = {};
    std::ostringstream o3, e3;
    CHECK(cmd_check(c, o3, e3) == kExitOk);
    CHECK(o3.str().find("reduces to (1 - a)(1 - (d - 1)_+) >= r (ab - 1)_+") != std::string::npos);

    CheckArgs d = a;
    d.config = write_file(dir / "bad.cfg", "a = 0.5\nb == 2\n");
    d.output_dir = dir / "bad";
    std::ostringstream o4, e4;
    CHECK(cmd_check(d, o4, e4) == kExitUsage);
    CHECK(e4.str().find("bad.cfg:2") != std::string::npos);
    const json bad = read_json(dir / "bad" / "manifest.json");
    CHECK(bad["status"] == "config-error");

    CheckArgs e = a;
    e.require = {"H9"};
    std::ostringstream o5, e5;
    CHECK(cmd_check(e, o5, e5) == kExitUsage);
}

TEST_CASE("wave subcommand refusals") {
    const fs::path dir = scratch("wave");
    WaveArgs w;
    w.config = write_file(dir / "p0.cfg", kP0);
    w.output_dir = dir / "out";
    w.speed = 0.5 * std::sqrt(2.0);
    std::ostringstream out, err;
    CHECK(cmd_wave(w, out, err) == kExitUsage);
    CHECK(err.str().find("c* = 1.41421356") != std::string::npos);
    CHECK(read_json(dir / "out" / "manifest.json")["status"] == "refused");

    WaveArgs both = w;
    both.kappa = 0.3;
    std::ostringstream o2, e2;
    CHECK(cmd_wave(both, o2, e2) == kExitUsage);

    WaveArgs stuck = w;
    stuck.speed.reset();
    stuck.kappa = 0.3;
    stuck.max_iter = 2;
    stuck.domain = 60.0;
    std::ostringstream o3, e3;
    CHECK(cmd_wave(stuck, o3, e3) == kExitNonConvergence);
}

TEST_CASE("simulate subcommand") {
    const fs::path dir = scratch("simulate");
    SimulateArgs s;
    s.config = write_file(dir / "p0.cfg", kP0);
    s.output_dir = dir / "bogus";
    s.experiment = "bogus";
    std::ostringstream out, err;
    CHECK(cmd_simulate(s, out, err) == kExitUsage);
    CHECK(err.str().find("stability-estar") != std::string::npos);

    SimulateArgs single = s;
    single.experiment = "single-species";
    std::ostringstream o1, e1;
    CHECK(cmd_simulate(single, o1, e1) == kExitUsage);

    WaveArgs w;
    w.config = s.config;
    w.output_dir = dir / "wave";
    w.speed = 1.6;
    w.domain = 100.0;
    w.plots = false;
    std::ostringstream o2, e2;
    REQUIRE(cmd_wave(w, o2, e2) == kExitOk);
    CHECK_FALSE(fs::exists(dir / "wave" / "profile.svg"));
    CHECK(fs::exists(dir / "wave" / "tails.json"));

    SimulateArgs drift = s;
    drift.experiment = "wave-drift";
    drift.profile = dir / "wave";
    drift.output_dir = dir / "drift";
    drift.T = 10.0;
    std::ostringstream o3, e3;
    CHECK(cmd_simulate(drift, o3, e3) == kExitOk);
    CHECK(fs::exists(dir / "drift" / "drift.csv"));
    CHECK(read_json(dir / "drift" / "manifest.json")["outcome"]["max_drift"].get<double>() < 5e-3);
}

TEST_CASE("verify subcommand and manifest determinism") {
    const fs::path dir = scratch("verify");
    VerifyArgs v;
    v.config = write_file(dir / "p0.cfg", kP0);
    v.output_dir = dir / "a";
    v.samples = 20;
    std::ostringstream out, err;
    CHECK(cmd_verify(v, out, err) == kExitOk);
    VerifyArgs again = v;
    again.output_dir = dir / "b";
    std::ostringstream o2, e2;
    CHECK(cmd_verify(again, o2, e2) == kExitOk);
    json ma = read_json(dir / "a" / "manifest.json"), mb = read_json(dir / "b" / "manifest.json");
    ma.erase("timing");
    mb.erase("timing");
    CHECK(ma.dump() == mb.dump());
    CHECK(fs::exists(dir / "a" / "lemma3.csv"));

    VerifyArgs zero = v;
    zero.samples = 0;
    zero.output_dir = dir / "zero";
    std::ostringstream o3, e3;
    CHECK(cmd_verify(zero, o3, e3) == kExitOk);

    VerifyArgs big = v;
    big.kappa = 0.8;
    big.output_dir = dir / "big";
    std::ostringstream o4, e4;
    CHECK(cmd_verify(big, o4, e4) == kExitUsage);
    CHECK(e4.str().find("kappa*") != std::string::npos);

    VerifyArgs h4 = v;
    h4.config = write_file(dir / "a15.cfg", with(kP0, "a", "1.5"));
    h4.output_dir = dir / "h4";
    std::ostringstream o5, e5;
    CHECK(cmd_verify(h4, o5, e5) == kExitUsage);
}
