#include "chemowave/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace chemowave {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json point(Point2 p) { return json::array({p.u1, p.u2}); }

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

Config parse_config(const std::string& text, const std::string& source) {
    Config c;
    std::map<std::string, double*> keys{
        {"a", &c.params.a},       {"b", &c.params.b},       {"d", &c.params.d},
        {"r", &c.params.r},       {"lambda", &c.params.lambda}, {"mu1", &c.params.mu1},
        {"mu2", &c.params.mu2},   {"chi1", &c.params.chi1}, {"chi2", &c.params.chi2}};
    std::map<std::string, double> single;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        std::ostringstream os;
        os << source << ":" << lineno << ": " << msg;
        throw ConfigError(os.str());
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (val.empty()) fail("missing value for '" + key + "'");
        if (seen[key]++) fail("duplicate key '" + key + "'");
        if (key == "seed") {
            std::uint64_t s = 0;
            const auto r = std::from_chars(val.data(), val.data() + val.size(), s);
            if (r.ec != std::errc() || r.ptr != val.data() + val.size()) fail("seed must be a non-negative integer");
            c.seed = s;
            continue;
        }
        double x = 0.0;
        const auto r = std::from_chars(val.data(), val.data() + val.size(), x);
        if (r.ec != std::errc() || r.ptr != val.data() + val.size()) fail("'" + val + "' is not a number");
        if (!std::isfinite(x)) fail("value for '" + key + "' must be finite");
        if (key == "single_a" || key == "single_b" || key == "single_d") {
            single[key] = x;
            continue;
        }
        auto it = keys.find(key);
        if (it == keys.end()) fail("unknown key '" + key + "'");
        *it->second = x;
    }
    try {
        c.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(source + ": " + e.what());
    }
    if (!single.empty()) {
        SingleSpeciesParams s;
        s.a = single.count("single_a") ? single["single_a"] : 1.0;
        s.b = single.count("single_b") ? single["single_b"] : 1.0;
        s.d = single.count("single_d") ? single["single_d"] : 1.0;
        s.chi = c.params.chi1;
        s.mu = c.params.mu1;
        s.lambda = c.params.lambda;
        if (!(s.a > 0 && s.b > 0 && s.d > 0)) throw ConfigError(source + ": single_a, single_b, single_d must be positive");
        c.single = s;
    }
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string format_config(const Config& c) {
    std::ostringstream os;
    const Params& p = c.params;
    os << "a = " << format_double(p.a) << "\n"
       << "b = " << format_double(p.b) << "\n"
       << "d = " << format_double(p.d) << "\n"
       << "r = " << format_double(p.r) << "\n"
       << "lambda = " << format_double(p.lambda) << "\n"
       << "mu1 = " << format_double(p.mu1) << "\n"
       << "mu2 = " << format_double(p.mu2) << "\n"
       << "chi1 = " << format_double(p.chi1) << "\n"
       << "chi2 = " << format_double(p.chi2) << "\n"
       << "seed = " << c.seed << "\n";
    if (c.single) {
        os << "single_a = " << format_double(c.single->a) << "\n"
           << "single_b = " << format_double(c.single->b) << "\n"
           << "single_d = " << format_double(c.single->d) << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------- files

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << "\n";
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << format_double(columns[j][i]);
        out << "\n";
    }
}

void write_svg(const std::filesystem::path& path, const std::string& title, const std::string& xlabel,
               const std::string& ylabel, const std::vector<Series>& series, bool log_y) {
    const double W = 720, H = 440, L = 70, R = 160, T = 40, B = 50;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto ty = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
    for (const Series& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0)) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!(x1 > x0)) { x0 = 0; x1 = 1; }
    if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
        << title << "</text>\n"
        << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    auto label = [&](double x, double y, const std::string& s, const char* anchor) {
        out << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"" << anchor
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s << "</text>\n";
    };
    char buf[64];
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0;
        std::snprintf(buf, sizeof buf, "%.4g", xv);
        label(px(xv), H - B + 16, buf, "middle");
        const double yv = y0 + (y1 - y0) * k / 4.0;
        std::snprintf(buf, sizeof buf, log_y ? "1e%.2g" : "%.4g", yv);
        label(L - 6, H - B - (yv - y0) / (y1 - y0) * (H - T - B) + 4, buf, "end");
    }
    label((L + W - R) / 2, H - 12, xlabel, "middle");
    out << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
        << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << ylabel << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const Series& s = series[k];
        const char* col = colors[k % 6];
        out << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 2000);
        for (std::size_t i = 0; i < s.x.size(); i += stride) {
            if (!std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0)) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
            out << buf;
        }
        out << "\"/>\n";
        const double ly = T + 16 + 18 * static_cast<double>(k);
        out << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 36 << "\" y2=\"" << ly
            << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
        label(W - R + 42, ly + 4, s.name, "start");
    }
    out << "</svg>\n";
}

void write_profile_csv(const std::filesystem::path& path, const WaveProfile& w) {
    write_csv(path, {"x", "U1", "U2", "V"}, {w.grid().points(), w.U1.values, w.U2.values, w.V.values});
}

WaveProfile read_profile(const std::filesystem::path& dir) {
    std::ifstream man(dir / "manifest.json");
    if (!man) throw ConfigError("no manifest.json in " + dir.string());
    const json m = json::parse(man);
    const json& w = m.at("outcome").at("wave");
    std::ifstream in(dir / "profile.csv");
    if (!in) throw ConfigError("no profile.csv in " + dir.string());
    std::string line;
    std::getline(in, line);
    std::vector<double> xs, a, b, v;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        double vals[4];
        std::size_t pos = 0;
        for (int k = 0; k < 4; ++k) {
            const std::size_t end = k < 3 ? line.find(',', pos) : line.size();
            if (end == std::string::npos) throw ConfigError("malformed profile.csv line: " + line);
            const auto r = std::from_chars(line.data() + pos, line.data() + end, vals[k]);
            if (r.ec != std::errc()) throw ConfigError("malformed profile.csv line: " + line);
            pos = end + 1;
        }
        xs.push_back(vals[0]);
        a.push_back(vals[1]);
        b.push_back(vals[2]);
        v.push_back(vals[3]);
    }
    if (xs.size() < 3) throw ConfigError("profile.csv holds fewer than 3 rows");
    const Grid g(xs.front(), xs.back(), xs.size());
    WaveProfile p;
    p.U1 = Field(g, std::move(a));
    p.U1.right_tail = 0.0;
    p.U2 = Field(g, std::move(b));
    p.U2.right_tail = 1.0;
    p.V = Field(g, std::move(v));
    p.c = w.at("c").get<double>();
    p.kappa = w.at("kappa").get<double>();
    p.residual = w.at("residual").get<double>();
    return p;
}

// ---------------------------------------------------------------- json

json to_json(const Params& p) {
    return {{"a", p.a},       {"b", p.b},       {"d", p.d},       {"r", p.r},       {"lambda", p.lambda},
            {"mu1", p.mu1},   {"mu2", p.mu2},   {"chi1", p.chi1}, {"chi2", p.chi2}};
}

json to_json(const Config& c) {
    json j = to_json(c.params);
    j["seed"] = c.seed;
    if (c.single) {
        j["single_a"] = c.single->a;
        j["single_b"] = c.single->b;
        j["single_d"] = c.single->d;
    }
    return j;
}

json to_json(const DerivedConstants& d) {
    json j{{"H1", d.H1},
           {"H2", d.H2},
           {"H3", d.H3},
           {"H4", d.H4},
           {"H5", d.H5},
           {"M1", opt(d.M1)},
           {"M2", opt(d.M2)},
           {"c0_star", opt(d.c0_star)},
           {"kappa_max", opt(d.kappa_max)},
           {"kappa1_star", opt(d.kappa1_star)},
           {"kappa_star", opt(d.kappa_star)},
           {"c_star", opt(d.c_star)},
           {"e0", point(d.e0)},
           {"e1", point(d.e1)},
           {"e2", point(d.e2)},
           {"e_star", d.e_star ? point(*d.e_star) : json(nullptr)},
           {"notes", d.notes}};
    return j;
}

json to_json(const InequalityRecord& r) {
    return {{"name", r.name}, {"text", r.text}, {"lhs", r.lhs},     {"rhs", r.rhs},
            {"strict", r.strict}, {"slack", r.slack}, {"holds", r.holds}};
}

json to_json(const HypothesisReport& h) {
    json recs = json::array();
    for (const auto& r : h.records) recs.push_back(to_json(r));
    json j{{"H1", h.H1}, {"H2", h.H2}, {"H3", h.H3}, {"H4", h.H4}, {"H5", h.H5},
           {"h5_implies_h4", h.h5_implies_h4}, {"records", recs}};
    if (h.classical_reduction) j["classical_reduction"] = to_json(*h.classical_reduction);
    return j;
}

json to_json(const Envelopes& e) {
    return {{"kappa", e.kappa}, {"c_kappa", e.c_kappa}, {"eps1", e.eps1},   {"D1", e.D1},
            {"D1_safety", e.D1_safety}, {"D2", e.D2}, {"D2_tilde", e.D2_tilde}, {"R", e.R},
            {"M1", e.M1},       {"M2", e.M2},           {"f", e.f},          {"y0", e.y0()}};
}

json to_json(const TailReport& t) {
    return {{"rate", t.rate},
            {"u1_prefactor", t.u1_prefactor},
            {"u2_prefactor", t.u2_prefactor},
            {"u2_prefactor_closed_form", t.u2_prefactor_closed_form},
            {"window", {t.x_lo, t.x_hi}},
            {"points", t.points}};
}

json to_json(const FixedPointStats& s) {
    return {{"iterations", s.iterations},
            {"final_update", s.final_update},
            {"theta", s.theta},
            {"newton_iterations", s.newton_iterations},
            {"fallbacks", s.fallbacks},
            {"max_envelope_violation", s.max_envelope_violation}};
}

json to_json(const LemmaBoundsReport& r) {
    auto one = [](const BoundCheck& b) {
        return json{{"name", b.name}, {"worst_slack", b.worst_slack}, {"x", b.x_at_worst}, {"holds", b.holds}};
    };
    return {{"upper", one(r.upper)}, {"lower", one(r.lower)}, {"derivative", one(r.derivative)},
            {"tolerance", r.tolerance}, {"all_hold", r.all_hold()}};
}

json to_json(const SignCheck& s) {
    return {{"name", s.name}, {"sample", s.sample}, {"component", s.component},
            {"worst_slack", s.worst_slack}, {"x", s.x_at_worst}, {"holds", s.holds}};
}

json wave_summary(const WaveProfile& w) {
    json stages = json::array();
    for (const auto& s : w.stages) stages.push_back(to_json(s));
    const Grid& g = w.grid();
    json j{{"c", w.c},
           {"kappa", w.kappa},
           {"residual", w.residual},
           {"domain", {g.x_min(), g.x_max()}},
           {"h", g.h()},
           {"points", g.size()},
           {"envelopes", to_json(w.env)},
           {"stages", stages},
           {"left_limit", to_string(w.left)},
           {"tails", w.tails ? to_json(*w.tails) : json(nullptr)}};
    double mn = INFINITY;
    for (std::size_t i = 1; i + 1 < w.U1.size(); ++i) mn = std::min(mn, w.U1[i]);
    j["min_interior_U1"] = mn;
    return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace chemowave
