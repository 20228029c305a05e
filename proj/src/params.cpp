#include "chemowave/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace chemowave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

InequalityRecord make_record(std::string name, std::string text, double lhs, double rhs,
                             bool strict) {
    InequalityRecord rec;
    rec.name = std::move(name);
    rec.text = std::move(text);
    rec.lhs = lhs;
    rec.rhs = rhs;
    rec.strict = strict;
    rec.slack = lhs - rhs;
    if (std::isnan(rec.slack)) {
        rec.holds = false;
    } else {
        rec.holds = strict ? rec.slack > 0.0 : rec.slack >= 0.0;
    }
    return rec;
}

bool all_hold(const std::vector<InequalityRecord>& recs, const std::string& prefix) {
    bool any = false;
    for (const auto& r : recs) {
        if (r.name.rfind(prefix + ".", 0) == 0) {
            any = true;
            if (!r.holds) return false;
        }
    }
    return any;
}

}  // namespace

void Params::validate() const {
    const std::pair<const char*, double> positive[] = {
        {"a", a}, {"b", b}, {"d", d}, {"r", r}, {"lambda", lambda}, {"mu1", mu1}, {"mu2", mu2}};
    for (const auto& [name, value] : positive) {
        if (!std::isfinite(value) || value <= 0.0) {
            std::ostringstream os;
            os << "parameter " << name << " must be finite and > 0 (got " << value << ")";
            throw std::invalid_argument(os.str());
        }
    }
    const std::pair<const char*, double> nonneg[] = {{"chi1", chi1}, {"chi2", chi2}};
    for (const auto& [name, value] : nonneg) {
        if (!std::isfinite(value) || value < 0.0) {
            std::ostringstream os;
            os << "parameter " << name << " must be finite and >= 0 (got " << value << ")";
            throw std::invalid_argument(os.str());
        }
    }
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

double amplitude_bound1(const Params& p) {
    if (!(p.chi1 * p.mu1 < 1.0)) throw HypothesisError("H1 violated: chi1*mu1 >= 1, M1 undefined");
    return 1.0 / (1.0 - p.chi1 * p.mu1);
}

double amplitude_bound2(const Params& p) {
    if (!(p.chi2 * p.mu2 < p.r)) throw HypothesisError("H1 violated: chi2*mu2 >= r, M2 undefined");
    return p.r / (p.r - p.chi2 * p.mu2);
}

double minimal_linear_speed(const Params& p) {
    if (!(p.a < 1.0)) throw DomainError("c0* = 2 sqrt(1 - a) requires a < 1");
    return 2.0 * std::sqrt(1.0 - p.a);
}

double kappa_max(const Params& p) {
    if (!(p.a < 1.0)) throw DomainError("kappa_max requires a < 1");
    return std::min(std::sqrt(1.0 - p.a), std::sqrt(p.lambda));
}

double b_lambda_kappa(double lambda, double kappa) {
    if (!(lambda > 0.0)) throw DomainError("B_{lambda,kappa} requires lambda > 0");
    const double sl = std::sqrt(lambda);
    if (!(std::abs(kappa) < sl)) throw DomainError("B_{lambda,kappa} requires |kappa| < sqrt(lambda)");
    return 2.0 * sl / (lambda - kappa * kappa);
}

double c_of_kappa(const Params& p, double kappa) {
    if (!(kappa > 0.0)) throw DomainError("c_kappa requires kappa > 0");
    return (kappa * kappa + 1.0 - p.a) / kappa;
}

double kappa_of_speed(const Params& p, double c) {
    const double c0 = minimal_linear_speed(p);
    if (c < c0) throw DomainError("no real decay rate for speed below c0*");
    const double disc = std::max(0.0, c * c - 4.0 * (1.0 - p.a));
    // Smaller root in cancellation-free form.
    return 2.0 * (1.0 - p.a) / (c + std::sqrt(disc));
}

double solve_f(const Params& p, double kappa) {
    const double M1 = amplitude_bound1(p);
    const double M2 = amplitude_bound2(p);
    const double k1 = kappa1_star(p);
    if (!(kappa > 0.0) || !(kappa < k1)) throw DomainError("solve_f requires 0 < kappa < kappa1*");
    const double B = b_lambda_kappa(p.lambda, kappa);
    const double denom = 1.0 - kappa * B * p.chi1 * p.mu1 * M1 / 2.0;
    if (!(denom > 0.0)) throw DomainError("solve_f: kappa B chi1 mu1 M1 / 2 >= 1");
    const double rhs = 0.5 * kappa * B * (p.mu2 * M2 + p.a * p.mu1 * M1) +
                       p.mu2 * kappa * kappa * B / (2.0 * std::sqrt(p.lambda));
    return rhs / denom;
}

double eval_F(const Params& p, double kappa) {
    const double f = solve_f(p, kappa);
    const double M1 = amplitude_bound1(p);
    const double M2 = amplitude_bound2(p);
    const double B = b_lambda_kappa(p.lambda, kappa);
    const double sl = std::sqrt(p.lambda);
    const double competition =
        p.r * positive_part(M1 * (p.a + p.chi1 * f) * (p.b - p.chi2 * p.mu1 / p.r) - 1.0 / M2);
    const double taxis = p.chi2 * (p.lambda * B + 2.0 * kappa) * (p.mu1 * M1 + p.mu2 * M2) / (2.0 * sl);
    return competition + taxis - (1.0 - p.d) * kappa * kappa;
}

double eval_F_at_zero(const Params& p) {
    const double M1 = amplitude_bound1(p);
    const double M2 = amplitude_bound2(p);
    return p.r * positive_part(M1 * p.a * (p.b - p.chi2 * p.mu1 / p.r) - 1.0 / M2) +
           p.chi2 * (p.mu1 * M1 + p.mu2 * M2);
}

double kappa1_star(const Params& p) {
    const double kmax = kappa_max(p);
    if (p.chi1 == 0.0) return kmax;
    const double M1 = amplitude_bound1(p);
    // kappa B < 2/(chi1 mu1 M1)  <=>  kappa^2 + s kappa - lambda < 0,  s = chi1 mu1 M1 sqrt(lambda)
    const double s = p.chi1 * p.mu1 * M1 * std::sqrt(p.lambda);
    const double root = 2.0 * p.lambda / (s + std::sqrt(s * s + 4.0 * p.lambda));
    return std::min(root, kmax);
}

std::optional<double> kappa_star(const Params& p, const KappaStarOptions& opts) {
    const HypothesisReport rep = check_hypotheses(p);
    if (!rep.H4) return std::nullopt;
    const double k1 = kappa1_star(p);
    const double target = 1.0 - p.a;
    auto violates = [&](double k) { return eval_F(p, k) > target; };

    const int n = std::max(opts.scan_points, 2);
    double last_ok = 0.0;
    for (int j = 1; j < n; ++j) {
        const double k = k1 * static_cast<double>(j) / n;
        if (violates(k)) {
            double lo = last_ok;
            double hi = k;
            while (hi - lo > opts.tolerance) {
                const double mid = 0.5 * (lo + hi);
                if (violates(mid)) hi = mid; else lo = mid;
            }
            return lo;
        }
        last_ok = k;
    }
    // Probe the last sub-interval just below kappa1*.
    const double near_end = k1 * (1.0 - 1e-12);
    if (near_end > last_ok && violates(near_end)) {
        double lo = last_ok;
        double hi = near_end;
        while (hi - lo > opts.tolerance) {
            const double mid = 0.5 * (lo + hi);
            if (violates(mid)) hi = mid; else lo = mid;
        }
        return lo;
    }
    return k1;
}

std::optional<double> c_star(const Params& p) {
    const auto ks = kappa_star(p);
    if (!ks || !(*ks > 0.0)) return std::nullopt;
    return std::max(c_of_kappa(p, *ks), minimal_linear_speed(p));
}

std::optional<Point2> coexistence_state(const Params& p) {
    const double det = 1.0 - p.a * p.b;
    if (det == 0.0) return std::nullopt;
    return Point2{(1.0 - p.a) / det, (1.0 - p.b) / det};
}

double u2_tail_prefactor(const Params& p, double kappa) {
    const double M2 = amplitude_bound2(p);
    const double B = b_lambda_kappa(p.lambda, kappa);
    const double denom = (1.0 - p.a) + p.r / M2 - (p.d - 1.0) * kappa * kappa -
                         0.5 * p.chi2 * p.mu2 * std::sqrt(p.lambda) * B;
    if (!(denom > 0.0)) throw DomainError("U2 tail prefactor: denominator is not positive");
    return (p.chi2 * p.mu2 - p.r * p.b) / denom;
}

HypothesisReport check_hypotheses(const Params& p) {
    HypothesisReport rep;
    auto& recs = rep.records;

    recs.push_back(make_record("H1.1", "1 > chi1 mu1", 1.0, p.chi1 * p.mu1, true));
    recs.push_back(make_record("H1.2", "r > chi2 mu2", p.r, p.chi2 * p.mu2, true));
    recs.push_back(make_record("H1.3", "a >= chi1 mu2", p.a, p.chi1 * p.mu2, false));
    recs.push_back(make_record("H1.4", "b r >= chi2 mu1", p.b * p.r, p.chi2 * p.mu1, false));

    const bool m_defined = recs[0].holds && recs[1].holds;
    const double M1 = m_defined ? 1.0 / (1.0 - p.chi1 * p.mu1) : kNaN;
    const double M2 = m_defined ? p.r / (p.r - p.chi2 * p.mu2) : kNaN;
    const double one_minus_a = 1.0 - p.a;
    const double sqrt_1ma = one_minus_a >= 0.0 ? std::sqrt(one_minus_a) : kNaN;
    const double sl = std::sqrt(p.lambda);

    recs.push_back(make_record("H2.1", "1 > chi1 mu1 M1 + a M2", 1.0, p.chi1 * p.mu1 * M1 + p.a * M2, true));
    recs.push_back(make_record("H2.2", "b >= 1", p.b, 1.0, false));

    recs.push_back(make_record("H3.1", "1 > chi1 mu1 M1 + a M2", 1.0, p.chi1 * p.mu1 * M1 + p.a * M2, true));
    recs.push_back(make_record("H3.2", "r > b r M1 + chi2 mu2 M2", p.r, p.b * p.r * M1 + p.chi2 * p.mu2 * M2, true));

    const double h4_rhs = p.r * positive_part(M1 * p.a * (p.b - p.chi2 * p.mu1 / p.r) - 1.0 / M2) +
                          p.chi2 * (p.mu1 * M1 + p.mu2 * M2);
    recs.push_back(make_record("H4.1", "1 - a > r (M1 a (b - chi2 mu1 / r) - 1/M2)_+ + chi2 (mu1 M1 + mu2 M2)",
                               one_minus_a, m_defined ? h4_rhs : kNaN, true));

    recs.push_back(make_record("H5.0", "1 - a > 0", one_minus_a, 0.0, true));
    const double h5a_rhs = one_minus_a * (1.0 + p.chi1 * p.mu1 * M1);
    recs.push_back(make_record("H5.1", "lambda > (1 - a)(1 + chi1 mu1 M1)", p.lambda, h5a_rhs, true));
    double h5b_lhs = one_minus_a * (1.0 - positive_part(p.d - 1.0));
    double h5b_rhs = kNaN;
    if (m_defined && one_minus_a > 0.0 && p.lambda - h5a_rhs > 0.0) {
        const double inner = one_minus_a * (p.mu2 * M2 + p.a * p.mu1 * M1 + one_minus_a * p.mu2 / sl) /
                             (p.lambda - h5a_rhs);
        h5b_rhs = p.r * positive_part(M1 * (p.a + p.chi1 * inner) * (p.b - p.chi2 * p.mu1 / p.r) - 1.0 / M2) +
                  p.chi2 * (p.lambda / (p.lambda - one_minus_a) + sqrt_1ma / sl) * (p.mu1 * M1 + p.mu2 * M2);
    }
    recs.push_back(make_record(
        "H5.2",
        "(1 - a)(1 - (d - 1)_+) >= r (M1 (a + chi1 (1-a)(mu2 M2 + a mu1 M1 + (1-a) mu2/sqrt(lambda)) / "
        "(lambda - (1-a)(1 + chi1 mu1 M1))) (b - chi2 mu1 / r) - 1/M2)_+ + "
        "chi2 (lambda/(lambda - (1-a)) + sqrt(1-a)/sqrt(lambda)) (mu1 M1 + mu2 M2)",
        h5b_lhs, h5b_rhs, false));

    rep.H1 = all_hold(recs, "H1");
    rep.H2 = rep.H1 && all_hold(recs, "H2");
    rep.H3 = rep.H1 && all_hold(recs, "H3");
    rep.H4 = rep.H1 && all_hold(recs, "H4");
    rep.H5 = rep.H1 && all_hold(recs, "H5");
    rep.h5_implies_h4 = !rep.H5 || rep.H4;

    if (p.chi1 == 0.0 && p.chi2 == 0.0) {
        rep.classical_reduction = make_record("H5.classical", "(1 - a)(1 - (d - 1)_+) >= r (ab - 1)_+",
                                              h5b_lhs, p.r * positive_part(p.a * p.b - 1.0), false);
    }
    return rep;
}

bool HypothesisReport::holds(const std::string& hypothesis) const {
    if (hypothesis == "H1") return H1;
    if (hypothesis == "H2") return H2;
    if (hypothesis == "H3") return H3;
    if (hypothesis == "H4") return H4;
    if (hypothesis == "H5") return H5;
    throw std::invalid_argument("unknown hypothesis '" + hypothesis + "'");
}

std::vector<InequalityRecord> HypothesisReport::records_for(const std::string& hypothesis) const {
    std::vector<InequalityRecord> out;
    for (const auto& r : records) {
        if (r.name.rfind(hypothesis + ".", 0) == 0) out.push_back(r);
    }
    return out;
}

DerivedConstants derive_bounds(const Params& p) {
    p.validate();
    DerivedConstants dc;
    const HypothesisReport rep = check_hypotheses(p);
    dc.H1 = rep.H1;
    dc.H2 = rep.H2;
    dc.H3 = rep.H3;
    dc.H4 = rep.H4;
    dc.H5 = rep.H5;
    dc.e_star = coexistence_state(p);
    if (!dc.e_star) dc.notes.push_back("ab = 1: coexistence state e* undefined");

    if (p.a < 1.0) {
        dc.c0_star = minimal_linear_speed(p);
        dc.kappa_max = kappa_max(p);
    } else {
        dc.notes.push_back("a >= 1: c0*, kappa_max undefined");
    }

    if (p.chi1 * p.mu1 < 1.0 && p.chi2 * p.mu2 < p.r) {
        dc.M1 = amplitude_bound1(p);
        dc.M2 = amplitude_bound2(p);
        if (p.a < 1.0) dc.kappa1_star = kappa1_star(p);
    } else {
        dc.notes.push_back("H1 fails: M1, M2 undefined");
    }
    if (!dc.H1) dc.notes.push_back("H1 fails");

    if (dc.H4 && dc.kappa1_star) {
        dc.kappa_star = kappa_star(p);
        if (dc.kappa_star) dc.c_star = c_star(p);
    } else {
        dc.notes.push_back("H4 fails: kappa*, c* undefined");
    }
    return dc;
}

}  // namespace chemowave
