#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chemowave {

/// Thrown when an operation is evaluated outside its mathematical domain
/// (e.g. kappa >= sqrt(lambda) for the kernel moment).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Thrown when a hypothesis required by an operation does not hold.
class HypothesisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Coefficients of the two-species chemotaxis competition system
///
///   u1_t = (u1_x - chi1 u1 v_x)_x + u1 (1 - u1 - a u2)
///   u2_t = (d u2_x - chi2 u2 v_x)_x + r u2 (1 - b u1 - u2)
///   0    = v_xx - lambda v + mu1 u1 + mu2 u2
struct Params {
    double a = 0.5;
    double b = 1.2;
    double d = 1.0;
    double r = 1.0;
    double lambda = 2.0;
    double mu1 = 0.1;
    double mu2 = 0.1;
    double chi1 = 0.0;
    double chi2 = 0.0;

    /// Throws std::invalid_argument unless every coefficient is finite,
    /// a, b, d, r, lambda, mu1, mu2 > 0 and chi1, chi2 >= 0.
    void validate() const;

    bool operator==(const Params&) const = default;
};

struct Point2 {
    double u1 = 0.0;
    double u2 = 0.0;
};

/// One inequality of the hypothesis engine, normalized to `lhs > rhs`
/// (strict) or `lhs >= rhs`.
struct InequalityRecord {
    std::string name;
    std::string text;
    double lhs = 0.0;
    double rhs = 0.0;
    bool strict = true;
    double slack = 0.0;  // lhs - rhs, NaN when a term is undefined
    bool holds = false;
};

struct HypothesisReport {
    std::vector<InequalityRecord> records;
    bool H1 = false;
    bool H2 = false;
    bool H3 = false;
    bool H4 = false;
    bool H5 = false;
    /// false only if H5 holds while H4 fails
    bool h5_implies_h4 = true;

    /// Present when chi1 = chi2 = 0: the classical reduction of H5,
    /// r (ab - 1)_+ <= (1 - a)(1 - (d - 1)_+).
    std::optional<InequalityRecord> classical_reduction;

    bool holds(const std::string& hypothesis) const;
    std::vector<InequalityRecord> records_for(const std::string& hypothesis) const;
};

struct DerivedConstants {
    bool H1 = false;
    bool H2 = false;
    bool H3 = false;
    bool H4 = false;
    bool H5 = false;

    std::optional<double> M1;
    std::optional<double> M2;
    std::optional<double> c0_star;
    std::optional<double> kappa_max;
    std::optional<double> kappa1_star;
    std::optional<double> kappa_star;
    std::optional<double> c_star;

    Point2 e0{0.0, 0.0};
    Point2 e1{1.0, 0.0};
    Point2 e2{0.0, 1.0};
    std::optional<Point2> e_star;

    /// Human readable reason when a dependent field is left unset.
    std::vector<std::string> notes;
};

double positive_part(double x);

DerivedConstants derive_bounds(const Params& p);
HypothesisReport check_hypotheses(const Params& p);

/// M1 = 1 / (1 - chi1 mu1); throws HypothesisError unless chi1 mu1 < 1.
double amplitude_bound1(const Params& p);
/// M2 = r / (r - chi2 mu2); throws HypothesisError unless chi2 mu2 < r.
double amplitude_bound2(const Params& p);

/// c0* = 2 sqrt(1 - a); requires a < 1.
double minimal_linear_speed(const Params& p);
/// min{sqrt(1 - a), sqrt(lambda)}; requires a < 1.
double kappa_max(const Params& p);

/// Kernel moment  integral of exp(-sqrt(lambda)|z| - kappa z) dz = 2 sqrt(lambda) / (lambda - kappa^2).
/// Defined for |kappa| < sqrt(lambda).
double b_lambda_kappa(double lambda, double kappa);

/// c_kappa = (kappa^2 + 1 - a) / kappa for kappa > 0.
double c_of_kappa(const Params& p, double kappa);

/// The smaller positive root kappa of c = c_kappa; requires c >= c0*.
double kappa_of_speed(const Params& p, double c);

/// Positive solution f of
///   f = (kappa B / 2)(mu2 M2 + mu1 M1 (a + chi1 f)) + mu2 kappa^2 B / (2 sqrt(lambda)).
/// The equation is linear in f; requires 0 < kappa < kappa1*.
double solve_f(const Params& p, double kappa);

/// The function F(kappa, chi1, chi2) whose comparison with 1 - a defines kappa*.
double eval_F(const Params& p, double kappa);
/// F at kappa -> 0+ (closed form limit).
double eval_F_at_zero(const Params& p);

/// sup{kappa in (0, kappa_max) : kappa B_{lambda,kappa} < 2 / (chi1 mu1 M1)}.
double kappa1_star(const Params& p);

struct KappaStarOptions {
    int scan_points = 2048;
    double tolerance = 1e-10;
};

/// sup{k in (0, kappa1*) : 1 - a >= F(kappa) for every 0 < kappa < k}.
/// Returns std::nullopt when H4 fails (the supremum is undefined).
std::optional<double> kappa_star(const Params& p, const KappaStarOptions& opts = {});

/// c* = c_{kappa*}; std::nullopt when kappa* is undefined.
std::optional<double> c_star(const Params& p);

/// ((1 - a)/(1 - ab), (1 - b)/(1 - ab)); std::nullopt when ab = 1.
std::optional<Point2> coexistence_state(const Params& p);

/// Closed-form limit of (U2 - 1) e^{kappa x} as x -> +infinity for the
/// wave with decay rate kappa. Throws DomainError if the denominator is not positive.
double u2_tail_prefactor(const Params& p, double kappa);

}  // namespace chemowave
