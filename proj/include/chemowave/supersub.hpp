#pragma once

#include "chemowave/envelopes.hpp"
#include "chemowave/grid.hpp"
#include "chemowave/kernel.hpp"
#include "chemowave/params.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace chemowave {

struct FieldPair {
    Field u1;
    Field u2;
};

/// Envelopes for decay rate kappa; requires H4 and 0 < kappa < kappa*.
Envelopes build_envelopes(const Params& p, double kappa);

/// Envelope samples on a grid with their limits as tails.
Field upper_field(const Envelopes& env, int component, const Grid& g);
Field lower_field(const Envelopes& env, int component, const Grid& g);
FieldPair upper_pair(const Envelopes& env, const Grid& g);
FieldPair lower_pair(const Envelopes& env, const Grid& g);

/// Sets the tails the wave problem assumes: left tails keep the end value,
/// right tails are 0 for u1 and 1 for u2.
FieldPair with_wave_tails(FieldPair u);

struct ComponentViolation {
    double worst = 0.0;  // largest distance outside the envelope bracket (<= 0 when inside)
    double x_at_worst = 0.0;
};

struct MembershipReport {
    bool in_E = true;
    ComponentViolation c1;
    ComponentViolation c2;
};

MembershipReport membership(const FieldPair& u, const Envelopes& env, double tol = 0.0);

/// Pointwise clamp of each component between its envelopes.
FieldPair project_to_E(const FieldPair& u, const Envelopes& env);

/// Random member of E(kappa): pointwise uniform between the envelopes,
/// one 5-point smoothing pass, then re-projected.
FieldPair sample_in_E(const Envelopes& env, const Grid& g, std::mt19937_64& rng);

/// Reaction part of the penalized operator,
///   A_i(x, U) = (g_i - k_i U_+) U + R (u_i - U),
/// where g_i depends on the frozen environment through u_j, v.
struct ReactionCoefficients {
    std::vector<double> g;  // growth term at each grid point
    std::vector<double> u;  // frozen u_i
    double k = 0.0;         // 1/M1 or r/M2
    double R = 0.0;
};

ReactionCoefficients reaction_coefficients(int component, const FieldPair& u, const Field& v,
                                           const Envelopes& env, const Params& p);

inline double reaction_value(const ReactionCoefficients& rc, std::size_t i, double U) {
    const double Up = U > 0.0 ? U : 0.0;
    return (rc.g[i] - rc.k * Up) * U + rc.R * (rc.u[i] - U);
}

/// dA/dU with the active-branch derivative of U_+ U.
inline double reaction_derivative(const ReactionCoefficients& rc, std::size_t i, double U) {
    const double Up = U > 0.0 ? U : 0.0;
    return rc.g[i] - 2.0 * rc.k * Up - rc.R;
}

/// (F1^u(U1), F2^u(U2)) with central differences; ghost values beyond each
/// end come from the tails of U. Speed c defaults to c_kappa when NaN.
FieldPair eval_operator(const FieldPair& U, const FieldPair& u, const Envelopes& env,
                        const Params& p, double c);

struct SignCheck {
    std::string name;
    std::size_t sample = 0;
    int component = 1;
    double worst_slack = 0.0;
    double x_at_worst = 0.0;
    bool holds = true;
};

struct Lemma3Report {
    double tolerance = 0.0;
    std::size_t samples = 0;  // random members checked (excluding the four extremes)
    std::vector<SignCheck> checks;
    bool all_hold() const;
    /// Worst entry per (name, component) across all samples.
    std::vector<SignCheck> summary() const;
};

/// Checks the sign conditions
///   F_i(M_i) <= 0, F_i(0) >= 0,
///   F_i(upper_i) <= 0 on {upper_i < M_i},
///   F_i(lower_i) >= 0 on {lower_i > 0}
/// for the four envelope extremes and `samples` random members of E(kappa),
/// with tolerance 10 h^2. Kinks, and one cell on each side, are skipped.
Lemma3Report verify_lemma3(const Envelopes& env, const Params& p, std::size_t samples,
                           const Grid& g, std::uint64_t seed = 42);

/// A grid wide enough to resolve every envelope kink for lemma checks.
Grid lemma_grid(const Envelopes& env, double h = 0.05);

}  // namespace chemowave
