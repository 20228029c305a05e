#pragma once

#include "chemowave/envelopes.hpp"
#include "chemowave/grid.hpp"
#include "chemowave/kernel.hpp"
#include "chemowave/params.hpp"
#include "chemowave/supersub.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemowave {

/// A solver hit its iteration limit. Carries the residual history and the last iterate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::vector<double> history, FieldPair last = {})
        : std::runtime_error(what), history(std::move(history)), last(std::move(last)) {}
    std::vector<double> history;
    FieldPair last;
};

/// Scalar two-point problem for one component with a frozen environment u:
///   0 = d_i U'' + (c - chi_i v_x) U' + A_i^u(x, U),  U(-y) = left_value, U(y) = right_value.
struct BvpProblem {
    int component = 1;
    FieldPair u;
    ChemicalField chem;
    Envelopes env;
    double c = 0.0;
    double left_value = 0.0;
    double right_value = 0.0;
};

/// Frozen environment u on [-y, y] with Dirichlet values upper_i(+-y).
BvpProblem make_bvp(int component, const FieldPair& u, const Envelopes& env, const Params& p);

struct BvpOptions {
    double tol = 1e-10;
    int max_newton = 60;
    int max_monotone = 200000;
};

struct BvpResult {
    Field U;
    double residual = 0.0;
    int newton_iterations = 0;
    bool used_fallback = false;
    std::vector<double> history;
};

/// Damped semismooth Newton on the central-difference discretization, falling
/// back to monotone iteration from the upper envelope if Newton stalls.
/// `initial` (optional) seeds Newton; boundary entries are overwritten.
BvpResult solve_bvp(const BvpProblem& prob, const Params& p, const BvpOptions& opts = {},
                    const Field* initial = nullptr);

/// Monotone iteration only (used as fallback and as an independent check).
BvpResult solve_bvp_monotone(const BvpProblem& prob, const Params& p, const Field& start,
                             const BvpOptions& opts = {});

/// max |G_i(U)| over interior points of the discretized BVP.
double bvp_residual(const BvpProblem& prob, const Params& p, const Field& U);

enum class LeftLimit { E1, ESTAR, UNRESOLVED };
const char* to_string(LeftLimit l);

struct TailReport {
    double rate = 0.0;             // fitted decay rate of U1
    double u1_prefactor = 0.0;     // fitted limit of U1 e^{kappa x}
    double u2_prefactor = 0.0;     // fitted limit of (U2 - 1) e^{kappa x}
    double u2_prefactor_closed_form = 0.0;
    double x_lo = 0.0;
    double x_hi = 0.0;
    std::size_t points = 0;
};

struct FixedPointStats {
    int iterations = 0;
    double final_update = 0.0;
    double theta = 1.0;
    int newton_iterations = 0;
    int fallbacks = 0;
    /// Largest distance outside the envelope bracket seen before projection.
    double max_envelope_violation = 0.0;
    std::vector<double> history;
};

struct WaveProfile {
    Field U1;
    Field U2;
    Field V;
    double c = 0.0;
    double kappa = 0.0;
    /// max over interior points of the unpenalized steady equations
    double residual = 0.0;
    Envelopes env;
    std::vector<FixedPointStats> stages;
    std::optional<TailReport> tails;
    LeftLimit left = LeftLimit::UNRESOLVED;
    const Grid& grid() const { return U1.grid; }
};

struct WaveOptions {
    std::vector<double> y_schedule{50.0, 100.0, 200.0};
    double h = 0.05;
    double tol = 1e-10;
    int max_iter = 20000;
    double theta = 1.0;
    BvpOptions bvp;
};

/// Picard iteration u <- u + theta (Phi(u) - u) on [-y, y], starting from the
/// upper envelopes (or `initial`, projected into E). theta halves when the
/// sup-norm of the update grows by more than half and recovers slowly while it shrinks.
WaveProfile fixed_point_iterate(const Params& p, const Envelopes& env, double y,
                                const WaveOptions& opts, const FieldPair* initial = nullptr);

/// Wave of speed c > c*, using kappa the smaller root of c = c_kappa.
WaveProfile solve_wave(const Params& p, double c, const WaveOptions& opts = {},
                       const FieldPair* initial = nullptr);
WaveProfile solve_wave_kappa(const Params& p, double kappa, const WaveOptions& opts = {},
                             const FieldPair* initial = nullptr);

/// Max residual of d_i U_i'' + (c - chi_i V_x) U_i' + U_i (growth) over interior points.
double steady_residual(const Field& U1, const Field& U2, const Params& p, double c);

/// Throws std::runtime_error if the U1 window [1e-8, 1e-3] holds fewer than 10 points.
TailReport fit_tails(const WaveProfile& w, const Params& p);

/// Averages (U1, U2) over a tenth of the domain near the left end, after
/// skipping the Dirichlet boundary layer, and matches e1 or e* within tol.
LeftLimit classify_left_limit(const WaveProfile& w, const Params& p, double tol = 1e-3);
Point2 left_average(const WaveProfile& w);

/// Shift s with U1(s) = 1/2 (leftmost downcrossing).
double half_crossing(const Field& U1);

/// Profile resampled on the same grid as U(x + shift); beyond the domain the tails are used.
Field shifted(const Field& f, double shift);

struct ContinuationStep {
    double c = 0.0;
    double kappa = 0.0;
    WaveProfile profile;
    double shift = 0.0;  // x where U1 = 1/2 before normalization
    /// sup |U - U_prev| on the comparison window after normalization (NaN for the first)
    double diff_to_previous = 0.0;
};

struct ContinuationResult {
    std::vector<ContinuationStep> steps;
    std::optional<std::size_t> failed_index;
    std::string failure;
    double window = 20.0;
    bool diffs_decreasing() const;
};

/// Default speeds c0* x {1.2, 1.1, 1.05, 1.02, 1.01}.
std::vector<double> default_continuation_speeds(const Params& p);

ContinuationResult min_speed_continuation(const Params& p, const std::vector<double>& speeds,
                                          const WaveOptions& opts = {}, double window = 20.0);

}  // namespace chemowave
